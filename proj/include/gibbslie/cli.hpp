#pragma once

// Command implementations behind the gibbslie executable. Every command
// returns a JSON report and an exit code:
//   0 all checks pass / verdict positive
//   1 mathematical verdict negative
//   2 input error
//   3 internal failure or inconclusive decision

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "gibbslie/algebra_io.hpp"
#include "gibbslie/cones.hpp"
#include "gibbslie/gibbs_kms.hpp"
#include "gibbslie/hwmods.hpp"
#include "gibbslie/library.hpp"
#include "gibbslie/parse.hpp"
#include "gibbslie/roots.hpp"
#include "gibbslie/spectral.hpp"

namespace gibbslie::cli {

inline constexpr const char* kSchema = "gibbslie-report";
inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kPass = 0, kNegative = 1, kInputError = 2, kInternal = 3 };

using Json = nlohmann::ordered_json;

/// Thresholds of the KMS suite; a residual above its bound fails the run.
struct KmsThresholds {
    double reflection = 1e-9;
    double real_line = 1e-9;
    double invariance = 1e-10;
    double gram = -1e-10;  // lower bound on the min Gram eigenvalue
};

struct Options {
    std::string algebra;
    std::string cartan;
    std::string element;
    std::uint64_t seed = 0;
    double tol_spec = 1e-9;
    double tol_trace = 1e-10;
    bool timing = false;

    std::string spectral_mode = "elliptic";  // elliptic | compact-embed | ellipticity-ideal

    std::string module;  // verma | oscillator | su2_irrep | sl2; empty picks from the system
    std::string weight;  // highest weight in t-coordinates
    int two_j = 1;
    long depth = 200;

    std::string family = "su2";
    double lambda = 1;
    double beta = 1;
    std::size_t N = 64;
    std::string word;
    std::string word2;
    bool perturb = false;
    double perturb_amplitude = 0.5;
    std::size_t grid_points = 101;
    std::size_t gram_words = 8;
    KmsThresholds kms;
};

struct Result {
    Json report;
    int exit_code = kPass;
};

// ---------------------------------------------------------------------------
// Resolution of algebras and fixtures.

inline std::filesystem::path fixtures_dir()
{
    if (const char* env = std::getenv("GIBBSLIE_FIXTURES"); env && *env) return env;
#ifdef GIBBSLIE_FIXTURES_DIR
    return GIBBSLIE_FIXTURES_DIR;
#else
    return "fixtures";
#endif
}

struct ResolvedAlgebra {
    std::shared_ptr<const LieAlgebra> algebra;
    std::vector<std::string> cartan;  // hinted Cartan basis, as expressions
    std::string source;
};

namespace detail {

inline std::vector<std::string> cartan_hint(const std::filesystem::path& path, const std::string& text)
{
    std::vector<std::string> out;
    if (path.extension() == ".json") {
        const auto j = nlohmann::json::parse(text, nullptr, false);
        if (j.is_object() && j.contains("cartan") && j["cartan"].is_array())
            for (const auto& s : j["cartan"])
                if (s.is_string()) out.push_back(s.get<std::string>());
        return out;
    }
    try {
        const toml::table tbl = toml::parse(text, path.string());
        if (const auto* arr = tbl["cartan"].as_array())
            for (const auto& node : *arr)
                if (auto s = node.value<std::string>()) out.push_back(*s);
    } catch (const toml::parse_error&) {
    }
    return out;
}

inline std::optional<std::filesystem::path> locate(const std::string& name)
{
    if (name.empty()) throw InputError("--algebra is required");
    const std::filesystem::path direct(name);
    if (std::filesystem::is_regular_file(direct)) return direct;
    for (const char* ext : {".toml", ".json"}) {
        const auto p = fixtures_dir() / (name + ext);
        if (std::filesystem::is_regular_file(p)) return p;
    }
    return std::nullopt;
}

}  // namespace detail

/// A readable path, else <fixtures>/<name>.toml|.json, else a bundled name.
inline ResolvedAlgebra resolve_algebra(const std::string& name)
{
    if (auto path = detail::locate(name)) {
        LoadedAlgebra loaded = load_algebra(*path);
        return {std::make_shared<const LieAlgebra>(std::move(loaded.algebra)),
                detail::cartan_hint(*path, read_file(*path)), path->string()};
    }
    for (const auto& b : library::bundled())
        if (b.name == name) return {std::make_shared<const LieAlgebra>(b.algebra), b.cartan, "bundled:" + b.name};
    throw InputError("unknown algebra '" + name + "': not a file, a fixture or a bundled name");
}

// ---------------------------------------------------------------------------
// JSON helpers.

namespace detail {

inline Json qvector_json(const QVector& v)
{
    Json a = Json::array();
    for (const auto& c : v) a.push_back(c.get_str());
    return a;
}

inline Json subspace_json(const LieAlgebra& g, const Subspace& s)
{
    Json a = Json::array();
    for (const auto& b : s.basis) a.push_back(format_element(g, b));
    return a;
}

inline Json complex_json(cdouble z) { return Json::array({z.real(), z.imag()}); }

inline Json spectral_tolerances_json(const SpectralTolerances& t)
{
    return {{"eps_spec", t.eps_spec},       {"eps_spec_floor", t.eps_spec_floor}, {"cluster_rel", t.cluster_rel},
            {"eps_metric", t.eps_metric},   {"delta_pd", t.delta_pd},             {"pd_budget", t.pd_budget},
            {"snap_den", t.snap_den}};
}

inline Json root_tolerances_json(const RootTolerances& t)
{
    return {{"eps_root", t.eps_root}, {"snap_den", t.snap_den}, {"attempts", t.attempts}, {"max_roots", t.max_roots}};
}

inline SpectralTolerances spectral_tolerances(const Options& o)
{
    SpectralTolerances t;
    t.eps_spec = o.tol_spec;
    t.seed = o.seed;
    return t;
}

inline RootTolerances root_tolerances(const Options& o)
{
    RootTolerances t;
    t.seed = o.seed;
    t.spectral = spectral_tolerances(o);
    return t;
}

inline Subspace cartan_subspace(const Options& o, const ResolvedAlgebra& r)
{
    if (!o.cartan.empty()) return parse_subspace(*r.algebra, o.cartan);
    if (r.cartan.empty()) throw InputError("no Cartan subalgebra: pass --cartan");
    std::string joined;
    for (const auto& c : r.cartan) joined += (joined.empty() ? "" : ",") + c;
    return parse_subspace(*r.algebra, joined);
}

inline Json cartan_json(const LieAlgebra& g, const CartanCandidate& c)
{
    return {{"basis", subspace_json(g, c.t)},
            {"abelian", c.abelian},
            {"self_centralizing", c.self_centralizing},
            {"compactly_embedded", c.compactly_embedded},
            {"accepted", c.accepted}};
}

inline Json roots_json(const RootDatum& d)
{
    Json a = Json::array();
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        const Root& r = d.roots[i];
        a.push_back({{"index", i},
                     {"rho", qvector_json(r.rho)},
                     {"type", to_string(r.type)},
                     {"dim", r.dim()},
                     {"negative", d.negative[i]}});
    }
    return a;
}

inline Json index_json(const std::vector<std::size_t>& v)
{
    Json a = Json::array();
    for (auto i : v) a.push_back(i);
    return a;
}

inline Json system_json(const RootDatum& d, const PositiveSystem& s)
{
    Json j = {{"regular", qvector_json(s.regular)},
              {"positive", index_json(s.positive)},
              {"compact", index_json(s.compact)},
              {"noncompact", index_json(s.noncompact)},
              {"adapted", s.adapted},
              {"adapted_at_regular", s.adapted_at_regular}};
    j["adapted_witness"] = s.adapted_witness ? qvector_json(*s.adapted_witness) : Json(nullptr);
    j["admissible"] = is_admissible_system(d, s);
    return j;
}

inline Json cone_json(const PolyhedralCone& c)
{
    const PolyhedralCone full = with_inequalities(with_generators(c));
    Json gens = Json::array(), ineq = Json::array(), lines = Json::array();
    for (const auto& g : full.generators) gens.push_back(qvector_json(g));
    for (const auto& f : full.inequalities) ineq.push_back(qvector_json(f));
    for (const auto& l : lineality_space(full)) lines.push_back(qvector_json(l));
    return {{"generators", gens}, {"inequalities", ineq}, {"lineality", lines}, {"pointed", is_pointed(full)}};
}

inline Json decision_json(const LieAlgebra& g, const GibbsDecision& dec)
{
    Json j = {{"element", format_element(g, dec.element)},
              {"verdict", dec.verdict},
              {"inconclusive", dec.inconclusive},
              {"stage", dec.stage},
              {"reason", dec.reason},
              {"centralizer", subspace_json(g, dec.comp.subalgebra)},
              {"centralizer_compactly_embedded", dec.comp.verdict},
              {"quotients_tried", dec.quotients_tried},
              {"quotient_search_exhausted", dec.quotient_search_exhausted}};
    j["cartan"] = dec.cartan ? subspace_json(g, *dec.cartan) : Json(nullptr);
    j["quotient_ideal"] = dec.quotient_ideal ? subspace_json(g, *dec.quotient_ideal) : Json(nullptr);
    if (dec.system && dec.quotient_roots) {
        const RootDatum& d = *dec.quotient_roots;
        j["witness"] = {{"roots", roots_json(d)},
                        {"system", system_json(d, *dec.system)},
                        {"c_min", cone_json(c_min(d, *dec.system))},
                        {"c_max", cone_json(c_max(d, *dec.system))}};
    } else {
        j["witness"] = nullptr;
    }
    return j;
}

inline int error_exit_code(const std::exception& e)
{
    if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
        dynamic_cast<const DomainError*>(&e) || dynamic_cast<const NotRegular*>(&e) ||
        dynamic_cast<const NeedsConjugation*>(&e) || dynamic_cast<const NotAnIdeal*>(&e))
        return kInputError;
    return kInternal;
}

inline std::string error_kind(const std::exception& e)
{
    if (dynamic_cast<const ParseError*>(&e)) return "parse_error";
    if (dynamic_cast<const JacobiViolation*>(&e)) return "jacobi_violation";
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    if (dynamic_cast<const NeedsConjugation*>(&e)) return "needs_conjugation";
    if (dynamic_cast<const NotRegular*>(&e)) return "not_regular";
    if (dynamic_cast<const DimensionMismatch*>(&e)) return "dimension_mismatch";
    if (dynamic_cast<const InputError*>(&e)) return "input_error";
    if (dynamic_cast<const SpectralError*>(&e)) return "spectral_error";
    if (dynamic_cast<const DecompositionError*>(&e)) return "decomposition_error";
    if (dynamic_cast<const BoundExceeded*>(&e)) return "bound_exceeded";
    return "internal_error";
}

/// Mutable state a command body fills in; `stage` labels errors.
struct Context {
    Json inputs = Json::object();
    Json results = Json::object();
    Json tolerances = Json::object();
    std::string stage = "input";
};

inline Result run(const std::string& command, const Options& o, const std::function<int(Context&)>& body)
{
    const auto start = std::chrono::steady_clock::now();
    Context ctx;
    int code = kPass;
    try {
        code = body(ctx);
    } catch (const std::exception& e) {
        code = error_exit_code(e);
        ctx.results["error"] = {{"kind", error_kind(e)}, {"message", e.what()}, {"stage", ctx.stage}};
    }
    Result r;
    r.exit_code = code;
    r.report = {{"schema", kSchema},         {"schema_version", kSchemaVersion}, {"version", kVersion},
                {"command", command},        {"inputs", ctx.inputs},             {"results", ctx.results},
                {"tolerances", ctx.tolerances}, {"seed", o.seed},                {"exit_code", code}};
    if (o.timing)
        r.report["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// algebra validate

inline Result algebra_validate(const Options& o)
{
    return detail::run("algebra validate", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}};
        std::optional<LieAlgebra> g;
        std::string source;
        if (auto path = detail::locate(o.algebra)) {
            ctx.stage = "parse";
            source = path->string();
            g = parse_algebra(read_file(*path), path->extension() == ".json", source);
        } else {
            for (const auto& b : library::bundled())
                if (b.name == o.algebra) {
                    g = b.algebra;
                    source = "bundled:" + b.name;
                }
            if (!g) throw InputError("unknown algebra '" + o.algebra + "'");
        }
        ctx.stage = "jacobi";
        const JacobiReport rep = g->verify_jacobi();
        Json violations = Json::array();
        for (const auto& v : rep.violations)
            violations.push_back(Json::array({g->basis_names()[v[0]], g->basis_names()[v[1]], g->basis_names()[v[2]]}));
        ctx.results = {{"source", source},
                       {"dim", g->dim()},
                       {"basis", g->basis_names()},
                       {"antisymmetric", true},
                       {"jacobi", rep.ok},
                       {"violations", violations}};
        ctx.results["first_violation"] = rep.first_violation ? violations.front() : Json(nullptr);
        ctx.tolerances = {{"jacobi", "exact"}};
        return rep.ok ? kPass : kNegative;
    });
}

// ---------------------------------------------------------------------------
// spectral

inline Result spectral(const Options& o)
{
    return detail::run("spectral " + o.spectral_mode, o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"element", o.element}, {"mode", o.spectral_mode}};
        const SpectralTolerances tol = detail::spectral_tolerances(o);
        ctx.tolerances = detail::spectral_tolerances_json(tol);
        ctx.stage = "load";
        const ResolvedAlgebra ra = resolve_algebra(o.algebra);
        const LieAlgebra& g = *ra.algebra;
        ctx.stage = "parse_element";
        if (o.element.empty()) throw InputError("--element is required");
        if (o.spectral_mode == "elliptic") {
            const Element x = parse_element(g, o.element);
            ctx.stage = "is_elliptic";
            const EllipticityReport rep = is_elliptic(g, x, tol);
            Json ev = Json::array();
            for (auto z : rep.eigenvalues) ev.push_back(detail::complex_json(z));
            ctx.results = {{"element", format_element(g, x)},
                           {"eigenvalues", ev},
                           {"spectral_radius", rep.spectral_radius},
                           {"max_real_part", rep.max_real_part},
                           {"eps_used", rep.eps_used},
                           {"diagonalizable", rep.diagonalizable},
                           {"kernel_independence", rep.kernel_independence},
                           {"verdict", rep.verdict}};
            return rep.verdict ? kPass : kNegative;
        }
        if (o.spectral_mode == "compact-embed") {
            const Subspace a = parse_subspace(g, o.element);
            ctx.stage = "is_compactly_embedded";
            const CompactEmbeddingReport rep = is_compactly_embedded(g, a, tol);
            ctx.results = {{"subalgebra", detail::subspace_json(g, rep.subalgebra)},
                           {"verdict", rep.verdict},
                           {"inconclusive", rep.inconclusive},
                           {"method", rep.method},
                           {"min_eigenvalue", rep.min_eigenvalue},
                           {"residual", rep.residual},
                           {"nullspace_dim", rep.nullspace_dim}};
            ctx.results["isotropic_certificate"] =
                rep.isotropic_certificate ? detail::qvector_json(*rep.isotropic_certificate) : Json(nullptr);
            if (rep.invariant_metric) {
                Json m = Json::array();
                for (std::size_t i = 0; i < rep.invariant_metric->rows(); ++i)
                    m.push_back(detail::qvector_json(rep.invariant_metric->row(i)));
                ctx.results["invariant_metric"] = m;
            }
            return rep.verdict ? kPass : (rep.inconclusive ? kInternal : kNegative);
        }
        if (o.spectral_mode == "ellipticity-ideal") {
            const Element y = parse_element(g, o.element);
            ctx.stage = "ellipticity_ideal";
            const EllipticityIdealReport rep = ellipticity_ideal(g, y, tol);
            ctx.results = {{"element", format_element(g, y)},
                           {"ideal", detail::subspace_json(g, rep.ideal)},
                           {"ideal_dim", rep.ideal.dim()},
                           {"iterations", rep.iterations},
                           {"obstruction_dims", rep.obstruction_dims},
                           {"elliptic", rep.ideal.dim() == 0}};
            return kPass;
        }
        throw InputError("unknown spectral mode '" + o.spectral_mode + "'");
    });
}

// ---------------------------------------------------------------------------
// roots, cones

namespace detail {

struct Datum {
    ResolvedAlgebra algebra;
    CartanCandidate cartan;
    std::optional<RootDatum> roots;
};

inline Datum load_datum(const Options& o, Context& ctx)
{
    const RootTolerances tol = root_tolerances(o);
    ctx.tolerances = {{"spectral", spectral_tolerances_json(tol.spectral)}, {"roots", root_tolerances_json(tol)}};
    ctx.stage = "load";
    Datum d{resolve_algebra(o.algebra), {}, std::nullopt};
    ctx.stage = "verify_cartan";
    const Subspace t = cartan_subspace(o, d.algebra);
    d.cartan = verify_cartan(*d.algebra.algebra, t, tol);
    ctx.results["cartan"] = cartan_json(*d.algebra.algebra, d.cartan);
    if (!d.cartan.accepted) return d;
    ctx.stage = "root_decomposition";
    d.roots = root_decomposition(d.algebra.algebra, d.cartan, tol);
    ctx.results["roots"] = roots_json(*d.roots);
    return d;
}

}  // namespace detail

inline Result roots(const Options& o)
{
    return detail::run("roots", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"cartan", o.cartan}};
        const detail::Datum d = detail::load_datum(o, ctx);
        if (!d.roots) return kNegative;
        ctx.stage = "enumerate_positive_systems";
        Json systems = Json::array();
        for (const auto& s : enumerate_positive_systems(*d.roots, detail::root_tolerances(o).max_roots))
            systems.push_back(detail::system_json(*d.roots, s));
        ctx.results["positive_systems"] = systems;
        return kPass;
    });
}

inline Result cones(const Options& o)
{
    return detail::run("cones", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"cartan", o.cartan}};
        const detail::Datum d = detail::load_datum(o, ctx);
        if (!d.roots) return kNegative;
        ctx.stage = "cones";
        Json systems = Json::array();
        std::size_t admissible = 0;
        for (const auto& s : enumerate_positive_systems(*d.roots, detail::root_tolerances(o).max_roots)) {
            Json j = detail::system_json(*d.roots, s);
            const PolyhedralCone lo = c_min(*d.roots, s), hi = c_max(*d.roots, s);
            j["c_min"] = detail::cone_json(lo);
            j["c_max"] = detail::cone_json(hi);
            j["c_min_in_c_max"] = contains(hi, lo);
            admissible += j["admissible"].get<bool>() ? 1 : 0;
            systems.push_back(j);
        }
        ctx.results["positive_systems"] = systems;
        ctx.results["admissible_count"] = admissible;
        return admissible > 0 ? kPass : kNegative;
    });
}

// ---------------------------------------------------------------------------
// gibbs-element, pipeline

namespace detail {

inline std::vector<Subspace> cartan_hints(const Options& o, const ResolvedAlgebra& r)
{
    if (o.cartan.empty() && r.cartan.empty()) return {};
    return {cartan_subspace(o, r)};
}

inline int decision_exit(const GibbsDecision& dec)
{
    if (dec.verdict) return kPass;
    return dec.inconclusive ? kInternal : kNegative;
}

}  // namespace detail

inline Result gibbs_element(const Options& o)
{
    return detail::run("gibbs-element", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"cartan", o.cartan}, {"element", o.element}};
        const RootTolerances tol = detail::root_tolerances(o);
        ctx.tolerances = {{"spectral", detail::spectral_tolerances_json(tol.spectral)},
                          {"roots", detail::root_tolerances_json(tol)}};
        ctx.stage = "load";
        const ResolvedAlgebra ra = resolve_algebra(o.algebra);
        ctx.stage = "parse_element";
        if (o.element.empty()) throw InputError("--element is required");
        const Element x = parse_element(*ra.algebra, o.element);
        const auto hints = detail::cartan_hints(o, ra);
        ctx.stage = "is_gibbs_element";
        const GibbsDecision dec = is_gibbs_element(*ra.algebra, x, hints, tol);
        ctx.results = detail::decision_json(*ra.algebra, dec);
        return detail::decision_exit(dec);
    });
}

/// verify_cartan -> root_decomposition -> positive systems -> admissibility ->
/// is_gibbs_element, each stage recorded in results.stages.
inline Result pipeline(const Options& o)
{
    return detail::run("pipeline", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"cartan", o.cartan}, {"element", o.element}};
        const RootTolerances tol = detail::root_tolerances(o);
        ctx.tolerances = {{"spectral", detail::spectral_tolerances_json(tol.spectral)},
                          {"roots", detail::root_tolerances_json(tol)}};
        ctx.stage = "load";
        const ResolvedAlgebra ra = resolve_algebra(o.algebra);
        const LieAlgebra& g = *ra.algebra;
        ctx.stage = "parse_element";
        if (o.element.empty()) throw InputError("--element is required");
        const Element x = parse_element(g, o.element);
        const auto hints = detail::cartan_hints(o, ra);
        Json stages = Json::array();
        stages.push_back({{"stage", "load"}, {"source", ra.source}, {"dim", g.dim()}, {"basis", g.basis_names()}});
        if (hints.empty()) {
            stages.push_back({{"stage", "verify_cartan"}, {"skipped", "no Cartan subalgebra supplied"}});
        } else {
            ctx.stage = "verify_cartan";
            const CartanCandidate c = verify_cartan(g, hints.front(), tol);
            Json cj = detail::cartan_json(g, c);
            cj["stage"] = "verify_cartan";
            stages.push_back(cj);
            if (c.accepted) {
                ctx.stage = "root_decomposition";
                const RootDatum d = root_decomposition(ra.algebra, c, tol);
                stages.push_back({{"stage", "root_decomposition"}, {"roots", detail::roots_json(d)}});
                ctx.stage = "enumerate_positive_systems";
                const auto systems = enumerate_positive_systems(d, tol.max_roots);
                Json sj = Json::array();
                std::size_t admissible = 0;
                for (const auto& s : systems) {
                    sj.push_back(detail::system_json(d, s));
                    admissible += sj.back()["admissible"].get<bool>() ? 1 : 0;
                }
                stages.push_back({{"stage", "positive_systems"}, {"count", systems.size()}, {"systems", sj}});
                stages.push_back({{"stage", "admissibility"}, {"admissible_count", admissible}});
            }
        }
        ctx.stage = "is_gibbs_element";
        const GibbsDecision dec = is_gibbs_element(g, x, hints, tol);
        Json dj = detail::decision_json(g, dec);
        stages.push_back({{"stage", "is_gibbs_element"}, {"verdict", dec.verdict}, {"failing_stage", dec.verdict ? "" : dec.stage}});
        ctx.results = {{"stages", stages}, {"verdict", dec.verdict}, {"decision", dj}};
        if (!dec.verdict) ctx.results["failing_stage"] = dec.stage;
        return detail::decision_exit(dec);
    });
}

// ---------------------------------------------------------------------------
// trace

inline Result trace(const Options& o)
{
    return detail::run("trace", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"algebra", o.algebra}, {"cartan", o.cartan}, {"element", o.element},
                      {"module", o.module},   {"weight", o.weight}, {"two_j", o.two_j}, {"depth", o.depth}};
        const detail::Datum d = detail::load_datum(o, ctx);
        TraceTolerances ttol;
        ttol.eps_trace = o.tol_trace;
        ttol.depth = o.depth;
        ctx.tolerances["trace"] = {{"eps_trace", ttol.eps_trace}, {"depth", ttol.depth}};
        if (!d.roots) throw InputError("the Cartan candidate is not a compactly embedded Cartan subalgebra");
        const RootDatum& rd = *d.roots;
        ctx.stage = "parse_element";
        if (o.element.empty()) throw InputError("--element is required");
        const QVector x = rd.t_coords(parse_element(*d.algebra.algebra, o.element));

        ctx.stage = "positive_system";
        std::optional<PositiveSystem> sys;
        try {
            sys = positive_system(rd, x);
        } catch (const NotRegular&) {
            const auto all = enumerate_positive_systems(rd, detail::root_tolerances(o).max_roots);
            if (all.empty()) throw InputError("no positive system");
            sys = all.front();
        }
        ctx.stage = "module";
        QVector lambda = zero_vector(rd.t().dim());
        if (!o.weight.empty()) {
            lambda.clear();
            for (const auto& part : gibbslie::detail::split(o.weight, ',')) lambda.push_back(parse_rational(part));
        }
        std::string kind = o.module;
        if (kind.empty()) {
            bool has_n = false;
            for (auto i : sys->positive) has_n |= rd.roots[i].type == RootType::N;
            kind = (sys->compact.size() == 1 && sys->noncompact.empty()) ? "su2_irrep" : has_n ? "oscillator" : "verma";
        }
        WeightModule m;
        if (kind == "verma")
            m = verma_module(rd, *sys, lambda);
        else if (kind == "sl2")
            m = sl2_highest_weight_module(rd, *sys, lambda);
        else if (kind == "oscillator")
            m = oscillator_module(rd, *sys, lambda);
        else if (kind == "su2_irrep")
            m = su2_irrep_module(rd, *sys, o.two_j);
        else
            throw InputError("unknown module '" + kind + "'");
        m.truncation_depth = o.depth;

        ctx.stage = "trace";
        const TraceResult tr = module_trace(m, x, ttol);
        const bool trace_class = trace_class_test(m, x, ttol);
        const bool interior = interior_member(x, c_max(rd, m.system));
        ctx.results["module"] = {{"family", to_string(m.family)},
                                 {"highest_weight", detail::qvector_json(m.highest_weight)},
                                 {"multiplicity_source", m.multiplicity_source},
                                 {"system", detail::system_json(rd, m.system)}};
        ctx.results["x"] = detail::qvector_json(x);
        ctx.results["value"] = tr.value ? detail::complex_json(*tr.value) : Json(nullptr);
        ctx.results["closed_form"] = tr.closed_form ? detail::complex_json(*tr.closed_form) : Json(nullptr);
        ctx.results["divergent"] = tr.divergent;
        ctx.results["converged"] = tr.converged;
        ctx.results["ratio"] = tr.ratio;
        ctx.results["tail_bound"] = tr.tail_bound;
        ctx.results["reason"] = tr.reason;
        ctx.results["trace_class"] = trace_class;
        ctx.results["interior_c_max"] = interior;
        return trace_class ? kPass : kNegative;
    });
}

// ---------------------------------------------------------------------------
// kms

namespace detail {

/// "p:0.5,q:0.3" -> exp(0.5 p) exp(0.3 q); a letter without ":t" has t = 1.
inline GroupWord parse_word(const LieAlgebra& g, const std::string& text)
{
    GroupWord w;
    for (const auto& part : gibbslie::detail::split(text, ',')) {
        if (part.empty()) continue;
        const auto colon = part.find(':');
        const std::string expr = part.substr(0, colon);
        double t = 1;
        if (colon != std::string::npos) {
            try {
                std::size_t used = 0;
                t = std::stod(part.substr(colon + 1), &used);
                if (used != part.size() - colon - 1) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw InputError("bad letter time in '" + part + "'");
            }
        }
        const Element e = parse_expression(g, expr);
        Letter l;
        for (const auto& c : e.coords) l.y.push_back(c.get_d());
        l.time = t;
        w.push_back(l);
    }
    if (w.empty()) throw InputError("empty word '" + text + "'");
    return w;
}

inline std::pair<std::string, std::string> default_words(RepFamily f)
{
    switch (f) {
    case RepFamily::Su2Irrep: return {"e1:0.7,e3:-0.4", "e2:0.5,e1:0.3"};
    case RepFamily::Sl2Lowest: return {"k1:0.5,k0:0.3", "k2:0.4,k1:-0.3"};
    case RepFamily::Oscillator:
    case RepFamily::Heisenberg: return {"p:0.5,q:0.3", "q:0.6,n:0.4"};
    }
    return {};
}

/// A second Gibbs state under the same algebra, dynamics and beta.
inline RepParams mixture_partner(RepFamily f, const RepParams& p, std::size_t& n)
{
    RepParams q = p;
    switch (f) {
    case RepFamily::Su2Irrep: q.two_j = p.two_j < 50 ? p.two_j + 1 : p.two_j - 1; break;
    case RepFamily::Sl2Lowest: q.lambda = p.lambda + 0.5; break;
    case RepFamily::Heisenberg: q.lambda = 2 * p.lambda; break;
    case RepFamily::Oscillator: n = std::max<std::size_t>(2, n / 2); break;
    }
    return q;
}

}  // namespace detail

inline Result kms(const Options& o)
{
    return detail::run("kms", o, [&](detail::Context& ctx) -> int {
        ctx.inputs = {{"family", o.family}, {"lambda", o.lambda}, {"beta", o.beta}, {"N", o.N},
                      {"two_j", o.two_j},   {"word", o.word},     {"word2", o.word2}, {"perturb", o.perturb},
                      {"grid_points", o.grid_points}, {"gram_words", o.gram_words}};
        ctx.tolerances = {{"reflection", o.kms.reflection},
                          {"real_line", o.kms.real_line},
                          {"invariance", o.kms.invariance},
                          {"min_gram_eigenvalue", o.kms.gram}};
        const RepFamily family = parse_rep_family(o.family);
        const RepParams params{o.lambda, o.two_j};
        ctx.stage = "build_truncated_rep";
        const auto rep = std::make_shared<const TruncatedRep>(build_truncated_rep(family, params, family == RepFamily::Su2Irrep ? 0 : o.N));
        ctx.results["representation"] = {{"family", to_string(family)},
                                          {"N", rep->N},
                                          {"commutator_residual", rep->residual},
                                          {"leakage", rep->leakage}};
        ctx.stage = "gibbs_state";
        GibbsStateVal state;
        try {
            state = gibbs_state(rep, o.beta);
        } catch (const DomainError& e) {
            ctx.results["refused"] = true;
            ctx.results["reason"] = e.what();
            return kInputError;
        }
        if (o.perturb) state = perturbed_state(state, o.perturb_amplitude, o.seed);
        ctx.results["log_Z"] = state.log_Z;
        ctx.results["perturbed"] = o.perturb;

        ctx.stage = "words";
        const LieAlgebra& g = *rep->algebra;
        const auto [dx, dy] = detail::default_words(family);
        const GroupWord x = detail::parse_word(g, o.word.empty() ? dx : o.word);
        const GroupWord y = detail::parse_word(g, o.word2.empty() ? dy : o.word2);
        const auto words = random_words(g, o.gram_words, 2, 1.0, o.seed);
        const auto grid = default_t_grid(-5, 5, o.grid_points);

        const auto suite = [&](const KmsState& st) {
            Json j;
            j["phi_x"] = detail::complex_json(st.evaluate(x));
            j["phi_y"] = detail::complex_json(st.evaluate(y));
            j["reflection_residual"] = kms_reflection_check(st, x, y, grid);
            j["real_line_residual"] = real_line_check(st, x, y, grid);
            j["invariance_residual"] = std::max(invariance_check(st, x, grid), invariance_check(st, y, grid));
            j["min_gram_eigenvalue"] = positive_definiteness_check(st, words);
            j["pass"] = j["reflection_residual"].get<double>() <= o.kms.reflection &&
                        j["real_line_residual"].get<double>() <= o.kms.real_line &&
                        j["invariance_residual"].get<double>() <= o.kms.invariance &&
                        j["min_gram_eigenvalue"].get<double>() >= o.kms.gram;
            return j;
        };
        ctx.stage = "kms_checks";
        Json single = suite(as_state(state));

        ctx.stage = "mixture";
        std::size_t n2 = rep->N;
        const RepParams p2 = detail::mixture_partner(family, params, n2);
        const auto rep2 = std::make_shared<const TruncatedRep>(build_truncated_rep(family, p2, family == RepFamily::Su2Irrep ? 0 : n2));
        Json mix = suite(mixture({state, gibbs_state(rep2, o.beta)}, {0.5, 0.5}));
        mix["partner"] = {{"lambda", p2.lambda}, {"two_j", p2.two_j}, {"N", rep2->N}};
        mix["weights"] = {0.5, 0.5};

        ctx.results["state"] = single;
        ctx.results["mixture"] = mix;
        const bool pass = single["pass"].get<bool>() && mix["pass"].get<bool>();
        ctx.results["all_pass"] = pass;
        return pass ? kPass : kNegative;
    });
}

}  // namespace gibbslie::cli
