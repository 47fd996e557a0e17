#pragma once

// Weight-module characters: Kostant partitions, Verma-type weight traces,
// finite su(2) characters, the oscillator trace, and trace-class decisions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gibbslie/cones.hpp"
#include "gibbslie/roots.hpp"

namespace gibbslie {

using IntVec = std::vector<long>;

struct KostantBounds {
    std::size_t max_roots = 12;
    long max_depth = 30;
};

namespace detail {

inline long height(const IntVec& v)
{
    long h = 0;
    for (long c : v) h += c;
    return h;
}

inline void check_positive_roots(const std::vector<IntVec>& positive, std::size_t rank)
{
    for (const auto& a : positive) {
        if (a.size() != rank) throw DimensionMismatch("positive roots have different lengths");
        bool nonzero = false;
        for (long c : a) {
            if (c < 0) throw InputError("positive root with a negative simple coordinate");
            nonzero |= c != 0;
        }
        if (!nonzero) throw InputError("zero vector among positive roots");
    }
}

}  // namespace detail

/// Number of ways to write target as a nonnegative integer combination of the
/// positive roots (given in simple-root coordinates, repeated per multiplicity),
/// by exhaustive enumeration.
inline mpz_class kostant_partition(const std::vector<IntVec>& positive, const IntVec& target,
                                   const KostantBounds& bounds = {})
{
    if (positive.size() > bounds.max_roots) throw BoundExceeded("kostant_partition: too many positive roots");
    detail::check_positive_roots(positive, target.size());
    for (long c : target)
        if (c < 0) return 0;
    if (detail::height(target) > bounds.max_depth) throw BoundExceeded("kostant_partition: depth above bound");
    mpz_class count = 0;
    IntVec rest = target;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == positive.size()) {
            if (detail::height(rest) == 0) ++count;
            return;
        }
        const IntVec& a = positive[i];
        long taken = 0;
        while (true) {
            rec(i + 1);
            bool fits = true;
            for (std::size_t k = 0; k < a.size(); ++k)
                if (rest[k] < a[k]) fits = false;
            if (!fits) break;
            for (std::size_t k = 0; k < a.size(); ++k) rest[k] -= a[k];
            ++taken;
        }
        for (std::size_t k = 0; k < a.size(); ++k) rest[k] += taken * a[k];
    };
    rec(0);
    return count;
}

/// Coefficients of prod_a (1 - q^a)^{-1} for all exponents of height <= depth.
inline std::map<IntVec, mpz_class> product_formula_coefficients(const std::vector<IntVec>& positive, std::size_t rank,
                                                               long depth)
{
    detail::check_positive_roots(positive, rank);
    // Enumerate the nonnegative lattice points of height <= depth in increasing height.
    std::vector<IntVec> points;
    IntVec cur(rank, 0);
    std::function<void(std::size_t, long)> gen = [&](std::size_t k, long left) {
        if (k == rank) {
            points.push_back(cur);
            return;
        }
        for (long c = 0; c <= left; ++c) {
            cur[k] = c;
            gen(k + 1, left - c);
        }
        cur[k] = 0;
    };
    gen(0, depth);
    std::stable_sort(points.begin(), points.end(),
                     [](const IntVec& a, const IntVec& b) { return detail::height(a) < detail::height(b); });
    std::map<IntVec, mpz_class> coeff;
    for (const auto& p : points) coeff[p] = 0;
    coeff[IntVec(rank, 0)] = 1;
    // Multiplying by (1 - q^a)^{-1}: c[b] += c[b - a], in increasing height.
    for (const auto& a : positive)
        for (const auto& p : points) {
            IntVec prev = p;
            bool ok = true;
            for (std::size_t k = 0; k < rank; ++k) {
                prev[k] -= a[k];
                ok &= prev[k] >= 0;
            }
            if (ok) coeff[p] += coeff[prev];
        }
    return coeff;
}

/// Simple functionals and integer coordinates of a list of positive functionals.
struct LatticeCoordinates {
    std::vector<QVector> simple;
    std::vector<IntVec> coords;
};

/// Greedy by increasing value at the regular point: a functional joins the simple
/// set iff it is independent of the smaller ones. Every functional must then have
/// nonnegative integer coordinates.
inline LatticeCoordinates lattice_coordinates(const std::vector<QVector>& functionals, const QVector& regular)
{
    std::vector<std::size_t> order(functionals.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
        if (sgn(dot(functionals[i], regular)) <= 0) throw InputError("functional is not positive at the regular point");
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dot(functionals[a], regular) < dot(functionals[b], regular);
    });
    LatticeCoordinates lc;
    const std::size_t dim = regular.size();
    for (auto i : order)
        if (lc.simple.empty() || !in_span(lc.simple, functionals[i])) lc.simple.push_back(functionals[i]);
    QMatrix b(dim, lc.simple.size());
    for (std::size_t j = 0; j < lc.simple.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) b(i, j) = lc.simple[j][i];
    for (const auto& f : functionals) {
        auto c = solve(b, f);
        if (!c) throw DecompositionError("functional outside the span of the simple set");
        IntVec iv;
        for (const auto& x : *c) {
            if (x.get_den() != 1 || sgn(x) < 0)
                throw DecompositionError("functional without nonnegative integer simple coordinates");
            iv.push_back(x.get_num().get_si());
        }
        lc.coords.push_back(iv);
    }
    return lc;
}

// ---------------------------------------------------------------------------
// Traces.

struct TraceTolerances {
    double eps_trace = 1e-10;
    long depth = 200;
};

struct TraceResult {
    std::optional<std::complex<double>> value;  // nullopt iff divergent
    bool divergent = false;
    std::vector<std::complex<double>> partial_sums;
    std::optional<std::complex<double>> closed_form;
    bool converged = false;
    double ratio = 0;       // certificate: < 1 when terms decay geometrically
    double tail_bound = 0;  // bound on |closed form - last partial sum|
    std::string reason;
};

/// sum_beta P(beta) e^{s_lambda - s_beta} over weights lambda - beta, with
/// s_mu = mu(x) and beta ranging over N-combinations of the lowering functionals.
/// Heights are measured in simple coordinates relative to the regular point.
inline TraceResult verma_trace(const QVector& lambda, const std::vector<QVector>& lowering, const QVector& regular,
                               const QVector& x, const TraceTolerances& tol = {})
{
    TraceResult r;
    const double s_lambda = dot(lambda, x).get_d();
    if (lowering.empty()) {
        r.value = std::exp(s_lambda);
        r.closed_form = r.value;
        r.partial_sums = {*r.value};
        r.converged = true;
        return r;
    }
    const LatticeCoordinates lc = lattice_coordinates(lowering, regular);
    std::vector<double> s_simple;
    for (const auto& a : lc.simple) s_simple.push_back(dot(a, x).get_d());
    double min_s = INFINITY;
    for (const auto& a : lowering) {
        const Rational s = dot(a, x);
        min_s = std::min(min_s, s.get_d());
        r.divergent |= sgn(s) <= 0;
    }

    // Multiplicities by the product expansion, grouped by height.
    const long depth = r.divergent ? std::min<long>(tol.depth, 40) : tol.depth;
    const auto coeff = product_formula_coefficients(lc.coords, lc.simple.size(), depth);
    std::vector<double> layer(depth + 1, 0.0);
    for (const auto& [beta, p] : coeff) {
        if (p == 0) continue;
        double s_beta = 0;
        for (std::size_t k = 0; k < beta.size(); ++k) s_beta += static_cast<double>(beta[k]) * s_simple[k];
        layer[detail::height(beta)] += p.get_d() * std::exp(s_lambda - s_beta);
    }
    double acc = 0;
    for (long h = 0; h <= depth; ++h) {
        acc += layer[h];
        if (!std::isfinite(acc)) break;
        r.partial_sums.emplace_back(acc);
    }
    if (r.divergent) {
        r.reason = "a lowering functional is not positive at x: terms do not decay";
        r.ratio = std::exp(-min_s);
        return r;
    }
    double prod = 1;
    for (const auto& a : lowering) prod /= 1 - std::exp(-dot(a, x).get_d());
    r.closed_form = std::exp(s_lambda) * prod;

    // Dominating one-variable series: e^{-s_a} <= rho^{ht a}.
    std::vector<long> heights;
    double rho = 0;
    for (const auto& c : lc.coords) heights.push_back(detail::height(c));
    for (std::size_t i = 0; i < lowering.size(); ++i)
        rho = std::max(rho, std::exp(-dot(lowering[i], x).get_d() / static_cast<double>(heights[i])));
    r.ratio = rho;
    std::vector<double> c1(depth + 1, 0.0);
    c1[0] = 1;
    double g = 1;
    for (long hgt : heights) {
        for (long h = hgt; h <= depth; ++h) c1[h] += c1[h - hgt];
        g /= 1 - std::pow(rho, static_cast<double>(hgt));
    }
    double head = 0;
    for (long h = 0; h <= depth; ++h) head += c1[h] * std::pow(rho, static_cast<double>(h));
    r.tail_bound = std::exp(s_lambda) * std::max(0.0, g - head);
    const std::size_t n = r.partial_sums.size();
    const double last_step = n >= 2 ? std::abs(r.partial_sums[n - 1] - r.partial_sums[n - 2]) : 0.0;
    r.converged = rho < 1 && r.tail_bound <= tol.eps_trace && last_step <= tol.eps_trace;
    r.value = r.partial_sums.back();
    if (!r.converged) r.reason = "tail bound above eps_trace at this depth";
    return r;
}

/// sum_{m=-j..j} e^{i m theta} for spin j = two_j / 2.
inline TraceResult su2_character_trace(int two_j, double theta)
{
    if (two_j < 0 || two_j > 50) throw DomainError("su2_character_trace: j must lie in {0, 1/2, ..., 25}");
    TraceResult r;
    std::complex<double> acc = 0;
    for (int k = 0; k <= two_j; ++k) {
        const double m = (two_j - 2 * k) / 2.0;
        acc += std::exp(std::complex<double>(0, m * theta));
        r.partial_sums.push_back(acc);
    }
    const double dimension = two_j + 1;
    const double half = theta / 2;
    const double turns = std::round(theta / (2 * M_PI));
    if (std::abs(theta - 2 * M_PI * turns) < 1e-12) {
        // theta = 2 pi k: every e^{i m theta} equals (-1)^{2jk}.
        const long k = static_cast<long>(turns);
        r.closed_form = ((static_cast<long>(two_j) * k) % 2 == 0 ? 1.0 : -1.0) * dimension;
    } else {
        r.closed_form = std::sin(dimension * half) / std::sin(half);
    }
    r.value = acc;
    r.converged = true;
    return r;
}

/// sum_{n >= 0} e^{-beta lambda (n + 1/2)}, truncated to n < terms.
inline TraceResult oscillator_trace(double lambda, double beta, long terms = 200, double eps_trace = 1e-10)
{
    TraceResult r;
    const double bl = beta * lambda;
    if (!(bl > 0)) {
        r.divergent = true;
        r.reason = "beta * lambda <= 0: the number-operator series does not decay";
        r.ratio = std::isfinite(bl) ? std::exp(-bl) : INFINITY;
        return r;
    }
    double acc = 0;
    for (long n = 0; n < terms; ++n) {
        acc += std::exp(-bl * (static_cast<double>(n) + 0.5));
        r.partial_sums.emplace_back(acc);
    }
    r.closed_form = std::exp(-bl / 2) / (1 - std::exp(-bl));
    r.ratio = std::exp(-bl);
    r.tail_bound = std::exp(-bl * (static_cast<double>(terms) + 0.5)) / (1 - std::exp(-bl));
    r.value = acc;
    r.converged = r.tail_bound <= eps_trace;
    if (!r.converged) r.reason = "tail bound above eps_trace at this truncation";
    return r;
}

// ---------------------------------------------------------------------------
// Weight modules.

enum class ModuleFamily { Sl2HighestWeight, Su2Irrep, Oscillator, VermaGeneric };

inline const char* to_string(ModuleFamily f)
{
    switch (f) {
    case ModuleFamily::Sl2HighestWeight: return "sl2_highest_weight";
    case ModuleFamily::Su2Irrep: return "su2_irrep";
    case ModuleFamily::Oscillator: return "oscillator";
    case ModuleFamily::VermaGeneric: return "verma_generic";
    }
    return "?";
}

struct WeightModule {
    ModuleFamily family = ModuleFamily::VermaGeneric;
    QVector highest_weight;           // functional on t-coordinates
    PositiveSystem system;
    std::vector<QVector> lowering;    // one entry per root-space dimension
    std::vector<std::pair<QVector, long>> finite_weights;  // nonempty iff finite-dimensional
    std::string multiplicity_source;  // kostant | finite_table
    long truncation_depth = 200;

    bool finite() const { return !finite_weights.empty(); }
};

namespace detail {

inline std::vector<QVector> lowering_functionals(const RootDatum& d, const std::vector<std::size_t>& roots)
{
    std::vector<QVector> out;
    for (auto i : roots)
        for (std::size_t k = 0; k < d.roots[i].dim(); ++k) out.push_back(d.roots[i].rho);
    return out;
}

}  // namespace detail

/// Verma module M(lambda) for the positive system: lowering by every positive root.
inline WeightModule verma_module(const RootDatum& d, const PositiveSystem& s, QVector lambda)
{
    if (lambda.size() != d.t().dim()) throw DimensionMismatch("highest weight has the wrong length");
    WeightModule m;
    m.family = ModuleFamily::VermaGeneric;
    m.highest_weight = std::move(lambda);
    m.system = s;
    m.lowering = detail::lowering_functionals(d, s.positive);
    m.multiplicity_source = "kostant";
    return m;
}

/// sl(2) highest weight module with generic weight: equal to the Verma module.
inline WeightModule sl2_highest_weight_module(const RootDatum& d, const PositiveSystem& s, QVector lambda)
{
    if (d.t().dim() != 1 || d.roots.size() != 2) throw InputError("sl2_highest_weight needs a rank-one datum with two roots");
    WeightModule m = verma_module(d, s, std::move(lambda));
    m.family = ModuleFamily::Sl2HighestWeight;
    return m;
}

/// Fock-space module: lowering only along the nilpotent (type N) positive roots.
inline WeightModule oscillator_module(const RootDatum& d, const PositiveSystem& s, QVector lambda)
{
    if (lambda.size() != d.t().dim()) throw DimensionMismatch("highest weight has the wrong length");
    std::vector<std::size_t> nil;
    for (auto i : s.positive)
        if (d.roots[i].type == RootType::N) nil.push_back(i);
    if (nil.empty()) throw InputError("oscillator module needs a positive root of type N");
    WeightModule m;
    m.family = ModuleFamily::Oscillator;
    m.highest_weight = std::move(lambda);
    m.system = s;
    m.lowering = detail::lowering_functionals(d, nil);
    m.multiplicity_source = "kostant";
    return m;
}

/// Spin j = two_j / 2 for a datum with a single compact positive root a:
/// weights j a - k a, k = 0..2j, multiplicity one.
inline WeightModule su2_irrep_module(const RootDatum& d, const PositiveSystem& s, int two_j)
{
    if (s.compact.size() != 1 || !s.noncompact.empty()) throw InputError("su2_irrep needs exactly one compact positive root");
    if (two_j < 0 || two_j > 50) throw DomainError("su2_irrep: j must lie in {0, 1/2, ..., 25}");
    const QVector& a = d.roots[s.compact[0]].rho;
    WeightModule m;
    m.family = ModuleFamily::Su2Irrep;
    m.system = s;
    m.highest_weight = Rational(two_j, 2) * a;
    for (int k = 0; k <= two_j; ++k) m.finite_weights.push_back({Rational(two_j - 2 * k, 2) * a, 1});
    m.multiplicity_source = "finite_table";
    return m;
}

inline TraceResult module_trace(const WeightModule& m, const QVector& x, const TraceTolerances& tol = {})
{
    if (x.size() != m.highest_weight.size()) throw DomainError("x is not given in t-coordinates of the module");
    if (m.finite()) {
        TraceResult r;
        double acc = 0;
        for (const auto& [w, mult] : m.finite_weights) {
            acc += static_cast<double>(mult) * std::exp(dot(w, x).get_d());
            r.partial_sums.emplace_back(acc);
        }
        r.value = acc;
        r.closed_form = acc;
        r.converged = true;
        return r;
    }
    TraceTolerances t = tol;
    t.depth = m.truncation_depth;
    return verma_trace(m.highest_weight, m.lowering, m.system.regular, x, t);
}

/// Convergence certificate for tr(e^{i dpi(x)}), x in t: finite modules always
/// pass; otherwise the dominating geometric ratio must be < 1. Independent of
/// the truncation depth, which only affects TraceResult::converged.
inline bool trace_class_test(const WeightModule& m, const QVector& x, const TraceTolerances& tol = {})
{
    if (m.finite()) return true;
    const TraceResult r = module_trace(m, x, tol);
    return !r.divergent && r.ratio < 1;
}

/// Agreement of trace_class_test with interior_member(x, c_max) over a grid.
/// A disagreement where only a compact positive root fails to be positive at x
/// is the known caveat of the Verma character and is listed separately.
struct TheoremComparison {
    std::size_t points = 0;
    std::size_t agreements = 0;
    std::vector<QVector> compact_root_caveat;
    std::vector<QVector> discrepancies;
};

inline TheoremComparison compare_trace_with_c_max(const RootDatum& d, const WeightModule& m,
                                                  const std::vector<QVector>& grid, const TraceTolerances& tol = {})
{
    TheoremComparison c;
    const PolyhedralCone cmax = c_max(d, m.system);
    for (const auto& x : grid) {
        ++c.points;
        const bool trace = trace_class_test(m, x, tol);
        const bool interior = interior_member(x, cmax);
        if (trace == interior) {
            ++c.agreements;
            continue;
        }
        bool compact_fails = false;
        for (auto i : m.system.compact) compact_fails |= sgn(d.eval(i, x)) <= 0;
        if (interior && !trace && compact_fails)
            c.compact_root_caveat.push_back(x);
        else
            c.discrepancies.push_back(x);
    }
    return c;
}

}  // namespace gibbslie
