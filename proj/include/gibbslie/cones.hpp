#pragma once

// Exact polyhedral cones in t-coordinates and the Gibbs-element decision.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gibbslie/roots.hpp"
#include "gibbslie/simplex.hpp"
#include "gibbslie/spectral.hpp"

namespace gibbslie {

/// Cone in Q^dim given by generators (cone(G)) and/or inequalities (F x >= 0).
/// When both are present they describe the same set.
struct PolyhedralCone {
    std::size_t dim = 0;
    std::vector<QVector> generators;
    std::vector<QVector> inequalities;
    bool has_generators = false;
    bool has_inequalities = false;

    static PolyhedralCone from_generators(std::vector<QVector> g, std::size_t dim)
    {
        PolyhedralCone c;
        c.dim = dim;
        for (auto& v : g)
            if (!is_zero(v)) c.generators.push_back(std::move(v));
        c.has_generators = true;
        return c;
    }
    static PolyhedralCone from_inequalities(std::vector<QVector> f, std::size_t dim)
    {
        PolyhedralCone c;
        c.dim = dim;
        for (auto& v : f)
            if (!is_zero(v)) c.inequalities.push_back(std::move(v));
        c.has_inequalities = true;
        return c;
    }
};

inline constexpr std::size_t kMaxConversionDim = 8;

namespace detail {

inline void for_each_subset(std::size_t m, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& f)
{
    std::vector<std::size_t> idx(k);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
        if (depth == k) {
            f(idx);
            return;
        }
        for (std::size_t i = start; i + (k - depth) <= m; ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

/// Scales to a primitive integer vector; keeps the ray.
inline QVector primitive(const QVector& v)
{
    mpz_class l = 1, g = 0;
    for (const auto& c : v)
        if (sgn(c) != 0) l = lcm(l, mpz_class(c.get_den()));
    QVector r;
    for (const auto& c : v) {
        Rational s = c * Rational(l);
        r.push_back(s);
        g = gcd(g, mpz_class(s.get_num()));
    }
    if (g != 0)
        for (auto& c : r) c /= Rational(g);
    return r;
}

/// Facet inequalities of cone(G) (including +-f pairs for span(G)^perp).
inline std::vector<QVector> facets_of_generators(const std::vector<QVector>& gens, std::size_t dim)
{
    if (dim > kMaxConversionDim) throw BoundExceeded("cone conversion is limited to dimension 8");
    std::vector<QVector> out;
    auto add_unique = [&](QVector f) {
        f = primitive(f);
        for (const auto& e : out)
            if (e == f) return;
        out.push_back(std::move(f));
    };
    const std::vector<QVector> lbasis = span_basis(gens, dim);
    const std::size_t r = lbasis.size();
    std::vector<QVector> perp = r == 0 ? std::vector<QVector>{} : nullspace(QMatrix::from_rows(lbasis, dim));
    if (r == 0)
        for (std::size_t i = 0; i < dim; ++i) perp.push_back(unit_vector(dim, i));
    for (const auto& p : perp) {
        add_unique(p);
        add_unique(-p);
    }
    if (r == 0) return out;
    // Facet normals inside span(G): vanish on r-1 independent generators.
    for_each_subset(gens.size(), r - 1, [&](const std::vector<std::size_t>& sub) {
        std::vector<QVector> rows;
        for (auto i : sub) rows.push_back(gens[i]);
        if (span_basis(rows, dim).size() != r - 1) return;
        for (const auto& p : perp) rows.push_back(p);
        auto ns = nullspace(QMatrix::from_rows(rows, dim));
        if (ns.size() != 1) return;
        QVector f = ns[0];
        int sign = 0;
        for (const auto& g : gens) {
            int s = sgn(dot(f, g));
            if (s == 0) continue;
            if (sign == 0) sign = s;
            if (s != sign) return;
        }
        if (sign == 0) return;
        add_unique(sign > 0 ? f : QVector(-f));
    });
    return out;
}

}  // namespace detail

inline PolyhedralCone with_inequalities(PolyhedralCone c)
{
    if (c.has_inequalities) return c;
    c.inequalities = detail::facets_of_generators(c.generators, c.dim);
    c.has_inequalities = true;
    return c;
}

/// {F x >= 0} = cone(F)^dual, whose generators are the facets of cone(F).
inline PolyhedralCone with_generators(PolyhedralCone c)
{
    if (c.has_generators) return c;
    c.generators = detail::facets_of_generators(c.inequalities, c.dim);
    c.has_generators = true;
    return c;
}

/// No nonzero nonnegative combination of generators vanishes.
inline bool is_pointed(const PolyhedralCone& c_in)
{
    PolyhedralCone c = with_generators(c_in);
    const std::size_t m = c.generators.size();
    if (m == 0) return true;
    QMatrix a(c.dim + 1, m);
    QVector b = zero_vector(c.dim + 1);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < c.dim; ++i) a(i, j) = c.generators[j][i];
        a(c.dim, j) = 1;
    }
    b[c.dim] = 1;
    return !find_nonnegative_solution(a, b).has_value();
}

inline bool contains(const PolyhedralCone& outer_in, const PolyhedralCone& inner_in)
{
    if (outer_in.dim != inner_in.dim) throw DimensionMismatch("cones live in different spaces");
    PolyhedralCone outer = with_inequalities(outer_in);
    PolyhedralCone inner = with_generators(inner_in);
    for (const auto& g : inner.generators)
        for (const auto& f : outer.inequalities)
            if (sgn(dot(f, g)) < 0) return false;
    return true;
}

inline bool contains_point(const PolyhedralCone& c_in, const QVector& x)
{
    PolyhedralCone c = with_inequalities(c_in);
    for (const auto& f : c.inequalities)
        if (sgn(dot(f, x)) < 0) return false;
    return true;
}

/// Strict inequalities: interior relative to the ambient t.
inline bool interior_member(const QVector& x, const PolyhedralCone& c_in)
{
    if (x.size() != c_in.dim) throw DomainError("point is not in the cone's ambient space");
    PolyhedralCone c = with_inequalities(c_in);
    for (const auto& f : c.inequalities)
        if (sgn(dot(f, x)) <= 0) return false;
    return true;
}

/// H(C) = C cap -C.
inline std::vector<QVector> lineality_space(const PolyhedralCone& c)
{
    if (c.has_generators) {
        std::vector<QVector> lines;
        const std::size_t m = c.generators.size();
        for (std::size_t k = 0; k < m; ++k) {
            // -g_k in cone(G)?
            QMatrix a(c.dim, m);
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t i = 0; i < c.dim; ++i) a(i, j) = c.generators[j][i];
            if (find_nonnegative_solution(a, -c.generators[k])) lines.push_back(c.generators[k]);
        }
        return span_basis(lines, c.dim);
    }
    if (c.inequalities.empty()) return Subspace::whole(c.dim).vectors();
    return span_basis(nullspace(QMatrix::from_rows(c.inequalities, c.dim)), c.dim);
}

// ---------------------------------------------------------------------------
// Cones attached to a positive system.

/// cone{ i[Z, Z*] } over root-space bases of Delta_p+, in t-coordinates.
inline PolyhedralCone c_min(const RootDatum& d, const PositiveSystem& s)
{
    std::vector<QVector> gens;
    for (auto i : s.noncompact)
        for (const auto& z : d.roots[i].space) {
            Element tt = detail::bracket_with_star(*d.algebra, z);
            auto c = d.t().coordinates_of(tt);
            if (!c) throw DecompositionError("i[Z, Z*] is not in t");
            gens.push_back(-*c);  // i[Z, Z*] = i(iT) = -T
        }
    return PolyhedralCone::from_generators(std::move(gens), d.t().dim());
}

/// { x in t : rho_alpha(x) >= 0, alpha in Delta_p+ }.
inline PolyhedralCone c_max(const RootDatum& d, const PositiveSystem& s)
{
    std::vector<QVector> f;
    for (auto i : s.noncompact) f.push_back(d.roots[i].rho);
    return PolyhedralCone::from_inequalities(std::move(f), d.t().dim());
}

inline bool is_admissible_system(const RootDatum& d, const PositiveSystem& s)
{
    if (!s.adapted) return false;
    PolyhedralCone lo = c_min(d, s);
    return is_pointed(lo) && contains(c_max(d, s), lo);
}

/// W_max° membership. For x outside t a conjugator Phi (floating matrix in
/// g-coordinates with Phi x in t) must be supplied.
inline bool w_max_interior_member(const RootDatum& d, const PositiveSystem& s, const Element& x,
                                  const std::optional<RMatrix>& conjugator = std::nullopt, double tol = 1e-9)
{
    if (auto c = d.t().coordinates_of(x)) return interior_member(*c, c_max(d, s));
    if (!conjugator) throw NeedsConjugation("element is not in t and no conjugator was supplied");
    const std::size_t n = d.algebra->dim();
    const Eigen::VectorXd y = *conjugator * to_eigen(x.coords);
    // Least-squares t-coordinates and the distance to t.
    RMatrix basis(n, d.t().dim());
    for (std::size_t j = 0; j < d.t().dim(); ++j) basis.col(static_cast<Eigen::Index>(j)) = to_eigen(d.t().basis[j].coords);
    const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
    const double scale = std::max(1.0, y.norm());
    if ((basis * c - y).norm() > tol * scale) throw NeedsConjugation("conjugated element does not lie in t");
    for (auto i : s.noncompact) {
        double v = 0;
        for (std::size_t j = 0; j < d.t().dim(); ++j) v += d.roots[i].rho[j].get_d() * c(static_cast<Eigen::Index>(j));
        if (v <= tol * scale) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Gibbs elements.

struct GibbsDecision {
    Element element;
    bool verdict = false;
    bool inconclusive = false;
    bool quotient_search_exhausted = false;
    std::string stage;    // compact_algebra | comp_interior_member | quotient_search
    std::string reason;
    CompactEmbeddingReport comp;
    // Witness chain when verdict is true via an admissible system.
    std::optional<Subspace> cartan;
    std::optional<Subspace> quotient_ideal;
    std::shared_ptr<RootDatum> quotient_roots;
    std::optional<PositiveSystem> system;
    std::size_t quotients_tried = 0;
};

inline GibbsDecision is_gibbs_element(const LieAlgebra& g, const Element& x, const std::vector<Subspace>& cartan_hints,
                                      const RootTolerances& tol = {})
{
    g.check_dim(x);
    GibbsDecision dec;
    dec.element = x;

    auto whole = is_compactly_embedded(g, Subspace::whole(g.dim()), tol.spectral);
    if (whole.verdict) {
        dec.verdict = true;
        dec.stage = "compact_algebra";
        dec.reason = "g is compact; an invariant ball around x is an open proper invariant convex set";
        dec.comp = whole;
        return dec;
    }

    dec.comp = comp_interior_member(g, x, tol.spectral);
    if (!dec.comp.verdict) {
        dec.stage = "comp_interior_member";
        dec.inconclusive = dec.comp.inconclusive;
        dec.reason = dec.comp.inconclusive ? "compact embedding of the centralizer is undecided"
                                           : "the centralizer of x is not compactly embedded";
        return dec;
    }

    std::optional<CartanCandidate> cartan;
    bool some_contains = false;
    for (const auto& h : cartan_hints) {
        if (h.ambient_dim != g.dim() || !h.contains(x)) continue;
        some_contains = true;
        CartanCandidate c = verify_cartan(g, h, tol);
        if (c.accepted) {
            cartan = c;
            break;
        }
    }
    if (!cartan) {
        if (some_contains) throw InputError("no hinted subspace containing x is a compactly embedded Cartan subalgebra");
        throw NeedsConjugation("no hinted Cartan subalgebra contains x");
    }
    dec.cartan = cartan->t;
    dec.stage = "quotient_search";

    // Central ideals spanned by subsets of a center basis, smallest first.
    const Subspace z = g.center();
    std::vector<std::vector<std::size_t>> subsets;
    for (std::size_t k = 0; k <= z.dim(); ++k)
        detail::for_each_subset(z.dim(), k, [&](const std::vector<std::size_t>& s) { subsets.push_back(s); });

    for (const auto& sub : subsets) {
        std::vector<Element> gens;
        for (auto i : sub) gens.push_back(z.basis[i]);
        Subspace n = g.verify_flags(Subspace::span(gens, g.dim()));
        Quotient q = g.quotient(n);
        ++dec.quotients_tried;
        const LieAlgebra& gq = *q.algebra;
        const Element xq = q.project(x);
        if (is_compactly_embedded(gq, Subspace::whole(gq.dim()), tol.spectral).verdict) {
            // A proper quotient that is compact pulls back an invariant ball; q must
            // be nonzero on x for the preimage to be proper and contain x.
            if (gq.dim() == 0) continue;
            dec.verdict = true;
            dec.quotient_ideal = n;
            dec.reason = "compact quotient g/n";
            return dec;
        }
        CartanCandidate cq = verify_cartan(gq, q.project(cartan->t), tol);
        if (!cq.accepted) continue;
        auto datum = std::make_shared<RootDatum>(root_decomposition(q.algebra, cq, tol));
        const QVector xc = datum->t_coords(xq);
        for (auto& sys : enumerate_positive_systems(*datum, tol.max_roots)) {
            if (!is_admissible_system(*datum, sys)) continue;
            if (!interior_member(xc, c_max(*datum, sys))) continue;
            dec.verdict = true;
            dec.quotient_ideal = n;
            dec.quotient_roots = datum;
            dec.system = sys;
            dec.reason = "admissible positive system with q(x) in the interior of C_max";
            return dec;
        }
    }
    dec.quotient_search_exhausted = true;
    dec.reason = "no central quotient admits an admissible system with q(x) in the interior of C_max";
    return dec;
}

}  // namespace gibbslie
