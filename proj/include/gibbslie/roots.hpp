#pragma once

// Root decomposition relative to a compactly embedded Cartan subalgebra t.
//
// Sign convention (frozen): each root alpha is stored through the real
// functional rho_alpha := i*alpha on t, so ad(h) Z = -i rho_alpha(h) Z for Z in
// the root space. A regular x0 in t defines Delta+ = { rho_alpha(x0) > 0 } and
// C_max = { x in t : rho_alpha(x) >= 0 for alpha in Delta_p+ }.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gibbslie/lie_algebra.hpp"
#include "gibbslie/numeric.hpp"
#include "gibbslie/simplex.hpp"
#include "gibbslie/spectral.hpp"

namespace gibbslie {

struct RootTolerances {
    double eps_root = 1e-8;
    long snap_den = 10000;
    double snap_tol = 1e-9;
    int attempts = 5;
    std::size_t max_roots = 40;
    std::uint64_t seed = 0;
    SpectralTolerances spectral{};
};

struct CartanCandidate {
    Subspace t;
    bool abelian = false;
    bool self_centralizing = false;
    bool compactly_embedded = false;
    bool accepted = false;
    Subspace centralizer;
    CompactEmbeddingReport embedding;
};

inline CartanCandidate verify_cartan(const LieAlgebra& g, const Subspace& t_in, const RootTolerances& tol = {})
{
    CartanCandidate c;
    c.t = g.verify_flags(t_in);
    c.abelian = true;
    for (std::size_t a = 0; a < c.t.dim() && c.abelian; ++a)
        for (std::size_t b = a + 1; b < c.t.dim(); ++b)
            if (!g.bracket(c.t.basis[a], c.t.basis[b]).is_zero()) {
                c.abelian = false;
                break;
            }
    c.centralizer = g.centralizer(c.t);
    c.self_centralizing = c.centralizer == c.t;
    if (c.abelian) {
        c.embedding = is_compactly_embedded(g, c.t, tol.spectral);
        c.compactly_embedded = c.embedding.verdict;
    }
    c.accepted = c.abelian && c.self_centralizing && c.compactly_embedded;
    return c;
}

enum class RootType { NS, CS, N, A };

inline const char* to_string(RootType t)
{
    switch (t) {
    case RootType::NS: return "NS";
    case RootType::CS: return "CS";
    case RootType::N: return "N";
    case RootType::A: return "A";
    }
    return "?";
}

struct Root {
    QVector rho;                          // rho(h_j) on the t-basis
    std::vector<ComplexElement> space;    // exact basis of g_C^alpha
    RootType type = RootType::A;
    bool compact = false;                 // == (type == CS)
    bool semisimple = false;              // == (type in {NS, CS})
    std::vector<Rational> s_values;       // alpha([Z, Z*]) over the probe set
    double residual = 0;                  // floating eigenspace residual
    std::size_t dim() const { return space.size(); }
};

struct RootDatum {
    std::shared_ptr<const LieAlgebra> algebra;
    CartanCandidate cartan;
    std::vector<Root> roots;
    std::vector<std::size_t> negative;    // negative[i] = index of -root i
    std::size_t attempts_used = 0;

    const Subspace& t() const { return cartan.t; }

    QVector t_coords(const Element& x) const
    {
        auto c = t().coordinates_of(x);
        if (!c) throw DomainError("element is not in the Cartan subalgebra");
        return *c;
    }
    Rational eval(std::size_t root, const QVector& tc) const { return dot(roots[root].rho, tc); }
};

namespace detail {

/// T with [Z, Z*] = iT; throws if the real part is nonzero.
inline Element bracket_with_star(const LieAlgebra& g, const ComplexElement& z)
{
    ComplexElement b = g.bracket(z, z.star());
    if (!b.re.is_zero()) throw DecompositionError("[Z, Z*] has a nonzero real part");
    return b.im;
}

/// Exact basis of { Z : ad(h_j) Z = -i rho_j Z for all j } over Q(i).
inline std::vector<ComplexElement> exact_root_space(const std::vector<QMatrix>& ads, const QVector& rho, std::size_t n)
{
    // Z = u + iv: A u - rho v = 0 and rho u + A v = 0.
    std::vector<QVector> rows;
    for (std::size_t j = 0; j < ads.size(); ++j)
        for (std::size_t r = 0; r < n; ++r) {
            QVector re = zero_vector(2 * n), im = zero_vector(2 * n);
            for (std::size_t c = 0; c < n; ++c) {
                re[c] = ads[j](r, c);
                im[n + c] = ads[j](r, c);
            }
            re[n + r] -= rho[j];
            im[r] += rho[j];
            rows.push_back(std::move(re));
            rows.push_back(std::move(im));
        }
    std::vector<QVector> ns = rows.empty() ? std::vector<QVector>{} : nullspace(QMatrix::from_rows(rows, 2 * n));
    std::vector<QVector> real_span;
    std::vector<ComplexElement> out;
    for (const auto& w : ns) {
        if (in_span(real_span, w)) continue;
        QVector jw(2 * n);
        for (std::size_t c = 0; c < n; ++c) {
            jw[c] = -w[n + c];
            jw[n + c] = w[c];
        }
        real_span.push_back(w);
        real_span.push_back(jw);
        real_span = span_basis(real_span, 2 * n);
        out.push_back({Element(QVector(w.begin(), w.begin() + static_cast<long>(n))),
                       Element(QVector(w.begin() + static_cast<long>(n), w.end()))});
    }
    return out;
}

struct FloatRoot {
    std::vector<double> rho;
    std::size_t multiplicity = 0;
    double residual = 0;
};

/// Floating simultaneous decomposition from one generic h*.
inline std::optional<std::vector<FloatRoot>> float_roots(const std::vector<QMatrix>& ads, const QVector& weights,
                                                         std::size_t n, std::size_t tdim, double eps_root)
{
    QMatrix hstar(n, n);
    for (std::size_t j = 0; j < ads.size(); ++j) hstar = hstar + weights[j] * ads[j];
    const RMatrix a = to_eigen(hstar);
    auto ev = eigenvalues(a);
    const double rad = spectral_radius(ev);
    const double radius = std::max(1e-7 * rad, 1e-9);
    std::vector<RMatrix> adsd;
    for (const auto& m : ads) adsd.push_back(to_eigen(m));
    std::vector<FloatRoot> out;
    std::size_t zero_dim = 0;
    const CMatrix ac = a.cast<cdouble>();
    for (const auto& c : cluster_eigenvalues(ev, radius)) {
        CMatrix ker = numeric_kernel(ac - c.center * CMatrix::Identity(n, n), std::max(1e-6 * a.norm(), 1e-300));
        if (static_cast<std::size_t>(ker.cols()) != c.multiplicity) return std::nullopt;
        if (std::abs(c.center) <= radius) {
            zero_dim += c.multiplicity;
            continue;
        }
        FloatRoot fr;
        fr.multiplicity = c.multiplicity;
        for (const auto& m : adsd) {
            CMatrix mv = m.cast<cdouble>() * ker;
            cdouble lam = (ker.adjoint() * mv).trace() / static_cast<double>(c.multiplicity);
            const double scale = std::max(1.0, m.norm());
            fr.residual = std::max(fr.residual, (mv - lam * ker).norm() / scale);
            fr.residual = std::max(fr.residual, std::abs(lam.real()) / scale);
            fr.rho.push_back(-lam.imag());
        }
        if (fr.residual > eps_root) return std::nullopt;
        out.push_back(std::move(fr));
    }
    if (zero_dim != tdim) return std::nullopt;
    return out;
}

inline std::vector<ComplexElement> classification_probes(const std::vector<ComplexElement>& basis)
{
    std::vector<ComplexElement> probes = basis;
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = a + 1; b < basis.size(); ++b) {
            probes.push_back({basis[a].re + basis[b].re, basis[a].im + basis[b].im});
            // Z_a + i Z_b
            probes.push_back({basis[a].re - basis[b].im, basis[a].im + basis[b].re});
        }
    return probes;
}

}  // namespace detail

/// Type tag from alpha([Z, Z*]) over the root space and its pairwise sums.
inline void classify_root(const LieAlgebra& g, const Subspace& t, Root& r)
{
    bool neg = false, pos = false, nonzero = false;
    r.s_values.clear();
    for (const auto& z : detail::classification_probes(r.space)) {
        Element tt = detail::bracket_with_star(g, z);
        auto c = t.coordinates_of(tt);
        if (!c) throw DecompositionError("[Z, Z*] is not in i t");
        Rational s = dot(r.rho, *c);
        r.s_values.push_back(s);
        if (!tt.is_zero()) nonzero = true;
        if (sgn(s) < 0) neg = true;
        if (sgn(s) > 0) pos = true;
    }
    if (neg && pos) throw DecompositionError("mixed signs of alpha([Z, Z*]) within one root space");
    r.type = neg ? RootType::NS : pos ? RootType::CS : nonzero ? RootType::N : RootType::A;
    r.compact = r.type == RootType::CS;
    r.semisimple = r.type == RootType::NS || r.type == RootType::CS;
}

inline RootDatum root_decomposition(std::shared_ptr<const LieAlgebra> gp, const CartanCandidate& cartan,
                                    const RootTolerances& tol = {})
{
    const LieAlgebra& g = *gp;
    if (!cartan.accepted) throw DecompositionError("Cartan candidate was not accepted");
    RootDatum d;
    d.algebra = gp;
    d.cartan = cartan;
    const std::size_t n = g.dim(), k = cartan.t.dim();
    std::vector<QMatrix> ads;
    for (const auto& h : cartan.t.basis) ads.push_back(g.ad_matrix(h));

    std::mt19937_64 rng(tol.seed);
    std::uniform_int_distribution<int> num(1, 997);
    std::optional<std::vector<detail::FloatRoot>> fr;
    for (int attempt = 0; attempt < tol.attempts && !fr; ++attempt) {
        QVector w;
        for (std::size_t j = 0; j < k; ++j) w.push_back(Rational(num(rng), 97));
        fr = detail::float_roots(ads, w, n, k, tol.eps_root);
        d.attempts_used = static_cast<std::size_t>(attempt) + 1;
    }
    if (!fr) throw DecompositionError("no generic element separated the root spaces");

    std::size_t total = k;
    for (const auto& f : *fr) {
        Root r;
        for (double v : f.rho) {
            auto q = snap_rational(v, tol.snap_den, tol.snap_tol * std::max(1.0, std::abs(v)));
            if (!q) throw DecompositionError("root value " + std::to_string(v) + " is not rational within tolerance");
            r.rho.push_back(*q);
        }
        r.residual = f.residual;
        r.space = detail::exact_root_space(ads, r.rho, n);
        if (r.space.size() != f.multiplicity)
            throw DecompositionError("exact root space dimension differs from the floating multiplicity");
        total += r.space.size();
        classify_root(g, cartan.t, r);
        d.roots.push_back(std::move(r));
    }
    if (total != n) throw DecompositionError("dimension identity fails");
    if (d.roots.size() > tol.max_roots) throw BoundExceeded("root count exceeds the configured bound");
    std::sort(d.roots.begin(), d.roots.end(), [](const Root& a, const Root& b) { return a.rho < b.rho; });
    d.negative.assign(d.roots.size(), d.roots.size());
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        for (std::size_t j = 0; j < d.roots.size(); ++j)
            if (d.roots[j].rho == -d.roots[i].rho) d.negative[i] = j;
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (d.negative[i] == d.roots.size()) throw DecompositionError("root set is not symmetric");
    return d;
}

inline RootDatum root_decomposition(const LieAlgebra& g, const Subspace& t, const RootTolerances& tol = {})
{
    auto gp = std::make_shared<const LieAlgebra>(g);
    CartanCandidate c = verify_cartan(g, t, tol);
    if (!c.accepted) throw DecompositionError("subspace is not a compactly embedded Cartan subalgebra");
    return root_decomposition(gp, c, tol);
}

// ---------------------------------------------------------------------------
// Positive systems.

struct PositiveSystem {
    QVector regular;                          // t-coordinates of the defining x0
    std::vector<std::size_t> positive;        // indices into RootDatum::roots
    std::vector<std::size_t> compact;         // Delta_k+
    std::vector<std::size_t> noncompact;      // Delta_p+
    std::vector<std::size_t> noncompact_semisimple;  // Delta_{p,s}+
    std::vector<std::size_t> solvable;        // Delta_r+ as Delta \ Delta_s (types N, A)
    std::vector<std::size_t> solvable_alt;    // Delta \ Delta_k, the literal reading
    bool adapted = false;
    bool adapted_at_regular = false;
    std::optional<QVector> adapted_witness;   // x0 in the chamber realizing adaptedness
};

namespace detail {

inline bool adapted_at(const RootDatum& d, const PositiveSystem& s, const QVector& x)
{
    for (auto b : s.noncompact)
        for (std::size_t a = 0; a < d.roots.size(); ++a)
            if (d.roots[a].compact && !(d.eval(b, x) > d.eval(a, x))) return false;
    return true;
}

inline std::optional<QVector> adapted_point(const RootDatum& d, const PositiveSystem& s)
{
    LinearSystem sys;
    sys.dim = d.t().dim();
    for (auto i : s.positive) sys.add_ge(d.roots[i].rho, 1);
    for (auto b : s.noncompact)
        for (std::size_t a = 0; a < d.roots.size(); ++a)
            if (d.roots[a].compact) sys.add_ge(d.roots[b].rho - d.roots[a].rho, 1);
    return find_point(sys);
}

}  // namespace detail

/// Positive system { rho > 0 at x0 } for x0 given in t-coordinates.
inline PositiveSystem positive_system(const RootDatum& d, const QVector& x0)
{
    PositiveSystem s;
    s.regular = x0;
    for (std::size_t i = 0; i < d.roots.size(); ++i) {
        const Rational v = d.eval(i, x0);
        if (sgn(v) == 0) {
            std::string r;
            for (const auto& c : d.roots[i].rho) r += (r.empty() ? "" : ",") + c.get_str();
            throw NotRegular("x0 vanishes on the root with rho = (" + r + ")");
        }
        if (sgn(v) < 0) continue;
        const Root& root = d.roots[i];
        s.positive.push_back(i);
        if (root.compact)
            s.compact.push_back(i);
        else
            s.noncompact.push_back(i);
        if (!root.compact && root.semisimple) s.noncompact_semisimple.push_back(i);
        if (!root.semisimple) s.solvable.push_back(i);
        if (!root.compact) s.solvable_alt.push_back(i);
    }
    s.adapted_at_regular = detail::adapted_at(d, s, x0);
    s.adapted_witness = s.adapted_at_regular ? std::optional<QVector>(x0) : detail::adapted_point(d, s);
    s.adapted = s.adapted_witness.has_value();
    return s;
}

inline PositiveSystem positive_system(const RootDatum& d, const Element& x0)
{
    return positive_system(d, d.t_coords(x0));
}

/// One positive system per chamber of the arrangement { rho_alpha = 0 }.
inline std::vector<PositiveSystem> enumerate_positive_systems(const RootDatum& d, std::size_t max_roots = 40)
{
    if (d.roots.size() > max_roots) throw BoundExceeded("root count exceeds the chamber enumeration bound");
    std::vector<std::size_t> reps;
    for (std::size_t i = 0; i < d.roots.size(); ++i)
        if (i < d.negative[i]) reps.push_back(i);
    std::vector<PositiveSystem> out;
    LinearSystem sys;
    sys.dim = d.t().dim();
    // Depth-first over sign choices, pruning infeasible prefixes.
    std::function<void(std::size_t)> dfs = [&](std::size_t depth) {
        auto pt = find_point(sys);
        if (!pt) return;
        if (depth == reps.size()) {
            out.push_back(positive_system(d, *pt));
            return;
        }
        for (int sign : {1, -1}) {
            sys.add_ge(Rational(sign) * d.roots[reps[depth]].rho, 1);
            dfs(depth + 1);
            sys.ge_rows.pop_back();
            sys.ge_rhs.pop_back();
        }
    };
    dfs(0);
    return out;
}

}  // namespace gibbslie
