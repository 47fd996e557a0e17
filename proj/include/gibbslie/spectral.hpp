#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gibbslie/lie_algebra.hpp"
#include "gibbslie/numeric.hpp"

namespace gibbslie {

struct SpectralTolerances {
    double eps_spec = 1e-9;        // |Re| relative to the spectral radius
    double eps_spec_floor = 1e-12;
    double cluster_rel = 1e-7;
    double cluster_floor = 1e-9;
    double svd_rel = 1e-6;         // rank threshold relative to ||A||_F
    double kernel_independence = 1e-6;
    double eps_metric = 1e-10;
    double delta_pd = 1e-8;
    int pd_budget = 1000;
    std::uint64_t seed = 0;
    long snap_den = 1000000;
    double snap_tol = 1e-9;
};

struct ClusterEvidence {
    cdouble center;
    std::size_t multiplicity = 0;
    std::size_t kernel_dim = 0;
};

struct EllipticityReport {
    std::vector<cdouble> eigenvalues;
    double spectral_radius = 0;
    double max_real_part = 0;
    double eps_used = 0;
    bool diagonalizable = false;
    std::vector<ClusterEvidence> clusters;
    /// sigma_min / sigma_max of the stacked orthonormal cluster kernels; near 0
    /// when spurious clusters share one eigendirection (split Jordan blocks).
    double kernel_independence = 0;
    bool verdict = false;
};

/// Ellipticity of a real matrix: diagonalizable over C with imaginary spectrum.
inline EllipticityReport is_elliptic_matrix(const QMatrix& a, const SpectralTolerances& tol = {})
{
    EllipticityReport rep;
    const RMatrix m = to_eigen(a);
    rep.eigenvalues = eigenvalues(m);
    rep.spectral_radius = spectral_radius(rep.eigenvalues);
    rep.eps_used = std::max(tol.eps_spec * rep.spectral_radius, tol.eps_spec_floor);
    for (const auto& z : rep.eigenvalues) rep.max_real_part = std::max(rep.max_real_part, std::abs(z.real()));

    const std::size_t n = a.rows();
    const double radius = std::max(tol.cluster_rel * rep.spectral_radius, tol.cluster_floor);
    const double thresh = std::max(tol.svd_rel * m.norm(), 1e-300);
    rep.diagonalizable = true;
    const CMatrix mc = m.cast<cdouble>();
    CMatrix stacked(n, 0);
    for (const auto& c : cluster_eigenvalues(rep.eigenvalues, radius)) {
        CMatrix shifted = mc - c.center * CMatrix::Identity(n, n);
        CMatrix ker = numeric_kernel(shifted, thresh);
        const std::size_t kd = static_cast<std::size_t>(ker.cols());
        rep.clusters.push_back({c.center, c.multiplicity, kd});
        if (kd != c.multiplicity) rep.diagonalizable = false;
        CMatrix grown(n, stacked.cols() + ker.cols());
        grown << stacked, ker;
        stacked = std::move(grown);
    }
    if (n == 0) {
        rep.kernel_independence = 1;
    } else if (rep.diagonalizable) {
        Eigen::JacobiSVD<CMatrix> svd(stacked);
        const auto& sv = svd.singularValues();
        rep.kernel_independence = sv(sv.size() - 1) / sv(0);
        if (rep.kernel_independence < tol.kernel_independence) rep.diagonalizable = false;
    }
    rep.verdict = rep.diagonalizable && rep.max_real_part <= rep.eps_used;
    return rep;
}

inline EllipticityReport is_elliptic(const LieAlgebra& g, const Element& x, const SpectralTolerances& tol = {})
{
    return is_elliptic_matrix(g.ad_matrix(x), tol);
}

/// Exact semisimplicity: the squarefree part of the characteristic polynomial
/// annihilates A.
inline bool is_semisimple_exact(const QMatrix& a)
{
    if (a.rows() == 0) return true;
    return eval_matrix(squarefree_part(charpoly(a)), a).is_zero();
}

// ---------------------------------------------------------------------------
// Compact embedding via a common invariant metric.

struct CompactEmbeddingReport {
    Subspace subalgebra;
    std::optional<QMatrix> invariant_metric;
    double residual = 0;
    double min_eigenvalue = 0;
    std::size_t nullspace_dim = 0;
    bool verdict = false;
    bool inconclusive = false;
    /// Set when the nullspace is certified free of PD points: a nonzero v with
    /// v^T S v = 0 for every invariant symmetric S.
    std::optional<QVector> isotropic_certificate;
    std::string method;
};

namespace detail {

inline std::vector<QMatrix> invariant_symmetric_forms(const std::vector<QMatrix>& ads, std::size_t n)
{
    // Parameters: upper triangle of S.
    std::vector<std::vector<std::size_t>> idx(n, std::vector<std::size_t>(n));
    std::size_t np = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) idx[i][j] = idx[j][i] = np++;
    std::vector<QVector> rows;
    for (const auto& a : ads)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                // (A^T S + S A)_{ij} = sum_k A_ki S_kj + S_ik A_kj
                QVector r = zero_vector(np);
                for (std::size_t k = 0; k < n; ++k) {
                    if (sgn(a(k, i)) != 0) r[idx[k][j]] += a(k, i);
                    if (sgn(a(k, j)) != 0) r[idx[i][k]] += a(k, j);
                }
                if (!is_zero(r)) rows.push_back(std::move(r));
            }
    std::vector<QVector> ns;
    if (rows.empty()) {
        for (std::size_t p = 0; p < np; ++p) ns.push_back(unit_vector(np, p));
    } else {
        ns = nullspace(QMatrix::from_rows(rows, np));
    }
    std::vector<QMatrix> forms;
    for (const auto& v : ns) {
        QMatrix s(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) s(i, j) = v[idx[i][j]];
        forms.push_back(std::move(s));
    }
    return forms;
}

inline bool isotropic_for_all(const std::vector<QMatrix>& forms, const QVector& v)
{
    if (is_zero(v)) return false;
    for (const auto& s : forms)
        if (sgn(dot(v, s.apply(v))) != 0) return false;
    return true;
}

inline double min_eigenvalue_normalized(const QMatrix& s)
{
    Eigen::SelfAdjointEigenSolver<RMatrix> es(to_eigen(s));
    const auto& ev = es.eigenvalues();
    const double top = std::max(std::abs(ev(ev.size() - 1)), std::abs(ev(0)));
    return top > 0 ? ev(0) / top : 0.0;
}

}  // namespace detail

/// Searches for S > 0 with ad(x)^T S + S ad(x) = 0 for all x in the basis of `a`.
inline CompactEmbeddingReport is_compactly_embedded(const LieAlgebra& g, const Subspace& a_in,
                                                    const SpectralTolerances& tol = {})
{
    CompactEmbeddingReport rep;
    Subspace a = a_in.verified ? a_in : g.verify_flags(a_in);
    if (!a.is_subalgebra) throw InputError("compact embedding requires a subalgebra");
    rep.subalgebra = a;
    const std::size_t n = g.dim();
    if (n == 0) {
        rep.verdict = true;
        rep.method = "zero algebra";
        return rep;
    }
    std::vector<QMatrix> ads;
    for (const auto& b : a.basis) ads.push_back(g.ad_matrix(b));
    std::vector<QMatrix> forms = detail::invariant_symmetric_forms(ads, n);
    rep.nullspace_dim = forms.size();

    auto accept = [&](const QMatrix& s, const std::string& how) {
        if (!is_positive_definite(s)) return false;
        const double mn = detail::min_eigenvalue_normalized(s);
        if (mn < tol.delta_pd) return false;
        double res = 0;
        const RMatrix sd = to_eigen(s);
        const double scale = sd.norm();
        for (const auto& ad : ads) {
            const RMatrix m = to_eigen(ad);
            res = std::max(res, (m.transpose() * sd + sd * m).norm() / scale);
        }
        rep.invariant_metric = s;
        rep.min_eigenvalue = mn;
        rep.residual = res;
        rep.verdict = res <= tol.eps_metric;
        rep.method = how;
        return rep.verdict;
    };

    if (forms.empty()) {
        rep.method = "no invariant symmetric form";
        return rep;
    }

    // Every element of a compactly embedded subalgebra is elliptic.
    for (std::size_t b = 0; b < ads.size(); ++b) {
        if (!is_semisimple_exact(ads[b])) {
            rep.method = "basis element " + std::to_string(b) + " has non-semisimple ad";
            return rep;
        }
        if (!is_elliptic_matrix(ads[b], tol).verdict) {
            rep.method = "basis element " + std::to_string(b) + " has non-imaginary ad spectrum";
            return rep;
        }
    }

    // Decisive obstruction: a common isotropic vector.
    std::vector<QVector> probes;
    for (std::size_t j = 0; j < n; ++j) probes.push_back(unit_vector(n, j));
    for (const auto& ad : ads)
        for (std::size_t j = 0; j < n; ++j) {
            QVector v = ad.col(j);
            for (std::size_t k = 0; k < n && !is_zero(v); ++k) {
                probes.push_back(v);
                v = ad.apply(v);
            }
        }
    for (const auto& v : probes)
        if (detail::isotropic_for_all(forms, v)) {
            rep.isotropic_certificate = v;
            rep.method = "isotropic vector certificate";
            return rep;
        }

    QMatrix sum(n, n);
    for (const auto& s : forms) sum = sum + s;
    if (accept(sum, "sum of nullspace basis")) return rep;

    // Frobenius projection of the identity onto span(forms).
    {
        const std::size_t k = forms.size();
        QMatrix gram(k, k);
        QVector rhs(k);
        for (std::size_t p = 0; p < k; ++p) {
            rhs[p] = forms[p].trace();
            for (std::size_t q = 0; q < k; ++q) {
                Rational s = 0;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j) s += forms[p](i, j) * forms[q](i, j);
                gram(p, q) = s;
            }
        }
        if (auto c = solve(gram, rhs)) {
            QMatrix s(n, n);
            for (std::size_t p = 0; p < k; ++p) s = s + (*c)[p] * forms[p];
            if (accept(s, "projection of identity")) return rep;
        }
    }

    std::mt19937_64 rng(tol.seed);
    std::uniform_int_distribution<int> coef(-10, 10);
    for (int trial = 0; trial < tol.pd_budget; ++trial) {
        QMatrix s(n, n);
        for (const auto& f : forms) s = s + Rational(coef(rng)) * f;
        if (accept(s, "random combination")) return rep;
    }
    rep.invariant_metric.reset();
    rep.verdict = false;
    rep.inconclusive = true;
    rep.method = "budget exhausted";
    return rep;
}

/// comp(g)° membership: the centralizer of x is compactly embedded.
inline CompactEmbeddingReport comp_interior_member(const LieAlgebra& g, const Element& x,
                                                   const SpectralTolerances& tol = {})
{
    return is_compactly_embedded(g, g.centralizer(x), tol);
}

// ---------------------------------------------------------------------------
// Ellipticity ideal.

struct EllipticityIdealReport {
    Subspace ideal;
    std::size_t iterations = 0;
    std::vector<std::size_t> obstruction_dims;
};

namespace detail {

/// Jordan decomposition A = S + N with S semisimple, exact.
inline std::pair<QMatrix, QMatrix> jordan_decomposition(const QMatrix& a)
{
    const std::size_t n = a.rows();
    const QPoly f = squarefree_part(charpoly(a));
    const QPoly df = derivative(f);
    QMatrix s = a;
    for (std::size_t it = 0; it < 64; ++it) {
        QMatrix fs = eval_matrix(f, s);
        if (fs.is_zero()) return {s, a - s};
        auto inv = inverse(eval_matrix(df, s));
        if (!inv) throw SpectralError("Jordan decomposition: f'(S) singular");
        s = s - fs * *inv;
    }
    (void)n;
    throw SpectralError("Jordan decomposition did not converge");
}

/// Splits the squarefree f into (imaginary-axis factor, rest), exactly.
inline std::pair<QPoly, QPoly> split_imaginary_factor(const QPoly& f, const SpectralTolerances& tol)
{
    const int d = degree(f);
    if (d <= 0) return {QPoly{1}, f};
    // Companion matrix roots.
    RMatrix comp = RMatrix::Zero(d, d);
    for (int i = 1; i < d; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < d; ++i) comp(i, d - 1) = -Rational(f[static_cast<std::size_t>(i)] / f.back()).get_d();
    auto roots = eigenvalues(comp);
    const double rad = spectral_radius(roots);
    const double eps = std::max(tol.eps_spec * rad, tol.eps_spec_floor);
    std::vector<cdouble> imag;
    for (const auto& r : roots)
        if (std::abs(r.real()) <= eps) imag.push_back(cdouble(0, r.imag()));
    // Real coefficients of prod (x - r).
    std::vector<cdouble> c{1.0};
    for (const auto& r : imag) {
        std::vector<cdouble> nc(c.size() + 1, 0.0);
        for (std::size_t i = 0; i < c.size(); ++i) {
            nc[i + 1] += c[i];
            nc[i] -= r * c[i];
        }
        c = std::move(nc);
    }
    QPoly gi;
    for (const auto& z : c) {
        auto q = snap_rational(z.real(), tol.snap_den, tol.snap_tol * std::max(1.0, std::abs(z.real())));
        if (!q) throw SpectralError("imaginary-axis factor of the minimal polynomial is not rational");
        gi.push_back(*q);
    }
    auto [quo, rem] = poly_divmod(f, gi);
    if (!rem.empty()) throw SpectralError("snapped imaginary-axis factor does not divide the minimal polynomial");
    return {make_monic(gi), make_monic(quo)};
}

}  // namespace detail

/// Smallest ideal n with ad(y) elliptic on g/n.
inline EllipticityIdealReport ellipticity_ideal(const LieAlgebra& g, const Element& y, const SpectralTolerances& tol = {})
{
    g.check_dim(y);
    EllipticityIdealReport rep;
    // Composite projection g -> current quotient h.
    QMatrix proj = QMatrix::identity(g.dim());
    LieAlgebra h = g;
    Element yh = y;
    for (;;) {
        ++rep.iterations;
        if (h.dim() == 0) break;
        const QMatrix a = h.ad_matrix(yh);
        auto [s, nil] = detail::jordan_decomposition(a);
        const QPoly f = squarefree_part(charpoly(a));
        auto [gi, grest] = detail::split_imaginary_factor(f, tol);
        std::vector<QVector> obstruction = nullspace(eval_matrix(grest, s));
        for (std::size_t j = 0; j < h.dim(); ++j) obstruction.push_back(nil.col(j));
        Subspace o = Subspace::span(obstruction, h.dim());
        rep.obstruction_dims.push_back(o.dim());
        if (o.dim() == 0) break;
        Quotient q = h.quotient(h.ideal_closure(o));
        proj = q.projection * proj;
        yh = q.project(yh);
        h = *q.algebra;
    }
    rep.ideal = g.verify_flags(Subspace::span(proj.rows() == 0 ? Subspace::whole(g.dim()).vectors() : nullspace(proj),
                                              g.dim()));
    return rep;
}

}  // namespace gibbslie
