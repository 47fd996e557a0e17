#pragma once

// Truncated unitary representations, Gibbs states on exp-words, and numerical
// checks of the KMS condition, invariance, positive definiteness and mixtures.

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <lapacke.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "gibbslie/library.hpp"
#include "gibbslie/numeric.hpp"

namespace gibbslie {

enum class RepFamily { Su2Irrep, Oscillator, Sl2Lowest, Heisenberg };

inline const char* to_string(RepFamily f)
{
    switch (f) {
    case RepFamily::Su2Irrep: return "su2";
    case RepFamily::Oscillator: return "oscillator";
    case RepFamily::Sl2Lowest: return "sl2_lowest";
    case RepFamily::Heisenberg: return "heisenberg";
    }
    return "?";
}

inline RepFamily parse_rep_family(const std::string& s)
{
    if (s == "su2" || s == "su2_irrep") return RepFamily::Su2Irrep;
    if (s == "oscillator") return RepFamily::Oscillator;
    if (s == "sl2_lowest" || s == "sl2") return RepFamily::Sl2Lowest;
    if (s == "heisenberg") return RepFamily::Heisenberg;
    throw InputError("unknown representation family '" + s + "'");
}

struct RepParams {
    double lambda = 1.0;  // oscillator frequency / Heisenberg central charge / sl2 lowest weight
    int two_j = 1;        // su(2) spin times two
};

/// Generators dpi(e_i) as N x N complex matrices (skew-hermitian) and the
/// dynamics H = -i dpi(x_dyn), so that e^{itH} pi(g) e^{-itH} = pi(alpha_t(g)).
struct TruncatedRep {
    RepFamily family = RepFamily::Su2Irrep;
    RepParams params;
    std::size_t N = 0;
    std::shared_ptr<const LieAlgebra> algebra;
    std::vector<CMatrix> generators;
    std::vector<double> x_dyn;
    CMatrix hamiltonian;
    double residual = 0;  // commutator residual on the block away from the cutoff
    double leakage = 0;   // commutator residual on the last two basis vectors

    CMatrix dpi(const std::vector<double>& y) const
    {
        if (y.size() != generators.size()) throw DimensionMismatch("element length does not match the algebra");
        CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] != 0) m += y[i] * generators[i];
        return m;
    }
};

namespace detail {

inline CMatrix ladder_up(std::size_t n, const std::function<double(std::size_t)>& coeff)
{
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k + 1 < n; ++k) m(static_cast<Eigen::Index>(k + 1), static_cast<Eigen::Index>(k)) = coeff(k);
    return m;
}

/// Position Q = (a + a^dag)/sqrt2 and momentum P = (a - a^dag)/(i sqrt2) in the number basis.
inline std::pair<CMatrix, CMatrix> position_momentum(std::size_t n)
{
    const CMatrix adag = ladder_up(n, [](std::size_t k) { return std::sqrt(static_cast<double>(k + 1)); });
    const CMatrix a = adag.adjoint();
    const double r = 1 / std::sqrt(2.0);
    const CMatrix q = r * (a + adag);
    const CMatrix p = (a - adag) * cdouble(0, -r);
    return {q, p};
}

inline CMatrix number_plus_half(std::size_t n)
{
    CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) m(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = static_cast<double>(k) + 0.5;
    return m;
}

inline void measure_residuals(TruncatedRep& r)
{
    const LieAlgebra& g = *r.algebra;
    const auto n = static_cast<Eigen::Index>(r.N);
    const Eigen::Index inner = n >= 2 ? n - 2 : 0;
    r.residual = 0;
    r.leakage = 0;
    for (std::size_t i = 0; i < g.dim(); ++i)
        for (std::size_t j = i + 1; j < g.dim(); ++j) {
            const Element b = g.bracket(g.basis_element(i), g.basis_element(j));
            CMatrix res = r.generators[i] * r.generators[j] - r.generators[j] * r.generators[i];
            for (std::size_t k = 0; k < g.dim(); ++k)
                if (sgn(b.coords[k]) != 0) res -= b.coords[k].get_d() * r.generators[k];
            if (inner > 0) r.residual = std::max(r.residual, res.topLeftCorner(inner, inner).cwiseAbs().maxCoeff());
            r.leakage = std::max({r.leakage, res.bottomRows(n - inner).cwiseAbs().maxCoeff(),
                                  res.rightCols(n - inner).cwiseAbs().maxCoeff()});
        }
}

}  // namespace detail

inline TruncatedRep build_truncated_rep(RepFamily family, const RepParams& params, std::size_t N)
{
    TruncatedRep r;
    r.family = family;
    r.params = params;
    const cdouble I(0, 1);
    switch (family) {
    case RepFamily::Su2Irrep: {
        if (params.two_j < 1 || params.two_j > 50) throw DomainError("su2: j must lie in {1/2, 1, ..., 25}");
        r.N = static_cast<std::size_t>(params.two_j) + 1;
        if (N != 0 && N != r.N) throw DimensionMismatch("su2: N must equal 2j + 1");
        const double j = params.two_j / 2.0;
        // Weight basis m = j, j-1, ..., -j; J+ raises m.
        const std::size_t n = r.N;
        CMatrix jp = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        CMatrix jz = CMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t k = 0; k < n; ++k) {
            const double m = j - static_cast<double>(k);
            jz(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = m;
            if (k > 0) jp(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(k)) = std::sqrt(j * (j + 1) - m * (m + 1));
        }
        const CMatrix jm = jp.adjoint();
        const CMatrix jx = 0.5 * (jp + jm);
        const CMatrix jy = (jp - jm) * cdouble(0, -0.5);
        r.algebra = std::make_shared<LieAlgebra>(library::su2());
        r.generators = {-I * jx, -I * jy, -I * jz};
        r.x_dyn = {0, 0, 1};
        break;
    }
    case RepFamily::Oscillator:
    case RepFamily::Heisenberg: {
        if (N < 2) throw DomainError("truncation N must be at least 2");
        if (family == RepFamily::Heisenberg && !(params.lambda > 0))
            throw DomainError("heisenberg: the central charge lambda must be positive");
        if (!std::isfinite(params.lambda) || params.lambda == 0) throw DomainError("lambda must be finite and nonzero");
        r.N = N;
        auto [q, p] = detail::position_momentum(N);
        const CMatrix k = detail::number_plus_half(N);
        const CMatrix id = CMatrix::Identity(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        r.algebra = std::make_shared<LieAlgebra>(library::oscillator());
        // Basis (p, q, z, n). Heisenberg: central charge lambda, Schroedinger
        // representation in the lambda-scaled Hermite basis; dynamics n.
        // Oscillator: central charge 1, dynamics lambda * n.
        const double c = family == RepFamily::Heisenberg ? params.lambda : 1.0;
        const double s = std::sqrt(c);
        r.generators = {I * s * p, I * s * q, I * c * id, I * k};
        r.x_dyn = {0, 0, 0, family == RepFamily::Heisenberg ? 1.0 : params.lambda};
        break;
    }
    case RepFamily::Sl2Lowest: {
        if (N < 2) throw DomainError("truncation N must be at least 2");
        if (!(params.lambda > 0)) throw DomainError("sl2_lowest: lowest weight must be positive");
        r.N = N;
        const double kk = params.lambda;
        CMatrix k0 = CMatrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
        for (std::size_t n = 0; n < N; ++n) k0(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = kk + static_cast<double>(n);
        const CMatrix kp = detail::ladder_up(N, [kk](std::size_t n) {
            return std::sqrt((static_cast<double>(n) + 1) * (static_cast<double>(n) + 2 * kk));
        });
        const CMatrix km = kp.adjoint();
        const CMatrix k1 = 0.5 * (kp + km);
        const CMatrix k2 = (kp - km) * cdouble(0, -0.5);
        r.algebra = std::make_shared<LieAlgebra>(library::su11());
        r.generators = {I * k0, I * k1, I * k2};
        r.x_dyn = {1, 0, 0};
        break;
    }
    }
    r.hamiltonian = cdouble(0, -1) * r.dpi(r.x_dyn);
    detail::measure_residuals(r);
    return r;
}

/// Simultaneous change of basis by a unitary U: dpi -> U dpi U^dag.
inline TruncatedRep conjugate_rep(const TruncatedRep& r, const CMatrix& u)
{
    TruncatedRep c = r;
    for (auto& g : c.generators) g = u * g * u.adjoint();
    c.hamiltonian = u * r.hamiltonian * u.adjoint();
    return c;
}

inline CMatrix random_unitary(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0, 1);
    CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = cdouble(g(rng), g(rng));
    Eigen::HouseholderQR<CMatrix> qr(m);
    return qr.householderQ() * CMatrix::Identity(m.rows(), m.cols());
}

// ---------------------------------------------------------------------------
// Words.

/// exp(time * dpi(y)) for y given in algebra coordinates.
struct Letter {
    std::vector<double> y;
    double time = 0;
};

using GroupWord = std::vector<Letter>;

inline GroupWord inverse(const GroupWord& w)
{
    GroupWord out(w.rbegin(), w.rend());
    for (auto& l : out) l.time = -l.time;
    return out;
}

inline GroupWord concat(const GroupWord& a, const GroupWord& b)
{
    GroupWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

namespace detail {

inline bool is_tridiagonal(const CMatrix& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (std::abs(i - j) > 1 && a(i, j) != cdouble(0)) return false;
    return true;
}

/// exp(A) for skew-hermitian A through the spectrum of K = -iA. A tridiagonal
/// K is gauged by a diagonal phase D to a real symmetric T, K = D T D^dag.
inline CMatrix exp_skew_hermitian(const CMatrix& a)
{
    const Eigen::Index n = a.rows();
    const CMatrix k = cdouble(0, -1) * a;
    if (is_tridiagonal(k)) {
        Eigen::VectorXd diag(n), sub(n > 0 ? n - 1 : 0);
        Eigen::VectorXcd d(n);
        d(0) = 1;
        for (Eigen::Index i = 0; i < n; ++i) diag(i) = k(i, i).real();
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const cdouble e = k(i + 1, i);
            sub(i) = std::abs(e);
            d(i + 1) = sub(i) > 0 ? d(i) * e / sub(i) : d(i);
        }
        // Divide and conquer; eigenvectors overwrite w column-major.
        RMatrix w(n, n);
        const lapack_int info = LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', static_cast<lapack_int>(n), diag.data(), sub.data(),
                                               w.data(), static_cast<lapack_int>(n));
        if (info != 0) throw SpectralError("tridiagonal eigensolver failed (dstevd info " + std::to_string(info) + ")");
        const Eigen::ArrayXd kappa = diag.array();
        const RMatrix re = (w * kappa.cos().matrix().asDiagonal()) * w.transpose();
        const RMatrix im = (w * kappa.sin().matrix().asDiagonal()) * w.transpose();
        CMatrix out(n, n);
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = 0; i < n; ++i) out(i, j) = d(i) * cdouble(re(i, j), im(i, j)) * std::conj(d(j));
        return out;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (k + k.adjoint()));
    if (es.info() != Eigen::Success) throw SpectralError("hermitian eigensolver failed");
    Eigen::VectorXcd ph(n);
    for (Eigen::Index i = 0; i < n; ++i) ph(i) = std::exp(cdouble(0, es.eigenvalues()(i)));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// pi(w) as the ordered product of letter exponentials; generators are skew-hermitian.
inline CMatrix word_matrix(const TruncatedRep& r, const GroupWord& w)
{
    const auto n = static_cast<Eigen::Index>(r.N);
    std::optional<CMatrix> m;
    for (const auto& l : w) {
        if (l.time == 0) continue;
        CMatrix e = detail::exp_skew_hermitian(l.time * r.dpi(l.y));
        m = m ? CMatrix(*m * e) : std::move(e);
    }
    return m ? *m : CMatrix::Identity(n, n);
}

/// alpha_t on words through the algebra: exp(s Y) -> exp(s Ad(e^{t X}) Y).
inline GroupWord evolve_word(const LieAlgebra& g, const std::vector<double>& x_dyn, const GroupWord& w, double t)
{
    RMatrix ad = RMatrix::Zero(static_cast<Eigen::Index>(g.dim()), static_cast<Eigen::Index>(g.dim()));
    for (std::size_t i = 0; i < g.dim(); ++i)
        if (x_dyn[i] != 0) ad += x_dyn[i] * to_eigen(g.ad_matrix(g.basis_element(i)));
    const RMatrix phi = (t * ad).exp();
    GroupWord out = w;
    for (auto& l : out) {
        Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(l.y.data(), static_cast<Eigen::Index>(l.y.size()));
        Eigen::VectorXd u = phi * v;
        l.y.assign(u.data(), u.data() + u.size());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gibbs states.

/// phi(g) = tr(pi(g) e^{-beta H_rho}) / tr(e^{-beta H_rho}). H_rho equals the
/// dynamics H except for deliberately perturbed negative controls.
struct GibbsStateVal {
    std::shared_ptr<const TruncatedRep> rep;
    double beta = 1;
    bool perturbed = false;
    CMatrix density_hamiltonian;
    double log_Z = 0;      // log tr(e^{-beta H_rho})
    double z_shifted = 1;  // tr(e^{-beta (H_rho - min spec H_rho)})
    // Dynamics eigenbasis: H = V diag(h) V^dag, h shifted so min h = 0.
    CMatrix V;
    Eigen::VectorXd h;
    CMatrix rho;      // normalized density, in the representation basis
    CMatrix rho_eig;  // the same density in the dynamics eigenbasis

    static constexpr double kMaxPerturbedGrowth = 30;

    double Z() const { return std::exp(log_Z); }

    cdouble evaluate_matrix(const CMatrix& m) const { return (m.cwiseProduct(rho.transpose())).sum(); }
    cdouble evaluate(const GroupWord& w) const { return evaluate_matrix(word_matrix(*rep, w)); }

    CMatrix to_eigenbasis(const CMatrix& m) const { return V.adjoint() * m * V; }

    /// F(z) = phi(x alpha_z(y)) continued to 0 <= Im z <= beta.
    cdouble two_point(const GroupWord& x, const GroupWord& y, cdouble z) const
    {
        return two_point_eig(to_eigenbasis(word_matrix(*rep, x)), to_eigenbasis(word_matrix(*rep, y)), z);
    }

    /// two_point with both operators already in the dynamics eigenbasis.
    cdouble two_point_eig(const CMatrix& a, const CMatrix& b, cdouble z) const
    {
        const double s = z.imag(), t = z.real();
        if (s < -1e-12 || s > beta + 1e-12) throw DomainError("Im z must lie in [0, beta]");
        const Eigen::Index n = h.size();
        Eigen::VectorXcd left(n), right(n);
        if (!perturbed) {
            // tr(A e^{(it - s)H} B e^{-(it + beta - s)H}) / Z: all real exponents <= 0.
            for (Eigen::Index k = 0; k < n; ++k) {
                left(k) = std::exp(cdouble(-s * h(k), t * h(k)));
                right(k) = std::exp(cdouble(-(beta - s) * h(k), -t * h(k)));
            }
            cdouble acc = 0;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) acc += a(j, i) * left(i) * b(i, j) * right(j);
            return acc / z_shifted;
        }
        // tr(A e^{(it - s)H} B e^{-(it - s)H} rho). Roundoff in rho is amplified
        // by e^{s max h}; past kMaxPerturbedGrowth the value is noise.
        if (s * h.maxCoeff() > kMaxPerturbedGrowth)
            throw DomainError("perturbed state: continuation to Im z = " + std::to_string(s) +
                              " is numerically unstable (s * spread(H) > " + std::to_string(kMaxPerturbedGrowth) + ")");
        for (Eigen::Index k = 0; k < n; ++k) {
            left(k) = std::exp(cdouble(-s * h(k), t * h(k)));
            right(k) = std::exp(cdouble(s * h(k), -t * h(k)));
        }
        const CMatrix ra = rho_eig * a;
        cdouble acc = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) acc += b(i, j) * right(j) * ra(j, i) * left(i);
        return acc;
    }
};

inline GibbsStateVal gibbs_state_with_density(std::shared_ptr<const TruncatedRep> rep, double beta, const CMatrix& hrho,
                                              bool perturbed)
{
    if (!(beta > 0) || !std::isfinite(beta)) throw DomainError("beta must be positive and finite");
    GibbsStateVal st;
    st.rep = rep;
    st.beta = beta;
    st.perturbed = perturbed;
    st.density_hamiltonian = hrho;
    Eigen::SelfAdjointEigenSolver<CMatrix> dyn(rep->hamiltonian);
    if (dyn.info() != Eigen::Success) throw SpectralError("dynamics hamiltonian eigensolver failed");
    st.V = dyn.eigenvectors();
    st.h = dyn.eigenvalues().array() - dyn.eigenvalues().minCoeff();
    Eigen::SelfAdjointEigenSolver<CMatrix> den(hrho);
    if (den.info() != Eigen::Success) throw SpectralError("density hamiltonian eigensolver failed");
    const double dmin = den.eigenvalues().minCoeff();
    const Eigen::VectorXd w = (-beta * (den.eigenvalues().array() - dmin)).exp();
    const double zs = w.sum();
    st.log_Z = std::log(zs) - beta * dmin;
    st.z_shifted = zs;
    st.rho = den.eigenvectors() * (w / zs).cast<cdouble>().asDiagonal() * den.eigenvectors().adjoint();
    st.rho_eig = st.to_eigenbasis(st.rho);
    return st;
}

inline GibbsStateVal gibbs_state(std::shared_ptr<const TruncatedRep> rep, double beta)
{
    if ((rep->family == RepFamily::Oscillator || rep->family == RepFamily::Heisenberg) && !(beta * rep->params.lambda > 0))
        throw DomainError("beta * lambda <= 0: e^{-beta H} is not trace class");
    return gibbs_state_with_density(rep, beta, rep->hamiltonian, false);
}

/// Negative control: H_rho = H + U diag(noise) U^dag with a seeded random
/// unitary U, so that H_rho neither equals nor commutes with H.
inline GibbsStateVal perturbed_state(const GibbsStateVal& st, double amplitude, std::uint64_t seed)
{
    const std::size_t n = st.rep->N;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    Eigen::VectorXd d(static_cast<Eigen::Index>(n));
    for (Eigen::Index k = 0; k < d.size(); ++k) d(k) = u(rng);
    const CMatrix q = random_unitary(n, seed + 1);
    const CMatrix hd = st.rep->hamiltonian + q * d.cast<cdouble>().asDiagonal() * q.adjoint();
    return gibbs_state_with_density(st.rep, st.beta, hd, true);
}

// ---------------------------------------------------------------------------
// States as convex combinations of Gibbs states under one dynamics.

struct KmsState {
    std::vector<GibbsStateVal> components;
    std::vector<double> weights;

    const LieAlgebra& algebra() const { return *components.front().rep->algebra; }
    const std::vector<double>& x_dyn() const { return components.front().rep->x_dyn; }
    double beta() const { return components.front().beta; }

    cdouble evaluate(const GroupWord& w) const
    {
        cdouble acc = 0;
        for (std::size_t k = 0; k < components.size(); ++k)
            if (weights[k] != 0) acc += weights[k] * components[k].evaluate(w);
        return acc;
    }
    cdouble two_point(const GroupWord& x, const GroupWord& y, cdouble z) const
    {
        cdouble acc = 0;
        for (std::size_t k = 0; k < components.size(); ++k)
            if (weights[k] != 0) acc += weights[k] * components[k].two_point(x, y, z);
        return acc;
    }
};

inline KmsState as_state(GibbsStateVal s) { return KmsState{{std::move(s)}, {1.0}}; }

inline KmsState mixture(std::vector<GibbsStateVal> states, std::vector<double> weights, double tol = 1e-12)
{
    if (states.empty() || states.size() != weights.size()) throw InputError("mixture: one weight per state required");
    double sum = 0;
    for (double w : weights) {
        if (!(w >= 0)) throw InputError("mixture: weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1) > tol) throw InputError("mixture: weights must sum to 1");
    const auto& first = *states.front().rep;
    for (const auto& s : states) {
        const auto& r = *s.rep;
        if (!(*r.algebra == *first.algebra) || r.x_dyn != first.x_dyn || s.beta != states.front().beta)
            throw InputError("mixture: states must share the algebra, the dynamics and beta");
    }
    return KmsState{std::move(states), std::move(weights)};
}

// ---------------------------------------------------------------------------
// Checks.

inline std::vector<double> default_t_grid(double lo = -5, double hi = 5, std::size_t points = 101)
{
    std::vector<double> g;
    for (std::size_t k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1));
    return g;
}

namespace detail {

/// Per-component data for two-point checks; the evolved word is the only
/// matrix rebuilt per grid point.
struct TwoPointPrep {
    CMatrix a_eig, b_eig;
    CMatrix x_rho;  // X rho: phi(M X) = sum M o (X rho)^T
    CMatrix rho_x;  // rho X: phi(X M) = sum M o (rho X)^T
};

inline std::vector<TwoPointPrep> prepare_two_point(const KmsState& st, const GroupWord& x, const GroupWord& y)
{
    std::vector<TwoPointPrep> out;
    for (const auto& c : st.components) {
        const CMatrix xm = word_matrix(*c.rep, x);
        out.push_back({c.to_eigenbasis(xm), c.to_eigenbasis(word_matrix(*c.rep, y)), xm * c.rho, c.rho * xm});
    }
    return out;
}

inline cdouble pair_trace(const CMatrix& m, const CMatrix& p) { return (m.cwiseProduct(p.transpose())).sum(); }

}  // namespace detail

/// max_t |F(t + i beta) - phi(alpha_t(y) x)|, the right side through the algebra.
inline double kms_reflection_check(const KmsState& st, const GroupWord& x, const GroupWord& y, const std::vector<double>& grid)
{
    const auto prep = detail::prepare_two_point(st, x, y);
    double worst = 0;
    for (double t : grid) {
        const GroupWord yt = evolve_word(st.algebra(), st.x_dyn(), y, t);
        cdouble diff = 0;
        for (std::size_t k = 0; k < st.components.size(); ++k) {
            if (st.weights[k] == 0) continue;
            const auto& c = st.components[k];
            const cdouble f = c.two_point_eig(prep[k].a_eig, prep[k].b_eig, cdouble(t, c.beta));
            const cdouble g = detail::pair_trace(word_matrix(*c.rep, yt), prep[k].x_rho);
            diff += st.weights[k] * (f - g);
        }
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

/// max_t |F(t) - phi(x alpha_t(y))|: functional calculus against the algebra route.
inline double real_line_check(const KmsState& st, const GroupWord& x, const GroupWord& y, const std::vector<double>& grid)
{
    const auto prep = detail::prepare_two_point(st, x, y);
    double worst = 0;
    for (double t : grid) {
        const GroupWord yt = evolve_word(st.algebra(), st.x_dyn(), y, t);
        cdouble diff = 0;
        for (std::size_t k = 0; k < st.components.size(); ++k) {
            if (st.weights[k] == 0) continue;
            const auto& c = st.components[k];
            const cdouble f = c.two_point_eig(prep[k].a_eig, prep[k].b_eig, cdouble(t, 0));
            const cdouble g = detail::pair_trace(word_matrix(*c.rep, yt), prep[k].rho_x);
            diff += st.weights[k] * (f - g);
        }
        worst = std::max(worst, std::abs(diff));
    }
    return worst;
}

inline double invariance_check(const KmsState& st, const GroupWord& g, const std::vector<double>& grid)
{
    const cdouble base = st.evaluate(g);
    double worst = 0;
    for (double t : grid) worst = std::max(worst, std::abs(st.evaluate(evolve_word(st.algebra(), st.x_dyn(), g, t)) - base));
    return worst;
}

namespace detail {

inline double min_hermitian_eigenvalue(const CMatrix& gram)
{
    const CMatrix herm = 0.5 * (gram + gram.adjoint());
    return Eigen::SelfAdjointEigenSolver<CMatrix>(herm, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace detail

/// Min eigenvalue of the hermitian part of G_ij = f(w_i^{-1} w_j).
inline double positive_definiteness_check(const std::function<cdouble(const GroupWord&)>& f, const std::vector<GroupWord>& words)
{
    const auto n = static_cast<Eigen::Index>(words.size());
    if (n == 0) throw InputError("positive_definiteness_check needs at least one word");
    CMatrix gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            gram(i, j) = f(concat(inverse(words[static_cast<std::size_t>(i)]), words[static_cast<std::size_t>(j)]));
    return detail::min_hermitian_eigenvalue(gram);
}

/// State overload: pi(w_i^{-1} w_j) = pi(w_i^{-1}) pi(w_j) with one matrix per word and inverse.
inline double positive_definiteness_check(const KmsState& st, const std::vector<GroupWord>& words)
{
    const auto n = static_cast<Eigen::Index>(words.size());
    if (n == 0) throw InputError("positive_definiteness_check needs at least one word");
    CMatrix gram = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < st.components.size(); ++k) {
        if (st.weights[k] == 0) continue;
        const auto& c = st.components[k];
        std::vector<CMatrix> inv, fwd;
        for (const auto& w : words) {
            inv.push_back(word_matrix(*c.rep, inverse(w)));
            fwd.push_back(word_matrix(*c.rep, w) * c.rho);
        }
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                gram(i, j) += st.weights[k] * detail::pair_trace(inv[static_cast<std::size_t>(i)], fwd[static_cast<std::size_t>(j)]);
    }
    return detail::min_hermitian_eigenvalue(gram);
}

/// Negative control: Z * phi(g) - 1/2 at the identity; not a state.
inline std::function<cdouble(const GroupWord&)> non_state_control(const GibbsStateVal& st)
{
    return [&st](const GroupWord& w) {
        const CMatrix m = word_matrix(*st.rep, w);
        const auto n = m.rows();
        const bool identity = (m - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12;
        return st.Z() * st.evaluate_matrix(m) - (identity ? 0.5 : 0.0);
    };
}

inline std::vector<GroupWord> random_words(const LieAlgebra& g, std::size_t count, std::size_t letters, double max_time,
                                           std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1), t(-max_time, max_time);
    std::vector<GroupWord> out;
    for (std::size_t k = 0; k < count; ++k) {
        GroupWord w;
        for (std::size_t l = 0; l < letters; ++l) {
            Letter le;
            for (std::size_t i = 0; i < g.dim(); ++i) le.y.push_back(u(rng));
            le.time = t(rng);
            w.push_back(le);
        }
        out.push_back(w);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Displacement operators of the Schroedinger representation.

/// pi_lambda(a, b, 0) = e^{i lambda b x} e^{a d/dx} as the word exp(b dpi(q)) exp(a dpi(p)),
/// exponentiated at size N + pad and cropped to N x N.
inline CMatrix displacement_matrix(double lambda, double a, double b, std::size_t N, std::size_t pad = 64)
{
    const TruncatedRep r = build_truncated_rep(RepFamily::Heisenberg, RepParams{lambda, 1}, N + pad);
    const CMatrix m = word_matrix(r, {Letter{{0, 1, 0, 0}, b}, Letter{{1, 0, 0, 0}, a}});
    return m.topLeftCorner(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
}

namespace detail {

/// Generalized Laguerre L_n^{(k)}(x) by the three-term recurrence.
inline long double laguerre(std::size_t n, long double k, long double x)
{
    long double prev = 1, cur = 1 + k - x;
    if (n == 0) return prev;
    for (std::size_t i = 1; i < n; ++i) {
        const long double next = ((2 * i + 1 + k - x) * cur - (i + k) * prev) / (i + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace detail

/// Closed form: pi_lambda(a, b, 0) = e^{-i lambda a b / 2} D(alpha),
/// alpha = sqrt(lambda / 2) (-a + i b), with the Laguerre matrix elements of D.
inline CMatrix displacement_closed_form(double lambda, double a, double b, std::size_t N)
{
    const std::complex<long double> alpha =
        std::sqrt(static_cast<long double>(lambda) / 2) * std::complex<long double>(-a, b);
    const long double x = std::norm(alpha);
    const long double r = std::sqrt(x);
    const std::complex<long double> phase = std::exp(std::complex<long double>(0, -lambda * a * b / 2));
    CMatrix d(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
    for (std::size_t m = 0; m < N; ++m)
        for (std::size_t n = 0; n < N; ++n) {
            const std::size_t lo = std::min(m, n), hi = std::max(m, n), k = hi - lo;
            std::complex<long double> v;
            if (r == 0) {
                v = m == n ? 1 : 0;
            } else {
                // sqrt(lo!/hi!) |alpha|^k e^{-|alpha|^2/2} L_lo^{(k)}(|alpha|^2), in logs.
                const long double mag = std::exp(0.5L * (std::lgamma(static_cast<long double>(lo) + 1) -
                                                         std::lgamma(static_cast<long double>(hi) + 1)) +
                                                 static_cast<long double>(k) * std::log(r) - x / 2);
                const std::complex<long double> unit = alpha / r;
                const std::complex<long double> dir = m >= n ? std::pow(unit, static_cast<int>(k))
                                                             : std::pow(-std::conj(unit), static_cast<int>(k));
                v = mag * detail::laguerre(lo, static_cast<long double>(k), x) * dir;
            }
            v *= phase;
            d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n)) = cdouble(static_cast<double>(v.real()), static_cast<double>(v.imag()));
        }
    return d;
}

}  // namespace gibbslie
