#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "gibbslie/gibbs_kms.hpp"
#include "oracles.hpp"

using namespace gibbslie;
using oracle::quadrature_displacement;

namespace {

std::shared_ptr<const TruncatedRep> rep(RepFamily f, RepParams p, std::size_t n)
{
    return std::make_shared<const TruncatedRep>(build_truncated_rep(f, p, n));
}

GroupWord letter(std::size_t dim, std::size_t i, double t)
{
    std::vector<double> y(dim, 0.0);
    y[i] = 1;
    return {Letter{y, t}};
}

double mean_occupation(double beta_lambda) { return 1 / std::expm1(beta_lambda); }

}  // namespace

// ---------------------------------------------------------------------------
// Truncated representations.

TEST(TruncatedRep, Su2IsExact)
{
    for (int two_j : {1, 2, 3, 6}) {
        const auto r = build_truncated_rep(RepFamily::Su2Irrep, {1, two_j}, 0);
        EXPECT_EQ(r.N, static_cast<std::size_t>(two_j + 1));
        EXPECT_LE(r.residual, 1e-13);
        EXPECT_LE(r.leakage, 1e-13);
        for (const auto& g : r.generators) EXPECT_LE((g + g.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    }
}

TEST(TruncatedRep, OscillatorHamiltonianAndLeakage)
{
    const auto r = build_truncated_rep(RepFamily::Oscillator, {1.5, 1}, 64);
    for (Eigen::Index k = 0; k < 64; ++k)
        EXPECT_NEAR(r.hamiltonian(k, k).real(), 1.5 * (static_cast<double>(k) + 0.5), 1e-14);
    EXPECT_LE((r.hamiltonian - CMatrix(r.hamiltonian.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE(r.residual, 1e-12);
    // [P, Q] = -i fails at the cutoff: the last diagonal entry carries N.
    EXPECT_GT(r.leakage, 1.0);
}

TEST(TruncatedRep, Sl2LowestWeightResidual)
{
    const auto r = build_truncated_rep(RepFamily::Sl2Lowest, {0.75, 1}, 40);
    EXPECT_LE(r.residual, 1e-11);
    EXPECT_GT(r.leakage, 1.0);
    EXPECT_NEAR(r.hamiltonian(0, 0).real(), 0.75, 1e-15);
}

TEST(TruncatedRep, DomainErrors)
{
    EXPECT_THROW(build_truncated_rep(RepFamily::Su2Irrep, {1, 0}, 0), DomainError);
    EXPECT_THROW(build_truncated_rep(RepFamily::Su2Irrep, {1, 2}, 5), DimensionMismatch);
    EXPECT_THROW(build_truncated_rep(RepFamily::Oscillator, {1, 1}, 1), DomainError);
    EXPECT_THROW(build_truncated_rep(RepFamily::Heisenberg, {-1, 1}, 8), DomainError);
    EXPECT_THROW(build_truncated_rep(RepFamily::Sl2Lowest, {0, 1}, 8), DomainError);
    EXPECT_THROW(parse_rep_family("so3"), InputError);
    EXPECT_EQ(parse_rep_family("su2"), RepFamily::Su2Irrep);
}

// ---------------------------------------------------------------------------
// Heisenberg matrix elements.

TEST(Displacement, MatchesLaguerreClosedForm)
{
    for (double lambda : {0.5, 1.0, 2.0})
        for (auto [a, b] : {std::pair{0.3, -0.8}, std::pair{-1.0, 0.5}, std::pair{0.0, 0.9}}) {
            const CMatrix m = displacement_matrix(lambda, a, b, 64);
            const CMatrix c = displacement_closed_form(lambda, a, b, 64);
            EXPECT_LE((m - c).cwiseAbs().maxCoeff(), 1e-10) << lambda << " " << a << " " << b;
        }
}

TEST(Displacement, MatchesQuadratureOracle)
{
    for (double lambda : {0.7, 1.3})
        for (auto [a, b] : {std::pair{0.4, -0.6}, std::pair{-0.9, 0.2}}) {
            const CMatrix m = displacement_matrix(lambda, a, b, 8);
            const CMatrix q = quadrature_displacement(lambda, a, b, 8);
            EXPECT_LE((m - q).cwiseAbs().maxCoeff(), 1e-8) << lambda << " " << a << " " << b;
        }
}

TEST(Displacement, ClosedFormIsUnitaryOnLowBlock)
{
    const CMatrix c = displacement_closed_form(1.0, 0.5, 0.5, 200);
    const CMatrix p = c.adjoint() * c;
    EXPECT_LE((p.topLeftCorner(40, 40) - CMatrix::Identity(40, 40)).cwiseAbs().maxCoeff(), 1e-12);
}

// ---------------------------------------------------------------------------
// Gibbs states.

TEST(GibbsState, NormalizedAtIdentity)
{
    const auto st = gibbs_state(rep(RepFamily::Su2Irrep, {1, 3}, 0), 0.8);
    EXPECT_NEAR(std::abs(st.evaluate({}) - cdouble(1, 0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(st.evaluate(letter(3, 0, 0.0)) - cdouble(1, 0)), 0, 1e-15);
}

TEST(GibbsState, Su2SpinHalfClosedForm)
{
    for (double beta : {0.3, 1.0, 2.5}) {
        const auto st = gibbs_state(rep(RepFamily::Su2Irrep, {1, 1}, 0), beta);
        for (double th : {-2.0, 0.4, 1.7}) {
            const cdouble expect(std::cos(th / 2), -std::sin(th / 2) * std::tanh(beta / 2));
            EXPECT_NEAR(std::abs(st.evaluate(letter(3, 2, th)) - expect), 0, 1e-14);
        }
    }
}

TEST(GibbsState, Su2PartitionFunction)
{
    const auto st = gibbs_state(rep(RepFamily::Su2Irrep, {1, 2}, 0), 1.2);
    EXPECT_NEAR(st.Z(), std::exp(1.2) + 1 + std::exp(-1.2), 1e-12);
}

TEST(GibbsState, OscillatorThermalDisplacement)
{
    for (double bl : {0.5, 1.0, 3.0}) {
        const double lambda = 1.0, beta = bl / lambda;
        const auto r = rep(RepFamily::Oscillator, {lambda, 1}, 256);
        const auto st = gibbs_state(r, beta);
        const double a = 0.7, b = -0.4;
        const GroupWord w = {Letter{{1, 0, 0, 0}, a}, Letter{{0, 1, 0, 0}, b}};
        const double nbar = mean_occupation(bl);
        const cdouble expect = std::exp(cdouble(0, a * b / 2)) * std::exp(-(a * a + b * b) * (2 * nbar + 1) / 4);
        EXPECT_NEAR(std::abs(st.evaluate(w) - expect), 0, 1e-8) << bl;

        // Second route: Boltzmann-weighted Laguerre diagonal of the closed form.
        const CMatrix d = displacement_closed_form(1.0, b, a, 256);
        cdouble sum = 0;
        const double q = std::exp(-bl);
        for (Eigen::Index n = 0; n < 256; ++n) sum += (1 - q) * std::pow(q, static_cast<double>(n)) * d(n, n);
        const GroupWord w2 = {Letter{{0, 1, 0, 0}, a}, Letter{{1, 0, 0, 0}, b}};
        EXPECT_NEAR(std::abs(st.evaluate(w2) - sum), 0, 1e-8) << bl;
    }
}

TEST(GibbsState, OscillatorRefusesNonPositiveBetaLambda)
{
    EXPECT_THROW(gibbs_state(rep(RepFamily::Oscillator, {-1.0, 1}, 16), 1.0), DomainError);
    EXPECT_THROW(gibbs_state(rep(RepFamily::Su2Irrep, {1, 1}, 0), 0.0), DomainError);
}

TEST(GibbsState, UnitaryConjugationInvariance)
{
    const auto r = rep(RepFamily::Oscillator, {1.0, 1}, 48);
    const auto rc = std::make_shared<const TruncatedRep>(conjugate_rep(*r, random_unitary(48, 7)));
    const auto s1 = gibbs_state(r, 0.9), s2 = gibbs_state(rc, 0.9);
    for (const auto& w : random_words(*r->algebra, 5, 2, 0.8, 11))
        EXPECT_NEAR(std::abs(s1.evaluate(w) - s2.evaluate(w)), 0, 1e-11);
}

TEST(TwoPoint, BoundaryValuesAndDomain)
{
    const auto st = gibbs_state(rep(RepFamily::Su2Irrep, {1, 2}, 0), 0.7);
    const auto ws = random_words(*st.rep->algebra, 2, 2, 1.0, 3);
    EXPECT_NEAR(std::abs(st.two_point(ws[0], ws[1], 0) - st.evaluate(concat(ws[0], ws[1]))), 0, 1e-13);
    EXPECT_NEAR(std::abs(st.two_point({}, {}, cdouble(1.3, 0.4)) - cdouble(1, 0)), 0, 1e-13);
    EXPECT_THROW(st.two_point(ws[0], ws[1], cdouble(0, 0.8)), DomainError);
    EXPECT_THROW(st.two_point(ws[0], ws[1], cdouble(0, -0.1)), DomainError);
}

// ---------------------------------------------------------------------------
// KMS checks.

TEST(Kms, RealLineRoutesAgree)
{
    for (int two_j : {1, 2}) {
        const auto st = as_state(gibbs_state(rep(RepFamily::Su2Irrep, {1, two_j}, 0), 1.1));
        const auto ws = random_words(st.algebra(), 2, 3, 1.0, 5);
        EXPECT_LE(real_line_check(st, ws[0], ws[1], default_t_grid()), 1e-12);
    }
}

TEST(Kms, Su2Reflection)
{
    for (int two_j : {1, 2})
        for (double beta : {0.5, 2.0}) {
            const auto st = as_state(gibbs_state(rep(RepFamily::Su2Irrep, {1, two_j}, 0), beta));
            const auto ws = random_words(st.algebra(), 4, 2, 1.0, 17);
            EXPECT_LE(kms_reflection_check(st, ws[0], ws[1], default_t_grid()), 1e-10);
            EXPECT_LE(kms_reflection_check(st, ws[2], ws[3], default_t_grid()), 1e-10);
            EXPECT_LE(invariance_check(st, ws[0], default_t_grid()), 1e-10);
        }
}

TEST(Kms, OscillatorTruncationStable)
{
    const GroupWord x = {Letter{{0.6, -0.3, 0.2, 0}, 1.0}};
    const GroupWord y = {Letter{{-0.4, 0.8, 0, 0.5}, 1.0}};
    const auto grid = default_t_grid(-5, 5, 21);
    double r128 = 0, r256 = 0;
    cdouble f128, f256;
    for (std::size_t n : {std::size_t{128}, std::size_t{256}}) {
        const auto st = as_state(gibbs_state(rep(RepFamily::Oscillator, {1.0, 1}, n), 0.5));
        const double res = kms_reflection_check(st, x, y, grid);
        EXPECT_LE(res, 1e-8) << n;
        (n == 128 ? r128 : r256) = res;
        (n == 128 ? f128 : f256) = st.two_point(x, y, cdouble(0.7, 0.25));
    }
    EXPECT_NEAR(std::abs(f128 - f256), 0, 1e-8);
    EXPECT_NEAR(r128, r256, 1e-8);
}

TEST(Kms, PerturbedStateFailsReflectionAndInvariance)
{
    const auto base = gibbs_state(rep(RepFamily::Su2Irrep, {1, 2}, 0), 1.0);
    const auto st = as_state(perturbed_state(base, 0.5, 9));
    const auto ws = random_words(st.algebra(), 2, 2, 1.0, 19);
    EXPECT_GT(kms_reflection_check(st, ws[0], ws[1], default_t_grid()), 1e-3);
    EXPECT_GT(invariance_check(st, ws[0], default_t_grid()), 1e-3);
    // The functional-calculus route still tracks the algebra route for the perturbed density.
    EXPECT_LE(real_line_check(st, ws[0], ws[1], default_t_grid()), 1e-12);
}

TEST(Kms, PositiveDefiniteness)
{
    const auto g = gibbs_state(rep(RepFamily::Su2Irrep, {1, 1}, 0), 1.0);
    const auto st = as_state(g);
    const auto ws = random_words(st.algebra(), 8, 2, 1.5, 23);
    EXPECT_NEAR(positive_definiteness_check(st, {ws[0]}), 1.0, 1e-13);
    EXPECT_GE(positive_definiteness_check(st, ws), -1e-10);
    // The state overload and the generic word route produce the same Gram spectrum.
    EXPECT_NEAR(positive_definiteness_check(st, ws),
                positive_definiteness_check([&](const GroupWord& w) { return st.evaluate(w); }, ws), 1e-12);
    // Rank <= 4 Gram: the -1/2 shift on the diagonal shows through.
    EXPECT_LT(positive_definiteness_check(non_state_control(g), ws), -0.1);
    EXPECT_THROW(positive_definiteness_check(st, {}), InputError);
}

// ---------------------------------------------------------------------------
// Mixtures.

TEST(Mixture, TrivialAndHalfHalf)
{
    const auto r = rep(RepFamily::Su2Irrep, {1, 1}, 0);
    const auto r2 = rep(RepFamily::Su2Irrep, {1, 2}, 0);
    const auto s1 = gibbs_state(r, 1.3), s2 = gibbs_state(r2, 1.3);
    const auto ws = random_words(*r->algebra, 8, 2, 1.0, 29);

    const auto trivial = mixture({s1, s2}, {1.0, 0.0});
    for (const auto& w : ws) EXPECT_EQ(trivial.evaluate(w), s1.evaluate(w));

    const auto half = mixture({s1, s2}, {0.5, 0.5});
    const auto grid = default_t_grid();
    EXPECT_LE(kms_reflection_check(half, ws[0], ws[1], grid), 1e-9);
    EXPECT_LE(invariance_check(half, ws[2], grid), 1e-10);
    EXPECT_GE(positive_definiteness_check(half, ws), -1e-10);

    const auto m37 = mixture({s1, s2}, {0.3, 0.7}), m73 = mixture({s1, s2}, {0.7, 0.3});
    EXPECT_GT(std::abs(m37.evaluate(ws[0]) - m73.evaluate(ws[0])), 1e-3);
}

TEST(Mixture, Errors)
{
    const auto s1 = gibbs_state(rep(RepFamily::Su2Irrep, {1, 1}, 0), 1.0);
    const auto s2 = gibbs_state(rep(RepFamily::Su2Irrep, {1, 1}, 0), 2.0);
    const auto s3 = gibbs_state(rep(RepFamily::Oscillator, {1, 1}, 8), 1.0);
    EXPECT_THROW(mixture({s1, s1}, {0.5, 0.6}), InputError);
    EXPECT_THROW(mixture({s1, s1}, {-0.5, 1.5}), InputError);
    EXPECT_THROW(mixture({s1}, {0.5, 0.5}), InputError);
    EXPECT_THROW(mixture({s1, s2}, {0.5, 0.5}), InputError);
    EXPECT_THROW(mixture({s1, s3}, {0.5, 0.5}), InputError);
}

TEST(Words, SpectralExponentialMatchesPade)
{
    // Tridiagonal gauge route and the dense hermitian route against Eigen's scaling and squaring.
    const auto r = build_truncated_rep(RepFamily::Sl2Lowest, {0.5, 1}, 30);
    const CMatrix a = 0.7 * r.dpi({0.3, -1.1, 0.8});
    EXPECT_LE((detail::exp_skew_hermitian(a) - CMatrix(a.exp())).cwiseAbs().maxCoeff(), 1e-11);
    const CMatrix u = random_unitary(30, 5);
    const CMatrix b = u * a * u.adjoint();
    EXPECT_FALSE(detail::is_tridiagonal(b));
    EXPECT_LE((detail::exp_skew_hermitian(b) - CMatrix(b.exp())).cwiseAbs().maxCoeff(), 1e-11);
}
