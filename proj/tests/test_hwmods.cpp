#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gibbslie/hwmods.hpp"
#include "gibbslie/library.hpp"
#include "gibbslie/parse.hpp"

using namespace gibbslie;

namespace {

RootDatum decompose(const LieAlgebra& g, const char* cartan) { return root_decomposition(g, parse_subspace(g, cartan)); }

const std::vector<IntVec> kA2 = {{1, 0}, {0, 1}, {1, 1}};

}  // namespace

TEST(Kostant, Examples)
{
    const std::vector<IntVec> sl2 = {{1}};
    for (long k = 0; k <= 30; ++k) EXPECT_EQ(kostant_partition(sl2, {k}), 1);
    EXPECT_EQ(kostant_partition(kA2, {0, 0}), 1);
    EXPECT_EQ(kostant_partition(kA2, {1, 1}), 2);
    EXPECT_EQ(kostant_partition(kA2, {-1, 2}), 0);
    EXPECT_THROW(kostant_partition(sl2, {31}), BoundExceeded);
    EXPECT_THROW(kostant_partition(std::vector<IntVec>(13, IntVec{1}), {1}), BoundExceeded);
    EXPECT_THROW(kostant_partition({{0, 0}}, {1, 1}), InputError);
}

TEST(Kostant, A2ClosedForm)
{
    // Oracle: choose k <= min(a, b) copies of alpha+beta; the rest is forced.
    for (long a = 0; a <= 8; ++a)
        for (long b = 0; b <= 8; ++b) EXPECT_EQ(kostant_partition(kA2, {a, b}), std::min(a, b) + 1);
}

TEST(Kostant, BruteForceEqualsProductFormula)
{
    const std::vector<std::vector<IntVec>> systems = {
        {{1}},
        kA2,
        {{1}, {2}},                                  // Jacobi algebra: Heisenberg and sp(2) roots
        {{1, 0}, {0, 1}},                            // su(2) + sl(2)
        {{1, 0}, {0, 1}, {1, 1}, {1, 2}},            // B2 positive roots
        {{1, 0}, {0, 1}, {1, 1}, {1, 1}},            // multiplicity two on alpha+beta
    };
    for (const auto& sys : systems) {
        const std::size_t rank = sys[0].size();
        for (const auto& [beta, p] : product_formula_coefficients(sys, rank, 10)) EXPECT_EQ(kostant_partition(sys, beta), p);
    }
}

TEST(Kostant, LatticeCoordinatesOfBundledSystems)
{
    LieAlgebra hsp = library::jacobi();
    RootDatum d = decompose(hsp, "z,p2+q2");
    PositiveSystem s = positive_system(d, parse_expression(hsp, "z+p2+q2"));
    std::vector<QVector> f;
    for (auto i : s.positive) f.push_back(d.roots[i].rho);
    LatticeCoordinates lc = lattice_coordinates(f, s.regular);
    ASSERT_EQ(lc.simple.size(), 1u);
    EXPECT_EQ(lc.simple[0], (QVector{0, 2}));
    std::vector<long> heights;
    for (const auto& c : lc.coords) heights.push_back(c[0]);
    std::sort(heights.begin(), heights.end());
    EXPECT_EQ(heights, (std::vector<long>{1, 2}));
    for (const auto& [beta, p] : product_formula_coefficients(lc.coords, 1, 10))
        EXPECT_EQ(kostant_partition(lc.coords, beta), p);
}

TEST(VermaTrace, Sl2GeometricSeries)
{
    LieAlgebra sl2 = library::sl2r();
    RootDatum d = decompose(sl2, "e-f");
    PositiveSystem s = positive_system(d, parse_expression(sl2, "e-f"));
    for (long m : {0L, 1L, 3L}) {
        WeightModule mod = sl2_highest_weight_module(d, s, {Rational(-m)});
        for (double theta : {0.3, 0.7, 1.5}) {
            QVector x{Rational(theta)};
            TraceResult r = module_trace(mod, x);
            const double closed = std::exp(-m * theta) / (1 - std::exp(-2 * theta));
            ASSERT_TRUE(r.value && r.closed_form);
            EXPECT_NEAR(r.value->real(), closed, 1e-10);
            EXPECT_NEAR(r.closed_form->real(), closed, 1e-12);
            EXPECT_TRUE(r.converged);
            EXPECT_LT(r.ratio, 1);
            EXPECT_EQ(r.partial_sums.size(), 201u);
        }
        TraceResult b = module_trace(mod, {0});
        EXPECT_TRUE(b.divergent);
        EXPECT_FALSE(b.value);
        EXPECT_FALSE(trace_class_test(mod, {0}));
        EXPECT_FALSE(trace_class_test(mod, {-1}));
        EXPECT_TRUE(trace_class_test(mod, {1}));
    }
}

TEST(VermaTrace, PartialSumsMonotoneAndBounded)
{
    LieAlgebra g = direct_sum(library::su2(), library::sl2r());
    RootDatum d = decompose(g, "e3,e-f");
    PositiveSystem s = positive_system(d, QVector{Rational(-10), Rational(1)});
    WeightModule mod = verma_module(d, s, {Rational(1, 2), Rational(-1)});
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int t = 0; t < 10; ++t) {
        // Positive on both positive roots of this system: first coordinate negative.
        QVector x{Rational(-u(rng)), Rational(u(rng))};
        TraceResult r = module_trace(mod, x);
        ASSERT_FALSE(r.divergent);
        for (std::size_t k = 1; k < r.partial_sums.size(); ++k)
            EXPECT_GE(r.partial_sums[k].real(), r.partial_sums[k - 1].real());
        EXPECT_LE(r.partial_sums.back().real(), r.closed_form->real() * (1 + 1e-12));
    }
}

TEST(VermaTrace, HighestWeightHasMultiplicityOne)
{
    for (const auto& sys : std::vector<std::vector<IntVec>>{{{1}}, kA2, {{1}, {2}}})
        EXPECT_EQ(product_formula_coefficients(sys, sys[0].size(), 5).at(IntVec(sys[0].size(), 0)), 1);
}

TEST(VermaTrace, DecisionIndependentOfDepth)
{
    LieAlgebra sl2 = library::sl2r();
    RootDatum d = decompose(sl2, "e-f");
    PositiveSystem s = positive_system(d, parse_expression(sl2, "e-f"));
    WeightModule mod = sl2_highest_weight_module(d, s, {Rational(-2)});
    for (Rational theta : {Rational(1, 50), Rational(1, 2), Rational(0), Rational(-1, 3)}) {
        bool first = trace_class_test(mod, {theta});
        for (long depth : {20L, 150L, 400L}) {
            mod.truncation_depth = depth;
            EXPECT_EQ(trace_class_test(mod, {theta}), first);
        }
    }
}

TEST(Su2Character, Examples)
{
    TraceResult r = su2_character_trace(1, M_PI);
    EXPECT_NEAR(std::abs(*r.value), 0, 1e-12);
    EXPECT_NEAR(std::abs(*r.closed_form), 0, 1e-12);
    EXPECT_NEAR(su2_character_trace(2, M_PI / 2).value->real(), 1, 1e-12);
    for (int two_j = 0; two_j <= 50; ++two_j) {
        EXPECT_NEAR(su2_character_trace(two_j, 0).value->real(), two_j + 1, 1e-12);
        EXPECT_NEAR(su2_character_trace(two_j, 0).closed_form->real(), two_j + 1, 1e-12);
        for (double theta : {0.4, 2.1, -1.3, 2 * M_PI, 4 * M_PI}) {
            TraceResult a = su2_character_trace(two_j, theta);
            EXPECT_NEAR(std::abs(*a.value - *a.closed_form), 0, 1e-9) << two_j << " " << theta;
            TraceResult b = su2_character_trace(two_j, -theta);
            EXPECT_NEAR(std::abs(*b.value - std::conj(*a.value)), 0, 1e-12);
        }
    }
    EXPECT_THROW(su2_character_trace(51, 0.1), DomainError);
}

TEST(OscillatorTrace, Examples)
{
    TraceResult r = oscillator_trace(1.0, 1.0);
    // e^{-1/2} = 0.6065307, 1 - e^{-1} = 0.6321206.
    EXPECT_NEAR(r.value->real(), 0.9595174, 1e-7);
    EXPECT_NEAR(r.value->real(), std::exp(-0.5) / (1 - std::exp(-1.0)), 1e-12);
    TraceResult big = oscillator_trace(25.0, 2.0);
    EXPECT_NEAR(big.value->real() / std::exp(-25.0), 1, 1e-12 + std::exp(-50.0) * 2);
    TraceResult bad = oscillator_trace(-1.0, 1.0);
    EXPECT_TRUE(bad.divergent);
    EXPECT_FALSE(bad.value);
    for (double bl : {0.5, 1.0, 2.0, 5.0}) {
        TraceResult t = oscillator_trace(bl, 1.0, 200);
        EXPECT_NEAR(t.value->real(), std::exp(-bl / 2) / (1 - std::exp(-bl)), 1e-10);
        EXPECT_TRUE(t.converged);
    }
}

TEST(TraceClass, Su2FiniteAndJacobiOscillator)
{
    LieAlgebra su2 = library::su2();
    RootDatum d = decompose(su2, "e3");
    for (const auto& s : enumerate_positive_systems(d)) {
        WeightModule m = su2_irrep_module(d, s, 3);
        EXPECT_EQ(m.finite_weights.size(), 4u);
        for (Rational x : {Rational(-3), Rational(0), Rational(5, 2)}) EXPECT_TRUE(trace_class_test(m, {x}));
        // sum_{m} e^{m x} at x = 1 for j = 3/2.
        double expect = 0;
        for (double mm : {-1.5, -0.5, 0.5, 1.5}) expect += std::exp(mm);
        EXPECT_NEAR(module_trace(m, {1}).value->real(), expect, 1e-12);
    }

    LieAlgebra hsp = library::jacobi();
    RootDatum j = decompose(hsp, "z,p2+q2");
    PositiveSystem s = positive_system(j, parse_expression(hsp, "z+p2+q2"));
    WeightModule osc = oscillator_module(j, s, {Rational(1), Rational(-1)});
    EXPECT_EQ(osc.lowering.size(), 1u);
    EXPECT_TRUE(trace_class_test(osc, j.t_coords(parse_expression(hsp, "z+p2+q2"))));
    EXPECT_FALSE(trace_class_test(osc, j.t_coords(parse_expression(hsp, "z-p2-q2"))));
    EXPECT_FALSE(trace_class_test(osc, j.t_coords(parse_expression(hsp, "z"))));
    EXPECT_THROW(j.t_coords(parse_expression(hsp, "p2-q2")), DomainError);
    // The weight series is geometric in e^{-2b} for x = a z + b (p2+q2).
    TraceResult r = module_trace(osc, {Rational(1, 2), Rational(3, 4)});
    EXPECT_NEAR(r.value->real(), std::exp(0.5 - 0.75) / (1 - std::exp(-1.5)), 1e-10);
}

TEST(TraceClass, AgreesWithCMaxInteriorOnGrids)
{
    std::vector<QVector> line, plane;
    for (int k = -12; k <= 12; ++k) line.push_back({Rational(k, 4)});
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) plane.push_back({Rational(a, 2), Rational(b, 3)});

    LieAlgebra sl2 = library::sl2r();
    RootDatum d = decompose(sl2, "e-f");
    for (const auto& s : enumerate_positive_systems(d)) {
        auto c = compare_trace_with_c_max(d, sl2_highest_weight_module(d, s, {Rational(-1)}), line);
        EXPECT_EQ(c.agreements, c.points);
        EXPECT_TRUE(c.discrepancies.empty() && c.compact_root_caveat.empty());
    }
    LieAlgebra hsp = library::jacobi();
    RootDatum j = decompose(hsp, "z,p2+q2");
    for (const auto& s : enumerate_positive_systems(j)) {
        auto c = compare_trace_with_c_max(j, oscillator_module(j, s, {Rational(0), Rational(-1)}), plane);
        EXPECT_EQ(c.agreements, c.points);
    }
}

TEST(TraceClass, CompactRootCaveatIsReportedSeparately)
{
    // su(2) + sl(2): the Verma character also needs the compact positive root to decay.
    LieAlgebra g = direct_sum(library::su2(), library::sl2r());
    RootDatum d = decompose(g, "e3,e-f");
    PositiveSystem s = positive_system(d, QVector{Rational(-10), Rational(1)});
    WeightModule m = verma_module(d, s, {Rational(0), Rational(-1)});
    auto c = compare_trace_with_c_max(d, m, {{Rational(-1), Rational(1)}, {Rational(1), Rational(1)}});
    EXPECT_EQ(c.agreements, 1u);
    ASSERT_EQ(c.compact_root_caveat.size(), 1u);
    EXPECT_EQ(c.compact_root_caveat[0], (QVector{Rational(1), Rational(1)}));
    EXPECT_TRUE(c.discrepancies.empty());
}

TEST(TraceClass, ImpliesCompInterior)
{
    std::vector<QVector> line, plane;
    for (int k = -6; k <= 6; ++k) line.push_back({Rational(k, 3)});
    for (int a = -2; a <= 2; ++a)
        for (int b = -2; b <= 2; ++b) plane.push_back({Rational(a), Rational(b, 2)});
    LieAlgebra sl2 = library::sl2r();
    RootDatum d = decompose(sl2, "e-f");
    LieAlgebra su2 = library::su2();
    RootDatum e = decompose(su2, "e3");
    LieAlgebra hsp = library::jacobi();
    RootDatum j = decompose(hsp, "z,p2+q2");
    std::size_t checked = 0;
    auto run = [&](const LieAlgebra& alg, const RootDatum& datum, const WeightModule& m, const std::vector<QVector>& grid) {
        for (const auto& x : grid) {
            if (!trace_class_test(m, x)) continue;
            ++checked;
            EXPECT_TRUE(comp_interior_member(alg, datum.t().from_coordinates(x)).verdict);
        }
    };
    for (const auto& s : enumerate_positive_systems(d)) run(sl2, d, sl2_highest_weight_module(d, s, {Rational(-1)}), line);
    for (const auto& s : enumerate_positive_systems(e)) run(su2, e, su2_irrep_module(e, s, 2), line);
    for (const auto& s : enumerate_positive_systems(j)) run(hsp, j, oscillator_module(j, s, {Rational(1), Rational(-1)}), plane);
    EXPECT_GT(checked, 20u);
}
