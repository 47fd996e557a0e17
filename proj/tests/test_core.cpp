#include <random>

#include <gtest/gtest.h>

#include "gibbslie/library.hpp"
#include "gibbslie/parse.hpp"
#include "gibbslie/simplex.hpp"

using namespace gibbslie;

namespace {

Element elem(const LieAlgebra& g, const char* s) { return parse_expression(g, s); }

Element random_element(const LieAlgebra& g, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-9, 9), den(1, 5);
    QVector v;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        Rational r(num(rng), den(rng));
        r.canonicalize();
        v.push_back(r);
    }
    return Element(v);
}

ComplexElement random_complex(const LieAlgebra& g, std::mt19937_64& rng)
{
    return {random_element(g, rng), random_element(g, rng)};
}

}  // namespace

TEST(Rational, NullspaceAndSolve)
{
    QMatrix m = QMatrix::from_rows({{1, 2, 3}, {2, 4, 6}}, 3);
    auto ns = nullspace(m);
    ASSERT_EQ(ns.size(), 2u);
    for (const auto& v : ns) EXPECT_TRUE(is_zero(m.apply(v)));
    EXPECT_EQ(rank(m), 1u);
    auto x = solve(QMatrix::from_rows({{2, 0}, {0, 4}}, 2), {1, 1});
    ASSERT_TRUE(x);
    EXPECT_EQ((*x)[0], Rational(1, 2));
    EXPECT_EQ((*x)[1], Rational(1, 4));
    EXPECT_FALSE(solve(m, {1, 0}));
}

TEST(Rational, PolynomialToolkit)
{
    // (x-1)^2 (x+2) = x^3 - 3x + 2
    QPoly p{2, -3, 0, 1};
    QPoly sf = squarefree_part(p);
    EXPECT_EQ(sf, (QPoly{-2, 1, 1}));
    auto [q, r] = poly_divmod(p, QPoly{-1, 1});
    EXPECT_EQ(q, (QPoly{-2, 1, 1}));
    EXPECT_TRUE(r.empty());
    QMatrix a = QMatrix::from_rows({{0, -1}, {1, 0}}, 2);
    EXPECT_EQ(charpoly(a), (QPoly{1, 0, 1}));
    EXPECT_TRUE(eval_matrix(charpoly(a), a).is_zero());
}

TEST(Rational, SnapAndParse)
{
    EXPECT_EQ(*snap_rational(0.3333333333333, 10000, 1e-9), Rational(1, 3));
    EXPECT_EQ(*snap_rational(-2.0, 10000, 1e-9), Rational(-2));
    EXPECT_FALSE(snap_rational(3.14159265358979, 100, 1e-9));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
    EXPECT_EQ(parse_rational("-3/6"), Rational(-1, 2));
    EXPECT_EQ(parse_rational("010/3"), Rational(10, 3));
    EXPECT_EQ(parse_rational("1e-2"), Rational(1, 100));
    EXPECT_THROW(parse_rational("abc"), InputError);
}

TEST(Rational, ExactPositiveDefinite)
{
    EXPECT_TRUE(is_positive_definite(QMatrix::from_rows({{2, 1}, {1, 2}}, 2)));
    EXPECT_FALSE(is_positive_definite(QMatrix::from_rows({{1, 2}, {2, 1}}, 2)));
    EXPECT_FALSE(is_positive_definite(QMatrix::from_rows({{1, 0}, {0, 0}}, 2)));
}

TEST(Simplex, FeasibilityAndInfeasibility)
{
    LinearSystem s;
    s.dim = 2;
    s.add_ge({1, 0}, 1);
    s.add_ge({0, 1}, 1);
    s.add_ge({-1, -1}, -3);
    auto x = find_point(s);
    ASSERT_TRUE(x);
    EXPECT_GE((*x)[0], 1);
    EXPECT_GE((*x)[1], 1);
    EXPECT_LE((*x)[0] + (*x)[1], 3);
    s.add_ge({-1, -1}, -1);
    EXPECT_FALSE(find_point(s));
}

TEST(Bracket, Examples)
{
    LieAlgebra h3 = library::heisenberg();
    EXPECT_EQ(h3.bracket(elem(h3, "p"), elem(h3, "q")), elem(h3, "z"));
    EXPECT_TRUE(h3.bracket(elem(h3, "p"), elem(h3, "z")).is_zero());
    LieAlgebra sl2 = library::sl2r();
    EXPECT_EQ(sl2.bracket(elem(sl2, "h"), elem(sl2, "e")), elem(sl2, "2e"));
    Element x = elem(sl2, "3h-e+1/2f");
    EXPECT_TRUE(sl2.bracket(x, x).is_zero());
    EXPECT_THROW(sl2.bracket(x, Element(QVector{1, 2})), DimensionMismatch);
}

TEST(AdMatrix, Examples)
{
    LieAlgebra sl2 = library::sl2r();
    QMatrix ad = sl2.ad_matrix(elem(sl2, "h"));
    QMatrix expect(3, 3);
    expect(1, 1) = 2;
    expect(2, 2) = -2;
    EXPECT_EQ(ad, expect);
    EXPECT_TRUE(sl2.ad_matrix(sl2.zero()).is_zero());
    LieAlgebra h3 = library::heisenberg();
    EXPECT_TRUE(h3.ad_matrix(elem(h3, "z")).is_zero());
}

TEST(Jacobi, BundledAlgebrasPass)
{
    for (const auto& b : library::bundled()) EXPECT_TRUE(b.algebra.verify_jacobi().ok) << b.name;
    EXPECT_TRUE(library::abelian(4).verify_jacobi().ok);
    EXPECT_TRUE(direct_sum(library::su2(), library::heisenberg()).verify_jacobi().ok);
}

TEST(Jacobi, PerturbedConstantIsReported)
{
    // [e, f] = h + e breaks Jacobi on (h, e, f): [h,[e,f]] + [e,[f,h]] + [f,[h,e]] = 2e.
    LieAlgebra bad = LieAlgebra::from_sparse({"h", "e", "f"}, {library::Entry{0, 1, 1, 2}, library::Entry{0, 2, 2, -2},
                                                               library::Entry{1, 2, 0, 1}, library::Entry{1, 2, 1, 1}});
    JacobiReport r = bad.verify_jacobi();
    EXPECT_FALSE(r.ok);
    ASSERT_TRUE(r.first_violation);
    EXPECT_EQ(*r.first_violation, (std::array<std::size_t, 3>{0, 1, 2}));
}

TEST(Jacobi, RejectsNonAntisymmetricTensor)
{
    std::vector<Rational> c(8, Rational(0));
    c[(0 * 2 + 1) * 2 + 0] = 1;  // [e0, e1] = e0 without [e1, e0] = -e0
    EXPECT_THROW(LieAlgebra({"a", "b"}, c), InputError);
}

TEST(Centralizer, Examples)
{
    LieAlgebra h3 = library::heisenberg();
    EXPECT_EQ(h3.centralizer(elem(h3, "p")), Subspace::span(std::vector<Element>{elem(h3, "p"), elem(h3, "z")}, 3));
    EXPECT_EQ(h3.centralizer(h3.zero()).dim(), 3u);
    LieAlgebra sl2 = library::sl2r();
    Subspace c = sl2.centralizer(elem(sl2, "e-f"));
    EXPECT_EQ(c, Subspace::span(std::vector<Element>{elem(sl2, "e-f")}, 3));
    EXPECT_TRUE(c.verified && c.is_subalgebra);
}

TEST(Center, Examples)
{
    LieAlgebra h3 = library::heisenberg();
    EXPECT_EQ(h3.center(), Subspace::span(std::vector<Element>{elem(h3, "z")}, 3));
    EXPECT_EQ(library::sl2r().center().dim(), 0u);
    EXPECT_EQ(library::abelian(3).center().dim(), 3u);
    LieAlgebra hsp = library::jacobi();
    EXPECT_EQ(hsp.center(), Subspace::span(std::vector<Element>{elem(hsp, "z")}, 6));
}

TEST(IdealClosure, Examples)
{
    LieAlgebra h3 = library::heisenberg();
    EXPECT_EQ(h3.ideal_closure(Subspace::zero(3)).dim(), 0u);
    Subspace s = h3.ideal_closure(Subspace::span(std::vector<Element>{elem(h3, "p")}, 3));
    EXPECT_EQ(s, Subspace::span(std::vector<Element>{elem(h3, "p"), elem(h3, "z")}, 3));
    EXPECT_TRUE(s.is_ideal);
    EXPECT_EQ(h3.ideal_closure(Subspace::whole(3)).dim(), 3u);
    LieAlgebra hsp = library::jacobi();
    // The Heisenberg part is an ideal; its closure from p picks up q and z.
    EXPECT_EQ(hsp.ideal_closure(Subspace::span(std::vector<Element>{elem(hsp, "p")}, 6)).dim(), 3u);
}

TEST(Quotient, Examples)
{
    LieAlgebra h3 = library::heisenberg();
    Quotient q0 = h3.quotient(Subspace::zero(3));
    EXPECT_EQ(*q0.algebra, h3);
    Quotient qz = h3.quotient(h3.center());
    EXPECT_EQ(qz.algebra->dim(), 2u);
    for (const auto& c : qz.algebra->constants()) EXPECT_EQ(sgn(c), 0);
    EXPECT_TRUE(h3.is_homomorphism(qz));
    Quotient qall = h3.quotient(Subspace::whole(3));
    EXPECT_EQ(qall.algebra->dim(), 0u);
    EXPECT_THROW(h3.quotient(Subspace::span(std::vector<Element>{elem(h3, "p")}, 3)), NotAnIdeal);
    LieAlgebra hsp = library::jacobi();
    Quotient qh = hsp.quotient(hsp.center());
    EXPECT_TRUE(hsp.is_homomorphism(qh));
    EXPECT_TRUE(qh.algebra->verify_jacobi().ok);
}

TEST(Properties, JacobiAndAdHomomorphismOnRandomTriples)
{
    std::mt19937_64 rng(7);
    for (const auto& b : library::bundled()) {
        const LieAlgebra& g = b.algebra;
        for (int trial = 0; trial < 20; ++trial) {
            Element x = random_element(g, rng), y = random_element(g, rng), z = random_element(g, rng);
            Element s = g.bracket(x, g.bracket(y, z)) + g.bracket(y, g.bracket(z, x)) + g.bracket(z, g.bracket(x, y));
            EXPECT_TRUE(s.is_zero()) << b.name;
            QMatrix lhs = g.ad_matrix(g.bracket(x, y));
            QMatrix rhs = g.ad_matrix(x) * g.ad_matrix(y) - g.ad_matrix(y) * g.ad_matrix(x);
            EXPECT_EQ(lhs, rhs) << b.name;
        }
    }
}

TEST(Properties, IdealClosureIdempotentAndMonotone)
{
    std::mt19937_64 rng(11);
    for (const auto& b : library::bundled()) {
        const LieAlgebra& g = b.algebra;
        for (int trial = 0; trial < 10; ++trial) {
            Element x = random_element(g, rng), y = random_element(g, rng);
            Subspace s1 = Subspace::span(std::vector<Element>{x}, g.dim());
            Subspace s2 = Subspace::span(std::vector<Element>{x, y}, g.dim());
            Subspace c1 = g.ideal_closure(s1);
            EXPECT_EQ(g.ideal_closure(c1), c1);
            EXPECT_TRUE(g.ideal_closure(s2).contains(c1));
            EXPECT_TRUE(c1.contains(s1));
        }
    }
}

TEST(Properties, QuotientProjectionIsHomomorphism)
{
    std::mt19937_64 rng(13);
    for (const auto& b : library::bundled()) {
        const LieAlgebra& g = b.algebra;
        Quotient q = g.quotient(g.center());
        for (int trial = 0; trial < 10; ++trial) {
            Element x = random_element(g, rng), y = random_element(g, rng);
            EXPECT_EQ(q.project(g.bracket(x, y)), q.algebra->bracket(q.project(x), q.project(y))) << b.name;
        }
    }
}

TEST(Properties, StarInvolution)
{
    std::mt19937_64 rng(17);
    for (const auto& b : library::bundled()) {
        const LieAlgebra& g = b.algebra;
        for (int trial = 0; trial < 10; ++trial) {
            ComplexElement z = random_complex(g, rng), w = random_complex(g, rng);
            EXPECT_EQ(z.star().star(), z);
            ComplexElement lhs = g.bracket(z.star(), w.star());
            ComplexElement rhs = g.bracket(z, w).star();
            EXPECT_EQ(lhs.re, Element(-rhs.re.coords));
            EXPECT_EQ(lhs.im, Element(-rhs.im.coords));
        }
    }
}

TEST(Parse, Expressions)
{
    LieAlgebra hsp = library::jacobi();
    EXPECT_EQ(parse_element(hsp, "z+p2+q2").coords, (QVector{1, 0, 0, 1, 1, 0}));
    EXPECT_EQ(parse_element(hsp, "1,0,0,1,1,0").coords, (QVector{1, 0, 0, 1, 1, 0}));
    EXPECT_EQ(parse_element(hsp, "p2 - q2").coords, (QVector{0, 0, 0, 1, -1, 0}));
    EXPECT_EQ(parse_element(hsp, "-1/2*pq+3p").coords, (QVector{0, 3, 0, 0, 0, Rational(-1, 2)}));
    EXPECT_EQ(format_element(hsp, parse_element(hsp, "z+2p2-q2")), "z+2*p2-q2");
    EXPECT_THROW(parse_element(hsp, "x"), InputError);
    EXPECT_THROW(parse_element(hsp, "3"), InputError);
    EXPECT_THROW(parse_element(hsp, "1,2"), InputError);
    EXPECT_EQ(parse_subspace(hsp, "z,p2+q2").dim(), 2u);
}

TEST(DirectSum, RenamesCollisions)
{
    LieAlgebra g = direct_sum(library::heisenberg(), library::heisenberg());
    EXPECT_EQ(g.dim(), 6u);
    EXPECT_EQ(g.basis_names()[3], "p'");
    EXPECT_EQ(g.center().dim(), 2u);
}
