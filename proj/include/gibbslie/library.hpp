#pragma once

// Bundled algebras used throughout the tests and the CLI fixtures.

#include <string>
#include <tuple>
#include <vector>

#include "gibbslie/lie_algebra.hpp"

namespace gibbslie::library {

using Entry = std::tuple<std::size_t, std::size_t, std::size_t, Rational>;

/// h3: [p, q] = z.
inline LieAlgebra heisenberg()
{
    return LieAlgebra::from_sparse({"p", "q", "z"}, {Entry{0, 1, 2, 1}});
}

inline LieAlgebra abelian(std::size_t n)
{
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    return LieAlgebra::from_sparse(names, {});
}

/// su(2): [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2.
inline LieAlgebra su2()
{
    return LieAlgebra::from_sparse({"e1", "e2", "e3"},
                                   {Entry{0, 1, 2, 1}, Entry{1, 2, 0, 1}, Entry{0, 2, 1, -1}});
}

/// sl(2,R): [h, e] = 2e, [h, f] = -2f, [e, f] = h.
inline LieAlgebra sl2r()
{
    return LieAlgebra::from_sparse({"h", "e", "f"},
                                   {Entry{0, 1, 1, 2}, Entry{0, 2, 2, -2}, Entry{1, 2, 0, 1}});
}

/// su(1,1) in the basis realised by i*K0, i*K1, i*K2 of the discrete series:
/// [k0, k1] = -k2, [k1, k2] = k0, [k2, k0] = -k1.
inline LieAlgebra su11()
{
    return LieAlgebra::from_sparse({"k0", "k1", "k2"},
                                   {Entry{0, 1, 2, -1}, Entry{1, 2, 0, 1}, Entry{0, 2, 1, 1}});
}

/// Jacobi algebra hsp(R^2) as polynomials of degree <= 2 in (p, q) under the
/// Poisson bracket {f, g} = f_p g_q - f_q g_p; z is the constant polynomial 1.
/// Basis order: z, p, q, p2, q2, pq.
inline LieAlgebra jacobi()
{
    enum { z, p, q, p2, q2, pq };
    return LieAlgebra::from_sparse({"z", "p", "q", "p2", "q2", "pq"},
                                   {
                                       Entry{p, q, z, 1},
                                       Entry{p, q2, q, 2},
                                       Entry{p, pq, p, 1},
                                       Entry{q, p2, p, -2},
                                       Entry{q, pq, q, -1},
                                       Entry{p2, q2, pq, 4},
                                       Entry{p2, pq, p2, 2},
                                       Entry{q2, pq, q2, -2},
                                   });
}

/// Oscillator algebra: [p, q] = z, [n, p] = -q, [n, q] = p.
inline LieAlgebra oscillator()
{
    enum { p, q, z, n };
    return LieAlgebra::from_sparse({"p", "q", "z", "n"},
                                   {Entry{p, q, z, 1}, Entry{p, n, q, 1}, Entry{q, n, p, -1}});
}

struct Bundled {
    std::string name;
    LieAlgebra algebra;
    std::vector<std::string> cartan;  // basis of a compactly embedded Cartan, as expressions
};

inline std::vector<Bundled> bundled()
{
    return {
        {"h3", heisenberg(), {}},
        {"abelian3", abelian(3), {"x1", "x2", "x3"}},
        {"su2", su2(), {"e3"}},
        {"sl2r", sl2r(), {"e-f"}},
        {"su11", su11(), {"k0"}},
        {"hsp2", jacobi(), {"z", "p2+q2"}},
        {"oscillator", oscillator(), {"z", "n"}},
    };
}

}  // namespace gibbslie::library
