#pragma once

// Exact phase-one simplex over the rationals (Bland's rule). Sizes here are
// tiny (a few dozen constraints), so a dense tableau is fine.

#include <cstddef>
#include <optional>
#include <vector>

#include "gibbslie/rational.hpp"

namespace gibbslie {

/// Finds x >= 0 with A x = b, or nothing if infeasible.
inline std::optional<QVector> find_nonnegative_solution(const QMatrix& a, const QVector& b)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m == 0) return zero_vector(n);

    // Tableau columns: n structural, m artificial, then rhs.
    const std::size_t width = n + m + 1;
    std::vector<QVector> t(m + 1, zero_vector(width));
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) {
        const bool flip = sgn(b[i]) < 0;
        for (std::size_t j = 0; j < n; ++j) t[i][j] = flip ? Rational(-a(i, j)) : a(i, j);
        t[i][n + i] = 1;
        t[i][width - 1] = flip ? Rational(-b[i]) : b[i];
        basis[i] = n + i;
    }
    // Objective row: minimise the sum of artificials, stored as reduced costs.
    QVector& obj = t[m];
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < width; ++j)
            if (j < n || j == width - 1) obj[j] -= t[i][j];

    for (;;) {
        std::size_t enter = width;
        for (std::size_t j = 0; j + 1 < width; ++j)
            if (sgn(obj[j]) < 0) {
                enter = j;
                break;
            }
        if (enter == width) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (sgn(t[i][enter]) <= 0) continue;
            Rational ratio = t[i][width - 1] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                leave = i;
                best = ratio;
            }
        }
        if (leave == m) break;  // unbounded direction; cannot happen for phase one
        Rational piv = t[leave][enter];
        for (auto& x : t[leave]) x /= piv;
        for (std::size_t i = 0; i <= m; ++i) {
            if (i == leave || sgn(t[i][enter]) == 0) continue;
            Rational f = t[i][enter];
            for (std::size_t j = 0; j < width; ++j) t[i][j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }
    if (sgn(obj[width - 1]) != 0) return std::nullopt;
    QVector x = zero_vector(n);
    for (std::size_t i = 0; i < m; ++i)
        if (basis[i] < n) x[basis[i]] = t[i][width - 1];
    return x;
}

/// Linear constraints on a free vector x in Q^dim:
///   ge_rows[i] . x >= ge_rhs[i],  eq_rows[i] . x == eq_rhs[i].
struct LinearSystem {
    std::size_t dim = 0;
    std::vector<QVector> ge_rows;
    QVector ge_rhs;
    std::vector<QVector> eq_rows;
    QVector eq_rhs;

    void add_ge(QVector row, Rational rhs)
    {
        ge_rows.push_back(std::move(row));
        ge_rhs.push_back(std::move(rhs));
    }
    void add_eq(QVector row, Rational rhs)
    {
        eq_rows.push_back(std::move(row));
        eq_rhs.push_back(std::move(rhs));
    }
};

/// A feasible point of the system, or nothing.
inline std::optional<QVector> find_point(const LinearSystem& sys)
{
    const std::size_t d = sys.dim;
    const std::size_t g = sys.ge_rows.size();
    const std::size_t e = sys.eq_rows.size();
    // x = u - v, slack s: [G -G -I] [u v s] = h, [E -E 0] [u v s] = f
    QMatrix a(g + e, 2 * d + g);
    QVector b(g + e);
    for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            a(i, j) = sys.ge_rows[i][j];
            a(i, d + j) = -sys.ge_rows[i][j];
        }
        a(i, 2 * d + i) = -1;
        b[i] = sys.ge_rhs[i];
    }
    for (std::size_t i = 0; i < e; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            a(g + i, j) = sys.eq_rows[i][j];
            a(g + i, d + j) = -sys.eq_rows[i][j];
        }
        b[g + i] = sys.eq_rhs[i];
    }
    auto sol = find_nonnegative_solution(a, b);
    if (!sol) return std::nullopt;
    QVector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = (*sol)[j] - (*sol)[d + j];
    return x;
}

}  // namespace gibbslie
