#pragma once

// Exact rational linear algebra over GMP rationals: echelon forms, kernels,
// spans, exact positive-definiteness, characteristic polynomials and a small
// univariate polynomial toolkit.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gibbslie/errors.hpp"

namespace gibbslie {

using Rational = mpq_class;
using QVector = std::vector<Rational>;

inline QVector zero_vector(std::size_t n) { return QVector(n, Rational(0)); }

inline QVector unit_vector(std::size_t n, std::size_t i)
{
    QVector v = zero_vector(n);
    v[i] = 1;
    return v;
}

inline bool is_zero(const QVector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& x) { return sgn(x) == 0; });
}

inline QVector operator+(const QVector& a, const QVector& b)
{
    QVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline QVector operator-(const QVector& a, const QVector& b)
{
    QVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline QVector operator-(const QVector& a)
{
    QVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline QVector operator*(const Rational& s, const QVector& a)
{
    QVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline Rational dot(const QVector& a, const QVector& b)
{
    Rational s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline std::vector<double> to_double(const QVector& v)
{
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = v[i].get_d();
    return r;
}

/// Dense row-major rational matrix.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

    static QMatrix identity(std::size_t n)
    {
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    static QMatrix from_rows(const std::vector<QVector>& rows, std::size_t cols)
    {
        QMatrix m(rows.size(), cols);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
        return m;
    }

    static QMatrix from_columns(const std::vector<QVector>& cols, std::size_t rows)
    {
        QMatrix m(rows, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j)
            for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    QVector row(std::size_t i) const { return QVector(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_); }

    QVector col(std::size_t j) const
    {
        QVector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return sgn(x) == 0; });
    }

    QMatrix transpose() const
    {
        QMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    QVector apply(const QVector& v) const
    {
        QVector r(rows_, Rational(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (sgn((*this)(i, j)) != 0) r[i] += (*this)(i, j) * v[j];
        return r;
    }

    Rational trace() const
    {
        Rational s = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
        return s;
    }

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b)
    {
        QMatrix r(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a(i, k);
                if (sgn(aik) == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    if (sgn(b(k, j)) != 0) r(i, j) += aik * b(k, j);
            }
        return r;
    }

    friend QMatrix operator+(const QMatrix& a, const QMatrix& b)
    {
        QMatrix r = a;
        for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] += b.data_[i];
        return r;
    }

    friend QMatrix operator-(const QMatrix& a, const QMatrix& b)
    {
        QMatrix r = a;
        for (std::size_t i = 0; i < r.data_.size(); ++i) r.data_[i] -= b.data_[i];
        return r;
    }

    friend QMatrix operator*(const Rational& s, const QMatrix& a)
    {
        QMatrix r = a;
        for (auto& x : r.data_) x *= s;
        return r;
    }

    friend bool operator==(const QMatrix& a, const QMatrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

    std::vector<double> to_double_rowmajor() const
    {
        std::vector<double> r(data_.size());
        for (std::size_t i = 0; i < data_.size(); ++i) r[i] = data_[i].get_d();
        return r;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Rational> data_;
};

struct Echelon {
    QMatrix reduced;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form with exact arithmetic.
inline Echelon rref(QMatrix m)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && sgn(m(p, c)) == 0) ++p;
        if (p == m.rows()) continue;
        if (p != r)
            for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
        Rational inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || sgn(m(i, c)) == 0) continue;
            Rational f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const QMatrix& m) { return rref(m).pivots.size(); }

/// Basis of {x : m x = 0}.
inline std::vector<QVector> nullspace(const QMatrix& m)
{
    Echelon e = rref(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : e.pivots) is_pivot[p] = true;
    std::vector<QVector> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) continue;
        QVector v = zero_vector(m.cols());
        v[free] = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) v[e.pivots[r]] = -e.reduced(r, free);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Canonical (reduced echelon) basis of the span of `vectors` in Q^dim.
inline std::vector<QVector> span_basis(const std::vector<QVector>& vectors, std::size_t dim)
{
    if (vectors.empty()) return {};
    Echelon e = rref(QMatrix::from_rows(vectors, dim));
    std::vector<QVector> out;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) out.push_back(e.reduced.row(r));
    return out;
}

inline bool in_span(const std::vector<QVector>& basis, const QVector& v)
{
    if (is_zero(v)) return true;
    if (basis.empty()) return false;
    std::vector<QVector> rows = basis;
    rows.push_back(v);
    return rank(QMatrix::from_rows(rows, v.size())) == rank(QMatrix::from_rows(basis, v.size()));
}

/// Solves m x = b exactly; returns one solution or nothing.
inline std::optional<QVector> solve(const QMatrix& m, const QVector& b)
{
    QMatrix aug(m.rows(), m.cols() + 1);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) aug(i, j) = m(i, j);
        aug(i, m.cols()) = b[i];
    }
    Echelon e = rref(aug);
    if (!e.pivots.empty() && e.pivots.back() == m.cols()) return std::nullopt;
    QVector x = zero_vector(m.cols());
    for (std::size_t r = 0; r < e.pivots.size(); ++r) x[e.pivots[r]] = e.reduced(r, m.cols());
    return x;
}

inline std::optional<QMatrix> inverse(const QMatrix& m)
{
    const std::size_t n = m.rows();
    QMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    Echelon e = rref(aug);
    if (e.pivots.size() < n || e.pivots[n - 1] != n - 1) return std::nullopt;
    QMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv(i, j) = e.reduced(i, n + j);
    return inv;
}

/// Exact positive-definiteness of a symmetric matrix via symmetric Gaussian
/// elimination: all pivots must be strictly positive.
inline bool is_positive_definite(QMatrix a)
{
    const std::size_t n = a.rows();
    for (std::size_t k = 0; k < n; ++k) {
        if (sgn(a(k, k)) <= 0) return false;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (sgn(a(i, k)) == 0) continue;
            Rational f = a(i, k) / a(k, k);
            for (std::size_t j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Univariate polynomials, coefficients stored low degree first.

using QPoly = std::vector<Rational>;

inline void trim(QPoly& p)
{
    while (!p.empty() && sgn(p.back()) == 0) p.pop_back();
}

inline int degree(const QPoly& p)
{
    QPoly q = p;
    trim(q);
    return static_cast<int>(q.size()) - 1;
}

inline QPoly poly_mul(const QPoly& a, const QPoly& b)
{
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    trim(r);
    return r;
}

inline QPoly poly_sub(const QPoly& a, const QPoly& b)
{
    QPoly r(std::max(a.size(), b.size()), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] -= b[i];
    trim(r);
    return r;
}

/// Quotient and remainder of a / b.
inline std::pair<QPoly, QPoly> poly_divmod(QPoly a, QPoly b)
{
    trim(a);
    trim(b);
    if (b.empty()) throw Error("polynomial division by zero");
    if (a.size() < b.size()) return {QPoly{}, a};
    QPoly q(a.size() - b.size() + 1, Rational(0));
    const std::size_t db = b.size() - 1;
    for (std::size_t k = a.size(); k-- > db;) {
        Rational c = a[k] / b.back();
        q[k - db] = c;
        for (std::size_t j = 0; j <= db; ++j) a[k - db + j] -= c * b[j];
    }
    trim(a);
    trim(q);
    return {q, a};
}

inline QPoly make_monic(QPoly p)
{
    trim(p);
    if (p.empty()) return p;
    Rational lead = p.back();
    for (auto& c : p) c /= lead;
    return p;
}

inline QPoly poly_gcd(QPoly a, QPoly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        QPoly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

inline QPoly derivative(const QPoly& p)
{
    if (p.size() <= 1) return {};
    QPoly d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = Rational(static_cast<long>(i)) * p[i];
    trim(d);
    return d;
}

/// p(A) by Horner's rule.
inline QMatrix eval_matrix(const QPoly& p, const QMatrix& a)
{
    const std::size_t n = a.rows();
    QMatrix r(n, n);
    for (std::size_t k = p.size(); k-- > 0;) {
        r = r * a;
        for (std::size_t i = 0; i < n; ++i) r(i, i) += p[k];
    }
    return r;
}

/// Monic characteristic polynomial det(xI - A) via Faddeev-LeVerrier.
inline QPoly charpoly(const QMatrix& a)
{
    const std::size_t n = a.rows();
    QPoly c(n + 1, Rational(0));
    c[n] = 1;
    QMatrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m;
        for (std::size_t i = 0; i < n; ++i) m(i, i) += c[n - k + 1];
        c[n - k] = -(a * m).trace() / Rational(static_cast<long>(k));
    }
    return c;
}

/// Squarefree part p / gcd(p, p').
inline QPoly squarefree_part(const QPoly& p)
{
    QPoly g = poly_gcd(p, derivative(p));
    return make_monic(poly_divmod(p, g).first);
}

/// Best rational approximation with denominator <= max_den, accepted only when
/// within `tol` of x.
inline std::optional<Rational> snap_rational(double x, long max_den, double tol)
{
    if (!std::isfinite(x)) return std::nullopt;
    const bool neg = x < 0;
    double y = std::fabs(x);
    // Continued fraction convergents h/k.
    mpz_class h_prev = 1, h = static_cast<long>(std::floor(y));
    mpz_class k_prev = 0, k = 1;
    double frac = y - std::floor(y);
    for (int it = 0; it < 64; ++it) {
        Rational cand(h, k);
        cand.canonicalize();
        if (std::fabs(cand.get_d() - y) <= tol) return neg ? Rational(-cand) : cand;
        if (frac < 1e-300) break;
        double inv = 1.0 / frac;
        double a = std::floor(inv);
        if (a > 1e15) break;
        frac = inv - a;
        mpz_class ai = static_cast<long>(a);
        mpz_class h_next = ai * h + h_prev;
        mpz_class k_next = ai * k + k_prev;
        if (k_next > max_den) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    return std::nullopt;
}

inline Rational parse_rational(const std::string& s)
{
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw InputError("empty number");
    auto dot_pos = t.find('.');
    auto e_pos = t.find_first_of("eE");
    if (dot_pos != std::string::npos || e_pos != std::string::npos) {
        // Decimal literal: exact conversion of the written digits.
        std::string mant = e_pos == std::string::npos ? t : t.substr(0, e_pos);
        long exp10 = e_pos == std::string::npos ? 0 : std::stol(t.substr(e_pos + 1));
        bool neg = !mant.empty() && mant[0] == '-';
        if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) mant = mant.substr(1);
        std::string digits;
        long frac_digits = 0;
        bool seen_dot = false;
        for (char c : mant) {
            if (c == '.') {
                if (seen_dot) throw InputError("malformed number '" + s + "'");
                seen_dot = true;
                continue;
            }
            if (!std::isdigit(static_cast<unsigned char>(c))) throw InputError("malformed number '" + s + "'");
            digits += c;
            if (seen_dot) ++frac_digits;
        }
        if (digits.empty()) throw InputError("malformed number '" + s + "'");
        Rational q{mpz_class(digits, 10)};
        long e = exp10 - frac_digits;
        mpz_class p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(e)));
        if (e >= 0)
            q *= p10;
        else
            q /= p10;
        return neg ? Rational(-q) : q;
    }
    if (t[0] == '+') t = t.substr(1);
    try {
        Rational q(t, 10);
        q.canonicalize();
        if (sgn(q.get_den()) == 0) throw InputError("zero denominator in '" + s + "'");
        return q;
    } catch (const std::invalid_argument&) {
        throw InputError("malformed number '" + s + "'");
    }
}

}  // namespace gibbslie
