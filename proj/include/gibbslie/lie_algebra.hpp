#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "gibbslie/errors.hpp"
#include "gibbslie/rational.hpp"

namespace gibbslie {

/// Element of a Lie algebra in the coordinates of its named basis.
struct Element {
    QVector coords;

    Element() = default;
    explicit Element(QVector c) : coords(std::move(c)) {}

    std::size_t size() const { return coords.size(); }
    bool is_zero() const { return gibbslie::is_zero(coords); }

    friend Element operator+(const Element& a, const Element& b) { return Element(a.coords + b.coords); }
    friend Element operator-(const Element& a, const Element& b) { return Element(a.coords - b.coords); }
    friend Element operator*(const Rational& s, const Element& a) { return Element(s * a.coords); }
    friend bool operator==(const Element& a, const Element& b) { return a.coords == b.coords; }
};

/// X + iY in the complexification.
struct ComplexElement {
    Element re;
    Element im;

    /// (X + iY)* = -X + iY
    ComplexElement star() const
    {
        return {Element(-re.coords), im};
    }
    friend bool operator==(const ComplexElement& a, const ComplexElement& b)
    {
        return a.re == b.re && a.im == b.im;
    }
};

/// Linear subspace with a canonical echelon basis. The subalgebra/ideal flags
/// are only ever set by LieAlgebra::verify_flags.
struct Subspace {
    std::size_t ambient_dim = 0;
    std::vector<Element> basis;
    bool verified = false;
    bool is_subalgebra = false;
    bool is_ideal = false;

    static Subspace span(const std::vector<QVector>& vectors, std::size_t ambient)
    {
        Subspace s;
        s.ambient_dim = ambient;
        for (auto& v : span_basis(vectors, ambient)) s.basis.emplace_back(std::move(v));
        return s;
    }
    static Subspace span(const std::vector<Element>& elements, std::size_t ambient)
    {
        std::vector<QVector> v;
        for (const auto& e : elements) v.push_back(e.coords);
        return span(v, ambient);
    }
    static Subspace zero(std::size_t ambient) { return span(std::vector<QVector>{}, ambient); }
    static Subspace whole(std::size_t ambient)
    {
        std::vector<QVector> v;
        for (std::size_t i = 0; i < ambient; ++i) v.push_back(unit_vector(ambient, i));
        return span(v, ambient);
    }

    std::size_t dim() const { return basis.size(); }

    std::vector<QVector> vectors() const
    {
        std::vector<QVector> v;
        for (const auto& e : basis) v.push_back(e.coords);
        return v;
    }

    bool contains(const Element& x) const { return in_span(vectors(), x.coords); }

    bool contains(const Subspace& other) const
    {
        for (const auto& e : other.basis)
            if (!contains(e)) return false;
        return true;
    }

    /// Coordinates of x with respect to `basis`, if x lies in the subspace.
    std::optional<QVector> coordinates_of(const Element& x) const
    {
        if (basis.empty()) {
            if (x.is_zero()) return QVector{};
            return std::nullopt;
        }
        return solve(QMatrix::from_columns(vectors(), ambient_dim), x.coords);
    }

    Element from_coordinates(const QVector& c) const
    {
        QVector v = zero_vector(ambient_dim);
        for (std::size_t i = 0; i < basis.size(); ++i) v = v + c[i] * basis[i].coords;
        return Element(v);
    }

    friend bool operator==(const Subspace& a, const Subspace& b)
    {
        return a.ambient_dim == b.ambient_dim && a.basis == b.basis;
    }
};

struct JacobiReport {
    bool ok = true;
    std::optional<std::array<std::size_t, 3>> first_violation;
    std::vector<std::array<std::size_t, 3>> violations;
};

class LieAlgebra;

/// Quotient algebra together with the projection from the parent.
struct Quotient {
    std::shared_ptr<const LieAlgebra> algebra;
    QMatrix projection;                       // (dim g/n) x (dim g)
    std::vector<std::size_t> complement;      // parent basis indices spanning a complement
    Subspace ideal;

    Element project(const Element& x) const { return Element(projection.apply(x.coords)); }
    Subspace project(const Subspace& s) const;
};

/// Finite-dimensional real Lie algebra given by exact structure constants
/// [e_i, e_j] = sum_k c[i][j][k] e_k. Immutable after construction.
class LieAlgebra {
public:
    LieAlgebra() = default;

    /// Throws InputError if the constants are not antisymmetric.
    LieAlgebra(std::vector<std::string> names, std::vector<Rational> constants)
        : names_(std::move(names)), c_(std::move(constants))
    {
        const std::size_t n = names_.size();
        if (c_.size() != n * n * n) throw InputError("structure constant tensor has wrong size");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k)
                    if (c_[(i * n + j) * n + k] != -c_[(j * n + i) * n + k])
                        throw InputError("structure constants are not antisymmetric at (" + std::to_string(i) +
                                         "," + std::to_string(j) + "," + std::to_string(k) + ")");
    }

    /// Builds the tensor from entries [i, j, k, value] with i < j.
    static LieAlgebra from_sparse(std::vector<std::string> names,
                                  const std::vector<std::tuple<std::size_t, std::size_t, std::size_t, Rational>>& entries)
    {
        const std::size_t n = names.size();
        std::vector<Rational> c(n * n * n, Rational(0));
        for (const auto& [i, j, k, v] : entries) {
            if (i >= n || j >= n || k >= n) throw InputError("structure constant index out of range");
            if (i == j) throw InputError("structure constant with i == j must vanish");
            c[(i * n + j) * n + k] += v;
            c[(j * n + i) * n + k] -= v;
        }
        return LieAlgebra(std::move(names), std::move(c));
    }

    std::size_t dim() const { return names_.size(); }
    const std::vector<std::string>& basis_names() const { return names_; }

    const Rational& constant(std::size_t i, std::size_t j, std::size_t k) const
    {
        return c_[(i * dim() + j) * dim() + k];
    }
    const std::vector<Rational>& constants() const { return c_; }

    std::optional<std::size_t> index_of(const std::string& name) const
    {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return i;
        return std::nullopt;
    }

    Element basis_element(std::size_t i) const { return Element(unit_vector(dim(), i)); }
    Element zero() const { return Element(zero_vector(dim())); }

    Element bracket(const Element& x, const Element& y) const
    {
        check_dim(x);
        check_dim(y);
        const std::size_t n = dim();
        QVector r = zero_vector(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (sgn(x.coords[i]) == 0) continue;
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j || sgn(y.coords[j]) == 0) continue;
                Rational xy = x.coords[i] * y.coords[j];
                const Rational* row = &c_[(i * n + j) * n];
                for (std::size_t k = 0; k < n; ++k)
                    if (sgn(row[k]) != 0) r[k] += xy * row[k];
            }
        }
        return Element(std::move(r));
    }

    ComplexElement bracket(const ComplexElement& a, const ComplexElement& b) const
    {
        return {bracket(a.re, b.re) - bracket(a.im, b.im), bracket(a.re, b.im) + bracket(a.im, b.re)};
    }

    /// Column j is bracket(x, e_j).
    QMatrix ad_matrix(const Element& x) const
    {
        check_dim(x);
        const std::size_t n = dim();
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            if (sgn(x.coords[i]) == 0) continue;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t k = 0; k < n; ++k) {
                    const Rational& c = c_[(i * n + j) * n + k];
                    if (sgn(c) != 0) m(k, j) += x.coords[i] * c;
                }
        }
        return m;
    }

    JacobiReport verify_jacobi() const
    {
        JacobiReport rep;
        const std::size_t n = dim();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k) {
                    Element a = basis_element(i), b = basis_element(j), c = basis_element(k);
                    Element s = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
                    if (!s.is_zero()) {
                        rep.ok = false;
                        if (!rep.first_violation) rep.first_violation = std::array<std::size_t, 3>{i, j, k};
                        rep.violations.push_back({i, j, k});
                    }
                }
        return rep;
    }

    /// Sets the subalgebra/ideal flags by exact bracket checks.
    Subspace verify_flags(Subspace s) const
    {
        s.is_subalgebra = true;
        s.is_ideal = true;
        for (std::size_t a = 0; a < s.basis.size() && s.is_subalgebra; ++a)
            for (std::size_t b = a + 1; b < s.basis.size(); ++b)
                if (!s.contains(bracket(s.basis[a], s.basis[b]))) {
                    s.is_subalgebra = false;
                    break;
                }
        for (std::size_t i = 0; i < dim() && s.is_ideal; ++i)
            for (const auto& v : s.basis)
                if (!s.contains(bracket(basis_element(i), v))) {
                    s.is_ideal = false;
                    break;
                }
        s.verified = true;
        return s;
    }

    /// ker ad(x) = { y : [x, y] = 0 }
    Subspace centralizer(const Element& x) const
    {
        return verify_flags(Subspace::span(nullspace(ad_matrix(x)), dim()));
    }

    /// Centralizer of a subspace: common kernel of ad(v), v in the basis.
    Subspace centralizer(const Subspace& s) const
    {
        const std::size_t n = dim();
        QMatrix stacked(n * std::max<std::size_t>(s.dim(), 1), n);
        for (std::size_t b = 0; b < s.dim(); ++b) {
            QMatrix ad = ad_matrix(s.basis[b]);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) stacked(b * n + i, j) = ad(i, j);
        }
        return verify_flags(Subspace::span(nullspace(stacked), n));
    }

    Subspace center() const { return centralizer(Subspace::whole(dim())); }

    /// Smallest ideal containing s.
    Subspace ideal_closure(const Subspace& s) const
    {
        std::vector<QVector> current = s.vectors();
        std::size_t d = span_basis(current, dim()).size();
        for (;;) {
            std::vector<QVector> next = current;
            for (std::size_t i = 0; i < dim(); ++i)
                for (const auto& v : current) next.push_back(bracket(basis_element(i), Element(v)).coords);
            next = span_basis(next, dim());
            if (next.size() == d) break;
            d = next.size();
            current = std::move(next);
        }
        return verify_flags(Subspace::span(current, dim()));
    }

    /// Quotient by an ideal on the complement spanned by non-pivot basis vectors.
    Quotient quotient(const Subspace& ideal_in) const
    {
        Subspace ideal = ideal_in.verified ? ideal_in : verify_flags(ideal_in);
        if (!ideal.is_ideal) throw NotAnIdeal("subspace is not an ideal");
        const std::size_t n = dim();
        Echelon e = rref(QMatrix::from_rows(ideal.vectors(), n));
        std::vector<bool> pivot(n, false);
        for (auto p : e.pivots) pivot[p] = true;
        std::vector<std::size_t> comp;
        for (std::size_t j = 0; j < n; ++j)
            if (!pivot[j]) comp.push_back(j);
        const std::size_t k = comp.size();
        // x -> x - sum_p x_p r_p has vanishing pivot coordinates; keep the rest.
        QMatrix proj(k, n);
        for (std::size_t a = 0; a < k; ++a) proj(a, comp[a]) = 1;
        for (std::size_t r = 0; r < e.pivots.size(); ++r) {
            const std::size_t p = e.pivots[r];
            for (std::size_t a = 0; a < k; ++a) proj(a, p) -= e.reduced(r, comp[a]);
        }
        std::vector<std::string> names;
        for (auto j : comp) names.push_back(names_[j]);
        std::vector<Rational> c(k * k * k, Rational(0));
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                QVector img = proj.apply(bracket(basis_element(comp[a]), basis_element(comp[b])).coords);
                for (std::size_t m = 0; m < k; ++m) c[(a * k + b) * k + m] = img[m];
            }
        Quotient q;
        q.algebra = std::make_shared<const LieAlgebra>(std::move(names), std::move(c));
        q.projection = std::move(proj);
        q.complement = std::move(comp);
        q.ideal = std::move(ideal);
        return q;
    }

    /// Exact check that q([e_i, e_j]) = [q(e_i), q(e_j)] for all basis pairs.
    bool is_homomorphism(const Quotient& q) const
    {
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = i + 1; j < dim(); ++j) {
                Element lhs = q.project(bracket(basis_element(i), basis_element(j)));
                Element rhs = q.algebra->bracket(q.project(basis_element(i)), q.project(basis_element(j)));
                if (!(lhs == rhs)) return false;
            }
        return true;
    }

    friend bool operator==(const LieAlgebra& a, const LieAlgebra& b)
    {
        return a.names_ == b.names_ && a.c_ == b.c_;
    }

    void check_dim(const Element& x) const
    {
        if (x.size() != dim())
            throw DimensionMismatch("element has " + std::to_string(x.size()) + " coordinates, algebra has dimension " +
                                    std::to_string(dim()));
    }

private:
    std::vector<std::string> names_;
    std::vector<Rational> c_;
};

inline Subspace Quotient::project(const Subspace& s) const
{
    std::vector<QVector> img;
    for (const auto& b : s.basis) img.push_back(projection.apply(b.coords));
    return Subspace::span(img, algebra->dim());
}

/// Direct sum a (+) b; basis names of b get the suffix `'` on collision.
inline LieAlgebra direct_sum(const LieAlgebra& a, const LieAlgebra& b)
{
    const std::size_t na = a.dim(), nb = b.dim(), n = na + nb;
    std::vector<std::string> names = a.basis_names();
    for (const auto& s : b.basis_names()) {
        std::string name = s;
        while (a.index_of(name)) name += "'";
        names.push_back(name);
    }
    std::vector<Rational> c(n * n * n, Rational(0));
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < na; ++j)
            for (std::size_t k = 0; k < na; ++k) c[(i * n + j) * n + k] = a.constant(i, j, k);
    for (std::size_t i = 0; i < nb; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t k = 0; k < nb; ++k) c[((na + i) * n + na + j) * n + na + k] = b.constant(i, j, k);
    return LieAlgebra(std::move(names), std::move(c));
}

}  // namespace gibbslie
