#pragma once

// Element expressions over a named basis, e.g. "p2+q2", "e-f", "1/2*z - 3h",
// or a plain coordinate list "1,0,0,1,1,0".

#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "gibbslie/lie_algebra.hpp"

namespace gibbslie {

namespace detail {

inline std::string strip(const std::string& s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(strip(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(strip(cur));
    return out;
}

inline bool looks_numeric(const std::string& s)
{
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '/' || c == '.' ||
               c == 'e' || c == 'E';
    }) && std::any_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace detail

/// Parses a single linear combination of basis names.
inline Element parse_expression(const LieAlgebra& g, const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw InputError("empty element expression");

    // Longest names first so "p2" wins over "p".
    std::vector<std::size_t> order(g.dim());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return g.basis_names()[a].size() > g.basis_names()[b].size();
    });

    QVector coords = zero_vector(g.dim());
    std::size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        Rational sign = 1;
        if (s[pos] == '+' || s[pos] == '-') {
            if (s[pos] == '-') sign = -1;
            ++pos;
        } else if (!first) {
            throw InputError("expected '+' or '-' at position " + std::to_string(pos) + " in '" + text + "'");
        }
        first = false;
        // Coefficient: digits, '/', '.'
        std::size_t start = pos;
        while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '/' || s[pos] == '.'))
            ++pos;
        Rational coef = 1;
        bool had_coef = pos > start;
        if (had_coef) coef = parse_rational(s.substr(start, pos - start));
        if (pos < s.size() && s[pos] == '*') ++pos;
        std::optional<std::size_t> idx;
        for (auto i : order) {
            const auto& name = g.basis_names()[i];
            if (s.compare(pos, name.size(), name) == 0) {
                idx = i;
                pos += name.size();
                break;
            }
        }
        if (!idx) {
            if (had_coef && (pos == s.size() || s[pos] == '+' || s[pos] == '-'))
                throw InputError("bare constant in element expression '" + text + "'");
            throw InputError("unknown basis name at position " + std::to_string(pos) + " in '" + text + "'");
        }
        coords[*idx] += sign * coef;
    }
    return Element(coords);
}

/// Either a comma-separated coordinate vector of length dim or an expression.
inline Element parse_element(const LieAlgebra& g, const std::string& text)
{
    auto parts = detail::split(text, ',');
    if (parts.size() == g.dim() &&
        std::all_of(parts.begin(), parts.end(), [](const std::string& p) { return detail::looks_numeric(p); })) {
        QVector c;
        for (const auto& p : parts) c.push_back(parse_rational(p));
        return Element(c);
    }
    if (parts.size() != 1) throw InputError("element '" + text + "' is neither a coordinate vector nor an expression");
    return parse_expression(g, text);
}

/// Comma-separated list of expressions spanning a subspace.
inline Subspace parse_subspace(const LieAlgebra& g, const std::string& text)
{
    std::vector<QVector> v;
    for (const auto& part : detail::split(text, ','))
        if (!part.empty()) v.push_back(parse_expression(g, part).coords);
    return Subspace::span(v, g.dim());
}

inline std::string format_element(const LieAlgebra& g, const Element& x)
{
    std::string out;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const Rational& c = x.coords[i];
        if (sgn(c) == 0) continue;
        Rational a = abs(c);
        if (!out.empty())
            out += sgn(c) > 0 ? "+" : "-";
        else if (sgn(c) < 0)
            out += "-";
        if (a != 1) out += a.get_str() + "*";
        out += g.basis_names()[i];
    }
    return out.empty() ? "0" : out;
}

}  // namespace gibbslie
