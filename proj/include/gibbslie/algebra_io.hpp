#pragma once

// Algebra files, TOML or JSON:
//
//   dim = 3
//   basis = ["p", "q", "z"]
//   structure_constants = [[0, 1, 2, 1, 1]]   # [i, j, k, num, den], i < j
//
// Indices are 0-based; the antisymmetric completion is implied.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "gibbslie/lie_algebra.hpp"

namespace gibbslie {

struct LoadedAlgebra {
    LieAlgebra algebra;
    JacobiReport jacobi;
    std::string source;
};

/// Parse failure with a source location.
class ParseError : public InputError {
public:
    ParseError(const std::string& msg, long line, long column)
        : InputError(msg + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")"),
          line_(line),
          column_(column)
    {
    }
    long line() const { return line_; }
    long column() const { return column_; }

private:
    long line_;
    long column_;
};

/// Jacobi failure on an otherwise well-formed file.
class JacobiViolation : public InputError {
public:
    JacobiViolation(const std::string& msg, JacobiReport r) : InputError(msg), report(std::move(r)) {}
    JacobiReport report;
};

namespace detail {

using Triple = std::tuple<std::size_t, std::size_t, std::size_t, Rational>;

inline LieAlgebra assemble(long dim, const std::vector<std::string>& basis, const std::vector<std::vector<long long>>& rows)
{
    if (dim <= 0) throw InputError("'dim' must be a positive integer");
    if (static_cast<std::size_t>(dim) != basis.size())
        throw InputError("'dim' = " + std::to_string(dim) + " but 'basis' lists " + std::to_string(basis.size()) + " names");
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = a + 1; b < basis.size(); ++b)
            if (basis[a] == basis[b]) throw InputError("duplicate basis name '" + basis[a] + "'");
    std::vector<Triple> entries;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto& e = rows[r];
        if (e.size() != 5) throw InputError("structure constant entry " + std::to_string(r) + " must be [i, j, k, num, den]");
        if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[0] >= dim || e[1] >= dim || e[2] >= dim)
            throw InputError("structure constant entry " + std::to_string(r) + " has an index out of range");
        if (e[0] >= e[1]) throw InputError("structure constant entry " + std::to_string(r) + " must have i < j");
        if (e[4] == 0) throw InputError("structure constant entry " + std::to_string(r) + " has zero denominator");
        Rational v(mpz_class(std::to_string(e[3]), 10), mpz_class(std::to_string(e[4]), 10));
        v.canonicalize();
        entries.emplace_back(static_cast<std::size_t>(e[0]), static_cast<std::size_t>(e[1]),
                             static_cast<std::size_t>(e[2]), v);
    }
    return LieAlgebra::from_sparse(basis, entries);
}

inline LieAlgebra parse_toml(const std::string& text, const std::string& source)
{
    toml::table tbl;
    try {
        tbl = toml::parse(text, source);
    } catch (const toml::parse_error& err) {
        throw ParseError(std::string(err.description()), static_cast<long>(err.source().begin.line),
                         static_cast<long>(err.source().begin.column));
    }
    auto dim = tbl["dim"].value<long long>();
    if (!dim) throw InputError("missing integer key 'dim'");
    std::vector<std::string> basis;
    if (auto* arr = tbl["basis"].as_array()) {
        for (auto& node : *arr) {
            auto s = node.value<std::string>();
            if (!s) throw InputError("'basis' must be an array of strings");
            basis.push_back(*s);
        }
    } else {
        throw InputError("missing array key 'basis'");
    }
    std::vector<std::vector<long long>> rows;
    if (auto* arr = tbl["structure_constants"].as_array()) {
        for (auto& node : *arr) {
            auto* inner = node.as_array();
            if (!inner) throw InputError("'structure_constants' entries must be arrays");
            std::vector<long long> row;
            for (auto& x : *inner) {
                auto v = x.value<long long>();
                if (!v) throw InputError("'structure_constants' entries must be integers");
                row.push_back(*v);
            }
            rows.push_back(row);
        }
    } else if (tbl.contains("structure_constants")) {
        throw InputError("'structure_constants' must be an array");
    }
    return assemble(static_cast<long>(*dim), basis, rows);
}

inline std::pair<long, long> line_col(const std::string& text, std::size_t byte)
{
    long line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

inline LieAlgebra parse_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& err) {
        auto [l, c] = line_col(text, err.byte == 0 ? 0 : err.byte - 1);
        throw ParseError(err.what(), l, c);
    }
    if (!j.is_object()) throw InputError("algebra JSON must be an object");
    if (!j.contains("dim") || !j["dim"].is_number_integer()) throw InputError("missing integer key 'dim'");
    if (!j.contains("basis") || !j["basis"].is_array()) throw InputError("missing array key 'basis'");
    std::vector<std::string> basis;
    for (auto& b : j["basis"]) {
        if (!b.is_string()) throw InputError("'basis' must be an array of strings");
        basis.push_back(b.get<std::string>());
    }
    std::vector<std::vector<long long>> rows;
    if (j.contains("structure_constants")) {
        for (auto& e : j["structure_constants"]) {
            std::vector<long long> row;
            for (auto& x : e) {
                if (!x.is_number_integer()) throw InputError("'structure_constants' entries must be integers");
                row.push_back(x.get<long long>());
            }
            rows.push_back(row);
        }
    }
    return assemble(j["dim"].get<long>(), basis, rows);
}

}  // namespace detail

/// Parses without the Jacobi gate.
inline LieAlgebra parse_algebra(const std::string& text, bool json, const std::string& source = "<string>")
{
    std::string trimmed = text;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
    if (trimmed.empty()) throw ParseError("empty algebra file", 1, 1);
    return json ? detail::parse_json(text) : detail::parse_toml(text, source);
}

inline std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Loads and rejects algebras failing the Jacobi identity.
inline LoadedAlgebra load_algebra(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    const bool json = path.extension() == ".json";
    LieAlgebra g = parse_algebra(text, json, path.string());
    JacobiReport rep = g.verify_jacobi();
    if (!rep.ok) {
        const auto& v = *rep.first_violation;
        throw JacobiViolation("Jacobi identity fails for basis triple (" + g.basis_names()[v[0]] + ", " +
                                  g.basis_names()[v[1]] + ", " + g.basis_names()[v[2]] + ")",
                              rep);
    }
    return {std::move(g), std::move(rep), path.string()};
}

inline std::string to_toml(const LieAlgebra& g)
{
    std::ostringstream out;
    out << "dim = " << g.dim() << "\nbasis = [";
    for (std::size_t i = 0; i < g.dim(); ++i) out << (i ? ", " : "") << '"' << g.basis_names()[i] << '"';
    out << "]\nstructure_constants = [\n";
    for (std::size_t i = 0; i < g.dim(); ++i)
        for (std::size_t j = i + 1; j < g.dim(); ++j)
            for (std::size_t k = 0; k < g.dim(); ++k) {
                const Rational& c = g.constant(i, j, k);
                if (sgn(c) == 0) continue;
                out << "  [" << i << ", " << j << ", " << k << ", " << c.get_num().get_str() << ", "
                    << c.get_den().get_str() << "],\n";
            }
    out << "]\n";
    return out.str();
}

}  // namespace gibbslie
