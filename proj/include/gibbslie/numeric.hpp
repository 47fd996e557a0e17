#pragma once

// Floating-point helpers. Exact objects cross into Eigen only here.

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "gibbslie/errors.hpp"
#include "gibbslie/rational.hpp"

namespace gibbslie {

using cdouble = std::complex<double>;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline RMatrix to_eigen(const QMatrix& m)
{
    RMatrix r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j).get_d();
    return r;
}

inline Eigen::VectorXd to_eigen(const QVector& v)
{
    Eigen::VectorXd r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r(i) = v[i].get_d();
    return r;
}

/// Complex eigenvalues; throws SpectralError if the solver does not converge.
inline std::vector<cdouble> eigenvalues(const RMatrix& a)
{
    if (a.rows() == 0) return {};
    Eigen::EigenSolver<RMatrix> es(a, false);
    if (es.info() != Eigen::Success) throw SpectralError("eigenvalue solver did not converge");
    std::vector<cdouble> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    for (const auto& z : ev)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw SpectralError("non-finite eigenvalue");
    return ev;
}

inline double spectral_radius(const std::vector<cdouble>& ev)
{
    double r = 0;
    for (const auto& z : ev) r = std::max(r, std::abs(z));
    return r;
}

struct EigenCluster {
    cdouble center;
    std::size_t multiplicity = 0;
    std::size_t kernel_dim = 0;  // n - rank(A - center I)
};

/// Single-linkage clustering of eigenvalues within `radius`.
inline std::vector<EigenCluster> cluster_eigenvalues(const std::vector<cdouble>& ev, double radius)
{
    const std::size_t n = ev.size();
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = i;
    // Union-find without ranks; n is tiny.
    auto find = [&](std::size_t i) {
        while (label[i] != i) i = label[i] = label[label[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) <= radius) label[find(i)] = find(j);
    std::vector<EigenCluster> out;
    std::vector<long> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        if (slot[r] < 0) {
            slot[r] = static_cast<long>(out.size());
            out.push_back({});
        }
        auto& c = out[static_cast<std::size_t>(slot[r])];
        c.center += ev[i];
        ++c.multiplicity;
    }
    for (auto& c : out) c.center /= static_cast<double>(c.multiplicity);
    std::sort(out.begin(), out.end(), [](const EigenCluster& a, const EigenCluster& b) {
        if (a.center.imag() != b.center.imag()) return a.center.imag() < b.center.imag();
        return a.center.real() < b.center.real();
    });
    return out;
}

/// Number of singular values above `threshold`.
inline std::size_t numeric_rank(const CMatrix& a, double threshold)
{
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(a);
    const auto& s = svd.singularValues();
    std::size_t r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++r;
    return r;
}

/// Orthonormal basis of the numerical kernel (singular values <= threshold).
inline CMatrix numeric_kernel(const CMatrix& a, double threshold)
{
    Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Eigen::Index n = a.cols();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > threshold) ++r;
    return svd.matrixV().rightCols(n - r);
}

}  // namespace gibbslie
