// Internal helpers: dense polynomial arithmetic in ascending-degree
// coefficient form and real root extraction via the companion matrix.

#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace geoflow::detail {

// Real roots of c_0 + c_1 t + ... + c_d t^d (c_d != 0). Returns false when a
// complex pair is detected (|Im| > imag_tol relative to the magnitude scale).
inline bool companion_real_roots(std::span<const double> c, std::vector<double>& roots,
                                 double imag_tol) {
    const int d = static_cast<int>(c.size()) - 1;
    roots.clear();
    if (d <= 0) return true;
    if (d == 1) {
        roots.push_back(-c[0] / c[1]);
        return true;
    }
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
    for (int r = 1; r < d; ++r) M(r, r - 1) = 1.0;
    for (int r = 0; r < d; ++r) M(r, d - 1) = -c[r] / c[d];
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, /*computeEigenvectors=*/false);
    const auto ev = es.eigenvalues();
    double scale = 1.0;
    for (int k = 0; k < d; ++k) scale = std::max(scale, std::abs(ev[k]));
    for (int k = 0; k < d; ++k) {
        if (std::abs(ev[k].imag()) > imag_tol * scale) return false;
        roots.push_back(ev[k].real());
    }
    std::sort(roots.begin(), roots.end());
    return true;
}

inline std::vector<double> poly_from_roots(std::span<const double> roots) {
    std::vector<double> p{1.0};
    for (double r : roots) {
        std::vector<double> q(p.size() + 1, 0.0);
        for (std::size_t i = 0; i < p.size(); ++i) {
            q[i + 1] += p[i];
            q[i] -= r * p[i];
        }
        p = std::move(q);
    }
    return p;
}

inline std::vector<double> poly_derivative(std::span<const double> p) {
    if (p.size() <= 1) return {0.0};
    std::vector<double> d(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * static_cast<double>(i);
    return d;
}

inline std::vector<double> poly_mul(std::span<const double> a, std::span<const double> b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

} // namespace geoflow::detail
