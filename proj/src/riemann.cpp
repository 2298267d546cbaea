#include "geoflow/riemann.hpp"

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"
#include "polyroots.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geoflow {

HydroSnapshot::HydroSnapshot(int degree_, ScalarField1D a_, std::vector<ScalarField1D> b_)
    : degree(degree_), a(std::move(a_)), b(std::move(b_)) {
    if (degree < 2) throw std::invalid_argument("HydroSnapshot: degree must be >= 2");
    if (static_cast<int>(b.size()) != degree - 1)
        throw std::invalid_argument("HydroSnapshot: need N-1 root fields");
    for (const auto& bk : b)
        if (!bk.same_layout(a))
            throw std::invalid_argument("HydroSnapshot: fields must share one grid");
    for (double v : a.values)
        if (!(v > 0.0)) throw std::invalid_argument("HydroSnapshot: a must be positive");
}

double surface_value(double q, double a, std::span<const double> b, int N) {
    double prod = 1.0;
    for (double bm : b) prod *= (q - bm);
    return prod * std::pow(1.0 + q * q, -0.5 * N) / std::sqrt(a);
}

double surface_q_derivative(double q, double a, std::span<const double> b, int N) {
    // P'(q) as a stable sum of partial products
    double dprod = 0.0;
    for (std::size_t m = 0; m < b.size(); ++m) {
        double t = 1.0;
        for (std::size_t j = 0; j < b.size(); ++j)
            if (j != m) t *= (q - b[j]);
        dprod += t;
    }
    double prod = 1.0;
    for (double bm : b) prod *= (q - bm);
    const double s = std::pow(1.0 + q * q, -0.5 * N);
    return (dprod * s - prod * N * q * s / (1.0 + q * q)) / std::sqrt(a);
}

namespace {

// Monic coefficients of N q P(q) - (1+q^2) P'(q), ascending degree, length N+1.
std::vector<double> branch_poly(std::span<const double> b, int N) {
    auto P = detail::poly_from_roots(b);                     // degree N-1
    auto dP = detail::poly_derivative(P);                    // degree N-2
    std::vector<double> poly(N + 1, 0.0);
    for (std::size_t i = 0; i < P.size(); ++i) poly[i + 1] += N * P[i];
    // subtract (1+q^2) * dP
    for (std::size_t i = 0; i < dP.size(); ++i) {
        poly[i] -= dP[i];
        poly[i + 2] -= dP[i];
    }
    const double lead = poly[N]; // equals N - (N-1) = 1 in exact arithmetic
    for (auto& c : poly) c /= lead;
    return poly;
}

} // namespace

BranchPoints branch_points(std::span<const double> b, int N) {
    for (double v : b)
        if (!std::isfinite(v)) throw std::invalid_argument("branch_points: b must be finite");
    BranchPoints out;
    auto poly = branch_poly(b, N);
    if (!detail::companion_real_roots(poly, out.q, 1e-10)) {
        out.ok = false;
        out.message = "degenerate branch points: non-real roots";
        return out;
    }
    double scale = 1.0;
    for (double q : out.q) scale = std::max(scale, std::abs(q));
    for (std::size_t k = 1; k < out.q.size(); ++k) {
        if (out.q[k] - out.q[k - 1] < 1e-10 * scale) {
            out.ok = false;
            out.message = "degenerate branch points: root collision";
            return out;
        }
    }
    return out;
}

double branch_point_bound(std::span<const double> b, int N) {
    auto poly = branch_poly(b, N);
    double cmax = 0.0, csum = 0.0;
    for (int i = 0; i < N; ++i) {
        cmax = std::max(cmax, std::abs(poly[i]));
        csum += std::abs(poly[i]);
    }
    return std::min(1.0 + cmax, std::max(1.0, csum));
}

PointInvariants invariants_at(double a, std::span<const double> b, int N) {
    BranchPoints bp = branch_points(b, N);
    if (!bp.ok) throw numerical_error("invariants_at: " + bp.message);
    PointInvariants out;
    out.q = bp.q;
    const double w = 1.0 / std::sqrt(a);
    out.r.resize(N);
    out.mu.resize(N);
    for (int k = 0; k < N; ++k) {
        out.r[k] = surface_value(out.q[k], a, b, N);
        out.mu[k] = w * out.q[k];
    }
    return out;
}

RiemannData invariants_and_velocities(const HydroSnapshot& s) {
    const int N = s.degree;
    const int n = s.n();
    RiemannData out;
    out.q.assign(N, ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic));
    out.r.assign(N, ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic));
    out.mu.assign(N, ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic));

    std::vector<int> bad(n, 0);
    parallel_for(n, [&](std::ptrdiff_t i) {
        std::vector<double> bv(N - 1);
        for (int m = 0; m < N - 1; ++m) bv[m] = s.b[m].values[i];
        BranchPoints bp = branch_points(bv, N);
        if (!bp.ok) {
            bad[i] = 1;
            return;
        }
        const double a = s.a.values[i];
        const double w = 1.0 / std::sqrt(a);
        for (int k = 0; k < N; ++k) {
            out.q[k].values[i] = bp.q[k];
            out.r[k].values[i] = surface_value(bp.q[k], a, bv, N);
            out.mu[k].values[i] = w * bp.q[k];
        }
    });
    for (int i = 0; i < n; ++i)
        if (bad[i]) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "degenerate branch points at grid index %d", i);
            throw numerical_error(buf);
        }

    // labeling continuity: neighbor-to-neighbor motion of each family must
    // stay below half the smallest family gap
    for (int i = 0; i + 1 < n && out.continuity_ok; ++i) {
        double gap = std::numeric_limits<double>::max();
        for (int k = 0; k + 1 < N; ++k)
            gap = std::min(gap, out.q[k + 1].values[i] - out.q[k].values[i]);
        for (int k = 0; k < N; ++k)
            if (std::abs(out.q[k].values[i + 1] - out.q[k].values[i]) > 0.5 * gap)
                out.continuity_ok = false;
    }
    return out;
}

std::vector<double> moments(std::span<const double> b, int K) {
    std::vector<double> B(K + 1, 0.0);
    for (double bm : b) {
        double p = bm;
        for (int k = 0; k <= K; ++k) {
            B[k] += p;
            p *= bm;
        }
    }
    for (int k = 0; k <= K; ++k) B[k] /= (k + 1.0);
    return B;
}

ScalarField1D moment_field(const HydroSnapshot& s, int k) {
    ScalarField1D out(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    for (int i = 0; i < s.n(); ++i) {
        double sum = 0.0;
        for (const auto& bf : s.b) {
            double p = bf.values[i];
            for (int j = 0; j < k; ++j) p *= bf.values[i];
            sum += p;
        }
        out.values[i] = sum / (k + 1.0);
    }
    return out;
}

// Extended-precision internals: the map's inverse conditioning grows like
// (1+q^2)^{3/2}, so the round trip must not lose more than the unavoidable
// half-ulp of the returned density.
double generating_density(double q) {
    const long double ql = q;
    return static_cast<double>(ql / sqrtl(1.0L + ql * ql));
}

double generating_density_inverse(double p) {
    if (!(std::abs(p) < 1.0))
        throw std::domain_error("generating_density_inverse: |p| must be < 1");
    const long double pl = p;
    return static_cast<double>(pl / sqrtl((1.0L - pl) * (1.0L + pl)));
}

std::vector<ScalarField1D> liouville_residual(const std::vector<HydroSnapshot>& series,
                                              const std::vector<double>& y, double q) {
    if (series.size() != y.size())
        throw std::invalid_argument("liouville_residual: series/y size mismatch");
    if (series.size() < 3)
        throw std::invalid_argument("liouville_residual: need at least 3 snapshots");
    const int T = static_cast<int>(series.size());
    const int N = series[0].degree;
    const int n = series[0].n();

    auto L_field = [&](const HydroSnapshot& s) {
        ScalarField1D L(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        for (int i = 0; i < n; ++i) {
            std::vector<double> bv(N - 1);
            for (int m = 0; m < N - 1; ++m) bv[m] = s.b[m].values[i];
            L.values[i] = surface_value(q, s.a.values[i], bv, N);
        }
        return L;
    };
    auto w_field = [&](const HydroSnapshot& s) {
        ScalarField1D w(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        for (int i = 0; i < n; ++i) w.values[i] = 1.0 / std::sqrt(s.a.values[i]);
        return w;
    };

    std::vector<ScalarField1D> L(T);
    for (int t = 0; t < T; ++t) L[t] = L_field(series[t]);

    std::vector<ScalarField1D> out;
    out.reserve(T - 2);
    for (int t = 1; t + 1 < T; ++t) {
        const HydroSnapshot& s = series[t];
        ScalarField1D w = w_field(s);
        ScalarField1D wx = partial1d(w);
        ScalarField1D Lx = partial1d(L[t]);
        ScalarField1D res(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
        const double hm = y[t] - y[t - 1], hp = y[t + 1] - y[t];
        for (int i = 0; i < n; ++i) {
            std::vector<double> bv(N - 1);
            for (int m = 0; m < N - 1; ++m) bv[m] = s.b[m].values[i];
            const double Ly = central_nonuniform(L[t - 1].values[i], L[t].values[i],
                                                 L[t + 1].values[i], hm, hp);
            const double Lq = surface_q_derivative(q, s.a.values[i], bv, N);
            res.values[i] =
                Ly - w.values[i] * q * Lx.values[i] - (1.0 + q * q) * Lq * wx.values[i];
        }
        out.push_back(std::move(res));
    }
    return out;
}

namespace {

struct OffsetGrid {
    int N;
    int width; // points per axis (5: offsets -2..2)
    std::vector<std::vector<double>> mu; // per node
    int index(std::span<const int> off) const {
        int idx = 0;
        for (int d = 0; d < N; ++d) idx = idx * width + (off[d] + width / 2);
        return idx;
    }
};

} // namespace

TsarevResult semi_hamiltonian_defect(
    int N, double a0, std::span<const double> b0, double r_step,
    const std::function<void(const double* r, double* mu, int n)>& perturb) {
    if (N == 2) return {true, 0.0};
    if (N < 2) throw std::invalid_argument("semi_hamiltonian_defect: degree must be >= 2");

    auto r_of_u = [&](const Eigen::VectorXd& u) {
        std::vector<double> b(N - 1);
        for (int m = 0; m < N - 1; ++m) b[m] = u[m + 1];
        if (!(u[0] > 0.0)) throw numerical_error("semi_hamiltonian_defect: a left the positive cone");
        auto inv = invariants_at(u[0], b, N);
        Eigen::VectorXd r(N);
        for (int k = 0; k < N; ++k) r[k] = inv.r[k];
        return r;
    };
    auto mu_of_u = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& r_node) {
        std::vector<double> b(N - 1);
        for (int m = 0; m < N - 1; ++m) b[m] = u[m + 1];
        auto inv = invariants_at(u[0], b, N);
        std::vector<double> mu = inv.mu;
        if (perturb) {
            std::vector<double> rv(N);
            for (int k = 0; k < N; ++k) rv[k] = r_node[k];
            perturb(rv.data(), mu.data(), N);
        }
        return mu;
    };

    Eigen::VectorXd u0(N);
    u0[0] = a0;
    for (int m = 0; m < N - 1; ++m) u0[m + 1] = b0[m];
    const Eigen::VectorXd r0 = r_of_u(u0);

    {
        auto inv = invariants_at(a0, b0, N);
        double minsep = std::numeric_limits<double>::max(), scale = 0.0;
        for (int i = 0; i < N; ++i) {
            scale = std::max(scale, std::abs(inv.mu[i]));
            for (int j = i + 1; j < N; ++j)
                minsep = std::min(minsep, std::abs(inv.mu[i] - inv.mu[j]));
        }
        if (minsep <= 1e-9 * std::max(scale, 1.0))
            throw numerical_error("semi_hamiltonian_defect: coincident characteristic velocities");
    }

    auto jacobian = [&](const Eigen::VectorXd& u) {
        Eigen::MatrixXd J(N, N);
        for (int c = 0; c < N; ++c) {
            const double h = 1e-6 * std::max(1.0, std::abs(u[c]));
            Eigen::VectorXd up = u, um = u;
            up[c] += h;
            um[c] -= h;
            J.col(c) = (r_of_u(up) - r_of_u(um)) / (2.0 * h);
        }
        return J;
    };
    auto newton = [&](const Eigen::VectorXd& target, Eigen::VectorXd u) {
        const double tol = 1e-12 * std::max(1.0, r0.cwiseAbs().maxCoeff());
        for (int it = 0; it < 40; ++it) {
            Eigen::VectorXd res = r_of_u(u) - target;
            if (res.cwiseAbs().maxCoeff() < tol) return u;
            Eigen::VectorXd du = jacobian(u).partialPivLu().solve(res);
            u -= du;
        }
        throw numerical_error("semi_hamiltonian_defect: Newton inversion of r(u) failed");
    };

    OffsetGrid grid;
    grid.N = N;
    grid.width = 5;
    int total = 1;
    for (int d = 0; d < N; ++d) total *= grid.width;
    grid.mu.resize(total);

    std::vector<int> off(N, -grid.width / 2);
    Eigen::VectorXd warm = u0;
    while (true) {
        Eigen::VectorXd target = r0;
        for (int d = 0; d < N; ++d) target[d] += r_step * off[d];
        Eigen::VectorXd u = newton(target, warm);
        warm = u;
        grid.mu[grid.index(off)] = mu_of_u(u, target);
        int d = N - 1;
        while (d >= 0 && off[d] == grid.width / 2) {
            off[d] = -grid.width / 2;
            --d;
        }
        if (d < 0) break;
        ++off[d];
    }

    auto mu_at = [&](std::span<const int> o, int k) { return grid.mu[grid.index(o)][k]; };
    auto phi = [&](std::span<const int> node, int i, int k) {
        // d mu_k / d r_i / (mu_i - mu_k), centered at `node`
        std::vector<int> p(node.begin(), node.end()), m(node.begin(), node.end());
        p[i] += 1;
        m[i] -= 1;
        const double dmu = (mu_at(p, k) - mu_at(m, k)) / (2.0 * r_step);
        return dmu / (mu_at(node, i) - mu_at(node, k));
    };

    double defect = 0.0;
    std::vector<int> center(N, 0);
    for (int k = 0; k < N; ++k)
        for (int i = 0; i < N; ++i)
            for (int j = i + 1; j < N; ++j) {
                if (i == k || j == k) continue;
                std::vector<int> jp = center, jm = center, ip = center, im = center;
                jp[j] += 1;
                jm[j] -= 1;
                ip[i] += 1;
                im[i] -= 1;
                const double dj_phi_ik = (phi(jp, i, k) - phi(jm, i, k)) / (2.0 * r_step);
                const double di_phi_jk = (phi(ip, j, k) - phi(im, j, k)) / (2.0 * r_step);
                defect = std::max(defect, std::abs(dj_phi_ik - di_phi_jk));
            }
    return {false, defect};
}

} // namespace geoflow
