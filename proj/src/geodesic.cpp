#include "geoflow/geodesic.hpp"

#include "geoflow/core.hpp"

#include <algorithm>
#include <cmath>

namespace geoflow {

namespace {

// Tridiagonal interpolation solve (c_{i-1} + 4 c_i + c_{i+1})/6 = f_i for one
// line, natural end conditions (c_{-1} = 2c_0 - c_1, mirrored at the end),
// which pin c_0 = f_0 and c_{n-1} = f_{n-1}.
void prefilter_line(const double* f, double* c, int n, int stride) {
    std::vector<double> d(n), rhs(n);
    c[0] = f[0];
    c[(n - 1) * stride] = f[(n - 1) * stride];
    if (n == 2) return;
    // interior unknowns c_1..c_{n-2}
    const int m = n - 2;
    std::vector<double> diag(m, 4.0), r(m);
    for (int i = 0; i < m; ++i) r[i] = 6.0 * f[(i + 1) * stride];
    r[0] -= c[0];
    r[m - 1] -= c[(n - 1) * stride];
    for (int i = 1; i < m; ++i) {
        const double w = 1.0 / diag[i - 1];
        diag[i] -= w;
        r[i] -= w * r[i - 1];
    }
    double prev = r[m - 1] / diag[m - 1];
    c[(m)*stride] = prev;
    for (int i = m - 2; i >= 0; --i) {
        prev = (r[i] - prev) / diag[i];
        c[(i + 1) * stride] = prev;
    }
    (void)d;
    (void)rhs;
}

// Cyclic variant via Sherman-Morrison.
void prefilter_line_periodic(const double* f, double* c, int n, int stride) {
    // solve (A + u v^T) c = 6 f, A tridiagonal(1, 4, 1) with corners folded
    const double gamma = -4.0;
    std::vector<double> diag(n, 4.0), r(n), u(n, 0.0);
    diag[0] -= gamma;
    diag[n - 1] -= 1.0 / gamma;
    u[0] = gamma;
    u[n - 1] = 1.0;
    for (int i = 0; i < n; ++i) r[i] = 6.0 * f[i * stride];

    auto thomas = [&](std::vector<double> rhs) {
        std::vector<double> dd = diag, x(n);
        for (int i = 1; i < n; ++i) {
            const double w = 1.0 / dd[i - 1];
            dd[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        x[n - 1] = rhs[n - 1] / dd[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = (rhs[i] - x[i + 1]) / dd[i];
        return x;
    };
    std::vector<double> yv = thomas(r);
    std::vector<double> zv = thomas(u);
    const double vy = yv[0] + yv[n - 1] / gamma;
    const double vz = zv[0] + zv[n - 1] / gamma;
    const double fac = vy / (1.0 + vz);
    for (int i = 0; i < n; ++i) c[i * stride] = yv[i] - fac * zv[i];
}

inline void basis(double u, double B[4]) {
    const double v = 1.0 - u;
    B[0] = v * v * v / 6.0;
    B[1] = (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0;
    B[2] = (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0;
    B[3] = u * u * u / 6.0;
}

inline void basis_derivative(double u, double D[4]) {
    const double v = 1.0 - u;
    D[0] = -0.5 * v * v;
    D[1] = 1.5 * u * u - 2.0 * u;
    D[2] = -1.5 * u * u + u + 0.5;
    D[3] = 0.5 * u * u;
}

} // namespace

CubicSpline2D::CubicSpline2D(const ScalarField2D& f) : grid_(f.grid), c_(f.values) {
    const int nx = grid_.nx, ny = grid_.ny;
    std::vector<double> tmp(c_);
    // filter along axis 2 (contiguous rows), then along axis 1
    for (int i = 0; i < nx; ++i) {
        if (grid_.periodic_y)
            prefilter_line_periodic(tmp.data() + i * ny, c_.data() + i * ny, ny, 1);
        else
            prefilter_line(tmp.data() + i * ny, c_.data() + i * ny, ny, 1);
    }
    tmp = c_;
    for (int j = 0; j < ny; ++j) {
        if (grid_.periodic_x)
            prefilter_line_periodic(tmp.data() + j, c_.data() + j, nx, ny);
        else
            prefilter_line(tmp.data() + j, c_.data() + j, nx, ny);
    }
}

double CubicSpline2D::coeff(int i, int j) const {
    const int nx = grid_.nx, ny = grid_.ny;
    if (grid_.periodic_x) i = (i % nx + nx) % nx;
    if (grid_.periodic_y) j = (j % ny + ny) % ny;
    if (!grid_.periodic_x) {
        if (i == -1) return 2.0 * coeff(0, j) - coeff(1, j);
        if (i == nx) return 2.0 * coeff(nx - 1, j) - coeff(nx - 2, j);
    }
    if (!grid_.periodic_y) {
        if (j == -1) return 2.0 * coeff(i, 0) - coeff(i, 1);
        if (j == ny) return 2.0 * coeff(i, ny - 1) - coeff(i, ny - 2);
    }
    return c_[static_cast<std::size_t>(i) * ny + j];
}

bool CubicSpline2D::in_domain(double x1, double x2) const {
    const double eps = 1e-12;
    if (!grid_.periodic_x) {
        const double hi = grid_.x0 + (grid_.nx - 1) * grid_.dx;
        if (x1 < grid_.x0 - eps || x1 > hi + eps) return false;
    }
    if (!grid_.periodic_y) {
        const double hi = grid_.y0 + (grid_.ny - 1) * grid_.dy;
        if (x2 < grid_.y0 - eps || x2 > hi + eps) return false;
    }
    return true;
}

void CubicSpline2D::value_and_gradient(double x1, double x2, double& v, double& d1,
                                       double& d2) const {
    double t1 = (x1 - grid_.x0) / grid_.dx;
    double t2 = (x2 - grid_.y0) / grid_.dy;
    if (grid_.periodic_x) t1 -= grid_.nx * std::floor(t1 / grid_.nx);
    if (grid_.periodic_y) t2 -= grid_.ny * std::floor(t2 / grid_.ny);
    int i = static_cast<int>(std::floor(t1));
    int j = static_cast<int>(std::floor(t2));
    if (!grid_.periodic_x) i = std::clamp(i, 0, grid_.nx - 2);
    else i = std::min(i, grid_.nx - 1);
    if (!grid_.periodic_y) j = std::clamp(j, 0, grid_.ny - 2);
    else j = std::min(j, grid_.ny - 1);
    const double u = t1 - i, w = t2 - j;

    double B1[4], B2[4], D1[4], D2[4];
    basis(u, B1);
    basis(w, B2);
    basis_derivative(u, D1);
    basis_derivative(w, D2);

    v = d1 = d2 = 0.0;
    for (int m = 0; m < 4; ++m)
        for (int nn = 0; nn < 4; ++nn) {
            const double cc = coeff(i - 1 + m, j - 1 + nn);
            v += cc * B1[m] * B2[nn];
            d1 += cc * D1[m] * B2[nn];
            d2 += cc * B1[m] * D2[nn];
        }
    d1 /= grid_.dx;
    d2 /= grid_.dy;
}

double CubicSpline2D::value(double x1, double x2) const {
    double v, d1, d2;
    value_and_gradient(x1, x2, v, d1, d2);
    return v;
}

InterpolatedPolynomial::InterpolatedPolynomial(const MomentaPolynomial& f)
    : degree_(f.degree) {
    constants_.resize(f.degree + 1, 0.0);
    splines_.resize(f.degree + 1);
    for (int m = 0; m <= f.degree; ++m) {
        if (f.coeffs[m].is_constant())
            constants_[m] = f.coeffs[m].constant();
        else
            splines_[m] = std::make_unique<CubicSpline2D>(f.coeffs[m].field());
    }
}

double InterpolatedPolynomial::evaluate(double x1, double x2, double p1, double p2) const {
    double sum = 0.0;
    for (int m = 0; m <= degree_; ++m) {
        double a = splines_[m] ? splines_[m]->value(x1, x2) : constants_[m];
        if (a == 0.0) continue;
        for (int k = 0; k < degree_ - m; ++k) a *= p1;
        for (int k = 0; k < m; ++k) a *= p2;
        sum += a;
    }
    return sum;
}

void hamilton_rhs(const CubicSpline2D& g12, const PhaseState& s, double out[4]) {
    double g, g1, g2;
    g12.value_and_gradient(s.x1, s.x2, g, g1, g2);
    out[0] = s.p1 + g * s.p2;
    out[1] = g * s.p1 + s.p2;
    out[2] = -g1 * s.p1 * s.p2;
    out[3] = -g2 * s.p1 * s.p2;
}

GeodesicRecord integrate_geodesic(const CubicSpline2D& g12, const InterpolatedPolynomial* f,
                                  const PhaseState& s0, double t_end, double dt,
                                  int record_every) {
    if (!(dt > 0.0) || !(t_end > 0.0))
        throw std::invalid_argument("integrate_geodesic: dt and t_end must be positive");
    GeodesicRecord rec;

    auto H_of = [&](const PhaseState& s) {
        const double g = g12.value(s.x1, s.x2);
        return 0.5 * s.p1 * s.p1 + g * s.p1 * s.p2 + 0.5 * s.p2 * s.p2;
    };
    auto record = [&](double t, const PhaseState& s) {
        rec.t.push_back(t);
        rec.x1.push_back(s.x1);
        rec.x2.push_back(s.x2);
        rec.p1.push_back(s.p1);
        rec.p2.push_back(s.p2);
        rec.H.push_back(H_of(s));
        rec.f.push_back(f ? f->evaluate(s.x1, s.x2, s.p1, s.p2) : 0.0);
    };

    PhaseState s = s0;
    if (!g12.in_domain(s.x1, s.x2))
        throw std::invalid_argument("integrate_geodesic: initial state outside the domain");
    record(0.0, s);

    const int nsteps = static_cast<int>(std::ceil(t_end / dt - 1e-9));
    double t = 0.0;
    auto add = [](const PhaseState& a, const double k[4], double h) {
        PhaseState o;
        o.x1 = a.x1 + h * k[0];
        o.x2 = a.x2 + h * k[1];
        o.p1 = a.p1 + h * k[2];
        o.p2 = a.p2 + h * k[3];
        return o;
    };

    for (int step = 0; step < nsteps; ++step) {
        const double h = std::min(dt, t_end - t);
        double k1[4], k2[4], k3[4], k4[4];
        hamilton_rhs(g12, s, k1);
        PhaseState s2 = add(s, k1, 0.5 * h);
        if (!g12.in_domain(s2.x1, s2.x2)) { rec.exited = true; break; }
        hamilton_rhs(g12, s2, k2);
        PhaseState s3 = add(s, k2, 0.5 * h);
        if (!g12.in_domain(s3.x1, s3.x2)) { rec.exited = true; break; }
        hamilton_rhs(g12, s3, k3);
        PhaseState s4 = add(s, k3, h);
        if (!g12.in_domain(s4.x1, s4.x2)) { rec.exited = true; break; }
        hamilton_rhs(g12, s4, k4);
        PhaseState snew;
        snew.x1 = s.x1 + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
        snew.x2 = s.x2 + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
        snew.p1 = s.p1 + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
        snew.p2 = s.p2 + h / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]);
        if (!g12.in_domain(snew.x1, snew.x2)) { rec.exited = true; break; }
        s = snew;
        t += h;
        if ((step + 1) % record_every == 0 || step + 1 == nsteps) record(t, s);
    }

    rec.H_drift = drift(rec.H);
    rec.f_drift = f ? drift(rec.f) : 0.0;
    return rec;
}

double drift(std::span<const double> v, double floor) {
    if (v.empty()) throw std::invalid_argument("drift: empty series");
    const double v0 = v[0];
    double dev = 0.0;
    for (double x : v) dev = std::max(dev, std::abs(x - v0));
    if (std::abs(v0) <= floor) return dev; // absolute mode
    return dev / std::abs(v0);
}

} // namespace geoflow
