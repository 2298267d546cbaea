#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoflow/geodesic.hpp"
#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace geoflow;

namespace {

Grid2D centered_grid(int n, double half, bool periodic = false) {
    const double dx = 2.0 * half / (n - 1);
    return Grid2D(n, n, dx, dx, -half, -half, periodic, periodic);
}

// Integrable fixture: g12 = G(x1+x2) for any profile G and a1 = zeta (1+g12)
// solve the quadratic-integral coefficient system exactly; f = a1 p1 p2.
struct IntegrableMetric {
    double amp = 0.3, zeta = 1.0;
    double gval(double x1, double x2) const { return amp * std::sin(x1 + x2); }
    ScalarField2D g12(const Grid2D& g) const {
        return ScalarField2D::sampled(g, [&](double x1, double x2) { return gval(x1, x2); });
    }
    ScalarField2D a1(const Grid2D& g) const {
        return ScalarField2D::sampled(g, [&](double x1, double x2) {
            return zeta * (1.0 + gval(x1, x2));
        });
    }
};

} // namespace

TEST_CASE("the spline interpolates the samples and converges") {
    auto f = [](double x, double y) { return std::sin(1.3 * x) * std::cos(0.9 * y) + 0.2 * x; };
    for (bool periodic : {false}) {
        Grid2D g = centered_grid(25, 1.0, periodic);
        CubicSpline2D s(ScalarField2D::sampled(g, f));
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j)
                CHECK(std::abs(s.value(g.x(i), g.y(j)) - f(g.x(i), g.y(j))) < 1e-12);
    }
    auto err = [&](int n) {
        Grid2D g = centered_grid(n, 1.0);
        CubicSpline2D s(ScalarField2D::sampled(g, f));
        double e = 0.0;
        for (double x = -0.7; x <= 0.7; x += 0.043)
            for (double y = -0.7; y <= 0.7; y += 0.037)
                e = std::max(e, std::abs(s.value(x, y) - f(x, y)));
        return e;
    };
    const double e1 = err(21), e2 = err(41);
    CHECK(e1 / e2 > 8.0); // interior error drops at about fourth order
}

TEST_CASE("periodic splines wrap consistently") {
    const int n = 32;
    const double L = 2.0 * M_PI;
    Grid2D g(n, n, L / n, L / n, 0.0, 0.0, true, true);
    auto f = [](double x, double y) { return std::sin(x) * std::cos(2.0 * y); };
    CubicSpline2D s(ScalarField2D::sampled(g, f));
    for (double x : {0.3, 2.0, 5.5})
        for (double y : {0.1, 3.3}) {
            CHECK(s.value(x, y) == doctest::Approx(s.value(x + L, y)).epsilon(1e-12));
            CHECK(s.value(x, y) == doctest::Approx(s.value(x, y - L)).epsilon(1e-12));
            CHECK(std::abs(s.value(x, y) - f(x, y)) < 2e-4);
        }
}

TEST_CASE("spline gradients converge to the analytic gradient") {
    auto f = [](double x, double y) { return std::sin(1.1 * x + 0.4) * std::cos(0.7 * y); };
    auto fx = [](double x, double y) { return 1.1 * std::cos(1.1 * x + 0.4) * std::cos(0.7 * y); };
    auto fy = [](double x, double y) { return -0.7 * std::sin(1.1 * x + 0.4) * std::sin(0.7 * y); };
    auto err = [&](int n) {
        Grid2D g = centered_grid(n, 1.0);
        CubicSpline2D s(ScalarField2D::sampled(g, f));
        double e = 0.0;
        for (double x = -0.6; x <= 0.6; x += 0.05)
            for (double y = -0.6; y <= 0.6; y += 0.05) {
                double v, d1, d2;
                s.value_and_gradient(x, y, v, d1, d2);
                e = std::max({e, std::abs(d1 - fx(x, y)), std::abs(d2 - fy(x, y))});
            }
        return e;
    };
    const double e1 = err(21), e2 = err(41);
    CHECK(e1 / e2 > 6.0);
    CHECK(e2 < 1e-4);
}

TEST_CASE("flat metric gives straight lines and exact conservation") {
    Grid2D g = centered_grid(16, 4.0);
    CubicSpline2D spline(ScalarField2D(g, 0.0));
    MomentaPolynomial f(2, {Coefficient(0.0), Coefficient(1.0), Coefficient(0.0)});
    InterpolatedPolynomial fi(f);
    PhaseState s0{0.1, -0.2, 0.4, 0.3};
    GeodesicRecord rec = integrate_geodesic(spline, &fi, s0, 2.0, 1e-3, 100);
    CHECK_FALSE(rec.exited);
    CHECK(rec.H_drift < 1e-12);
    CHECK(rec.f_drift < 1e-12);
    const std::size_t last = rec.t.size() - 1;
    CHECK(rec.x1[last] == doctest::Approx(0.1 + 0.4 * rec.t[last]).epsilon(1e-12));
    CHECK(rec.x2[last] == doctest::Approx(-0.2 + 0.3 * rec.t[last]).epsilon(1e-12));
    CHECK(rec.p1[last] == doctest::Approx(0.4).epsilon(1e-13));
}

TEST_CASE("constant off-diagonal metric still yields straight trajectories") {
    Grid2D g = centered_grid(16, 4.0);
    CubicSpline2D spline(ScalarField2D(g, 0.35));
    GeodesicRecord rec = integrate_geodesic(spline, nullptr, {0.0, 0.0, 0.3, -0.1}, 3.0, 1e-3, 50);
    CHECK(rec.H_drift < 1e-12);
    CHECK(rec.p1.back() == doctest::Approx(0.3).epsilon(1e-13));
    CHECK(rec.p2.back() == doctest::Approx(-0.1).epsilon(1e-13));
}

TEST_CASE("hamilton_rhs matches finite differences of H in phase space") {
    std::mt19937_64 rng(60);
    Grid2D g = centered_grid(33, 1.5);
    CubicSpline2D spline(test::random_smooth_field2d(g, rng, 0.0, 0.3));
    auto H_of = [&](double x1, double x2, double p1, double p2) {
        const double gv = spline.value(x1, x2);
        return 0.5 * p1 * p1 + gv * p1 * p2 + 0.5 * p2 * p2;
    };
    const PhaseState s{0.2, -0.3, 0.7, -0.4};
    double rhs[4];
    hamilton_rhs(spline, s, rhs);
    const double d = 1e-5;
    CHECK(rhs[0] == doctest::Approx((H_of(s.x1, s.x2, s.p1 + d, s.p2) -
                                     H_of(s.x1, s.x2, s.p1 - d, s.p2)) / (2 * d)).epsilon(1e-7));
    CHECK(rhs[1] == doctest::Approx((H_of(s.x1, s.x2, s.p1, s.p2 + d) -
                                     H_of(s.x1, s.x2, s.p1, s.p2 - d)) / (2 * d)).epsilon(1e-7));
    CHECK(rhs[2] == doctest::Approx(-(H_of(s.x1 + d, s.x2, s.p1, s.p2) -
                                      H_of(s.x1 - d, s.x2, s.p1, s.p2)) / (2 * d)).epsilon(1e-6));
    CHECK(rhs[3] == doctest::Approx(-(H_of(s.x1, s.x2 + d, s.p1, s.p2) -
                                      H_of(s.x1, s.x2 - d, s.p1, s.p2)) / (2 * d)).epsilon(1e-6));
}

TEST_CASE("energy drift stays below 1e-8 over long smooth runs") {
    std::mt19937_64 rng(61);
    Grid2D g = centered_grid(41, 6.0);
    ScalarField2D field = test::random_smooth_field2d(g, rng, 0.0, 0.25, 2);
    CubicSpline2D spline(field);
    GeodesicRecord rec = integrate_geodesic(spline, nullptr, {0.0, 0.0, 0.35, -0.25}, 10.0,
                                            1e-3, 200);
    CHECK_FALSE(rec.exited);
    CHECK(rec.H_drift < 1e-8);
}

TEST_CASE("time reversal returns to the initial state") {
    std::mt19937_64 rng(62);
    Grid2D g = centered_grid(41, 5.0);
    CubicSpline2D spline(test::random_smooth_field2d(g, rng, 0.0, 0.25, 2));
    const PhaseState s0{0.1, 0.2, 0.3, -0.2};
    GeodesicRecord fwd = integrate_geodesic(spline, nullptr, s0, 2.0, 1e-3, 1000000);
    PhaseState mid{fwd.x1.back(), fwd.x2.back(), fwd.p1.back(), fwd.p2.back()};
    // reverse momenta, integrate the same span, reverse again
    GeodesicRecord rev = integrate_geodesic(spline, nullptr,
                                            {mid.x1, mid.x2, -mid.p1, -mid.p2}, 2.0, 1e-3,
                                            1000000);
    CHECK(std::abs(rev.x1.back() - s0.x1) < 1e-10);
    CHECK(std::abs(rev.x2.back() - s0.x2) < 1e-10);
    CHECK(std::abs(rev.p1.back() + s0.p1) < 1e-10);
    CHECK(std::abs(rev.p2.back() + s0.p2) < 1e-10);
}

TEST_CASE("first integral is conserved on the integrable metric, and refinement helps") {
    IntegrableMetric im;
    auto drift_at = [&](int n) {
        Grid2D g = centered_grid(n, 0.8);
        CubicSpline2D spline(im.g12(g));
        MomentaPolynomial f =
            MomentaPolynomial::normal_form(2, {Coefficient(im.a1(g))});
        InterpolatedPolynomial fi(f);
        GeodesicRecord rec =
            integrate_geodesic(spline, &fi, {0.0, 0.0, 0.3, 0.2}, 1.0, 1e-3, 50);
        REQUIRE_FALSE(rec.exited);
        return rec.f_drift;
    };
    const double d1 = drift_at(11), d2 = drift_at(21), d3 = drift_at(41);
    CHECK(d2 < d1);
    CHECK(d3 < d2);
    CHECK(d3 < 1e-7);
}

TEST_CASE("a perturbed metric destroys first-integral conservation") {
    IntegrableMetric im;
    Grid2D g = centered_grid(41, 0.8);
    ScalarField2D g12 = im.g12(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            g12.at(i, j) += 0.05 * std::sin(9.0 * g.x(i)) * std::cos(7.0 * g.y(j));
    CubicSpline2D spline(g12);
    MomentaPolynomial f = MomentaPolynomial::normal_form(2, {Coefficient(im.a1(g))});
    InterpolatedPolynomial fi(f);
    GeodesicRecord rec = integrate_geodesic(spline, &fi, {0.0, 0.0, 0.3, 0.2}, 1.0, 1e-3, 50);
    CHECK(rec.f_drift > 1e-2);
}

TEST_CASE("leaving the domain truncates the trajectory with the exit flag") {
    Grid2D g = centered_grid(11, 0.5);
    CubicSpline2D spline(ScalarField2D(g, 0.0));
    GeodesicRecord rec = integrate_geodesic(spline, nullptr, {0.0, 0.0, 1.0, 0.0}, 5.0, 1e-2);
    CHECK(rec.exited);
    CHECK(rec.t.back() < 5.0);
    CHECK(std::abs(rec.x1.back()) <= 0.5 + 1e-9);
    // starting outside is a caller error
    CHECK_THROWS_AS(integrate_geodesic(spline, nullptr, {2.0, 0.0, 1.0, 0.0}, 1.0, 1e-2),
                    std::invalid_argument);
}

TEST_CASE("drift measures max relative deviation with an absolute fallback") {
    std::vector<double> c{2.0, 2.0, 2.0};
    CHECK(drift(c) == 0.0);
    std::vector<double> v{1.0, 1.001};
    CHECK(drift(v) == doctest::Approx(1e-3).epsilon(1e-9));
    std::vector<double> z{0.0, 0.0, 0.0};
    CHECK(drift(z) == 0.0);
    std::vector<double> za{0.0, 0.5};
    CHECK(drift(za) == doctest::Approx(0.5)); // absolute mode
}
