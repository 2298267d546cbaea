#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoflow/bridge.hpp"
#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"
#include "testutil.hpp"

#include <cmath>
#include <random>

using namespace geoflow;

namespace {

// Closed-form solution of the coefficient system on the (x1,x2) chart:
//   g12 = alpha (x1 + x2), a1 = zeta (1 + g12),
// with the forward chart E = exp(alpha (x + zeta y)), x1 = (E-1)/alpha - x.
struct ExactChart {
    double alpha = 0.13, zeta = 1.0;

    double g(double x1, double x2) const { return alpha * (x1 + x2); }
    double a1(double x1, double x2) const { return zeta * (1.0 + g(x1, x2)); }
    double E(double x, double y) const { return std::exp(alpha * (x + zeta * y)); }
    double x1_of(double x, double y) const { return (E(x, y) - 1.0) / alpha - x; }
    double g_chart(double x, double y) const { return E(x, y) - 1.0; }
    double a1_chart(double x, double y) const { return zeta * E(x, y); }
    double y_of(double x1, double x2) const {
        return std::log(1.0 + alpha * (x1 + x2)) / (zeta * alpha) - x2 / zeta;
    }
};

ChartSeries exact_forward_chart(const ExactChart& ex, int nx, double dx, double x0, int T,
                                double dy) {
    ChartSeries cs;
    cs.nx = nx;
    cs.dx = dx;
    cs.x0 = x0;
    cs.periodic = false;
    for (int t = 0; t < T; ++t) {
        const double y = t * dy;
        cs.y.push_back(y);
        cs.g12.push_back(ScalarField1D::sampled(nx, dx, x0, false,
                                                [&](double x) { return ex.g_chart(x, y); }));
        cs.aN1.push_back(ScalarField1D::sampled(nx, dx, x0, false,
                                                [&](double x) { return ex.a1_chart(x, y); }));
    }
    return cs;
}

} // namespace

TEST_CASE("Chebyshev-chart metric components and the inverse pair") {
    Grid2D grid(8, 8, 0.1, 0.1);
    {
        Metric2D m = metric_chebyshev(ScalarField2D(grid, 0.0));
        CHECK(max_abs(m.g12cov) == 0.0);
        for (double v : m.g11.values) CHECK(v == 1.0);
        for (double v : m.g22.values) CHECK(v == 1.0);
    }
    {
        Metric2D m = metric_chebyshev(ScalarField2D(grid, 0.5));
        for (double v : m.g11.values) CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
        for (double v : m.g22.values) CHECK(v == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
        for (double v : m.g12cov.values) CHECK(v == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
    }
    // contraction with the inverse metric (1, g12; g12, 1) is the identity
    std::mt19937_64 rng(50);
    ScalarField2D g12 = test::random_smooth_field2d(grid, rng, 0.0, 0.3);
    Metric2D m = metric_chebyshev(g12);
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j) {
            const double up[2][2] = {{1.0, g12.at(i, j)}, {g12.at(i, j), 1.0}};
            const double lo[2][2] = {{m.g11.at(i, j), m.g12cov.at(i, j)},
                                     {m.g12cov.at(i, j), m.g22.at(i, j)}};
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) {
                    const double prod = lo[r][0] * up[0][c] + lo[r][1] * up[1][c];
                    CHECK(std::abs(prod - (r == c ? 1.0 : 0.0)) <= 1e-14);
                }
        }
    // degenerate signature is rejected with the offending point named
    ScalarField2D bad(grid, 0.0);
    bad.at(2, 3) = 1.0;
    try {
        metric_chebyshev(bad);
        FAIL("expected rejection");
    } catch (const std::invalid_argument& e) {
        CHECK(std::string(e.what()).find("(2,3)") != std::string::npos);
    }
}

TEST_CASE("semi-geodesic metric coefficient") {
    Grid2D grid(8, 8, 0.1, 0.1);
    Metric2D m = metric_semigeodesic(ScalarField2D(grid, 1.0), ScalarField2D(grid, 0.0));
    for (double v : m.G.values) CHECK(v == 1.0);
    // G = 1/a when aN1 = sqrt((1-g^2)/a)
    const double a = 4.0, g = 0.3;
    ScalarField2D aN1(grid, std::sqrt((1.0 - g * g) / a));
    Metric2D m2 = metric_semigeodesic(aN1, ScalarField2D(grid, g));
    for (double v : m2.G.values) CHECK(v == doctest::Approx(1.0 / a).epsilon(1e-14));
}

TEST_CASE("forward potential of constant fields is linear") {
    Grid2D grid(12, 10, 0.2, 0.25);
    const double c = 0.4, d = 1.7;
    PotentialResult pr =
        reciprocal_forward(ScalarField2D(grid, c), ScalarField2D(grid, d));
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            CHECK(pr.potential.at(i, j) ==
                  doctest::Approx(grid.x(i) / d - c * grid.y(j) / d).epsilon(1e-13));
    CHECK(pr.path_defect < 1e-14);
    CHECK(max_abs(pr.closedness) < 1e-14);
}

TEST_CASE("forward potential on a consistent chart converges to the closed form") {
    ExactChart ex;
    auto err = [&](int n) {
        Grid2D grid(n, n, 0.6 / (n - 1), 0.6 / (n - 1), -0.3, -0.3, false, false);
        ScalarField2D g12 = ScalarField2D::sampled(grid, [&](double x1, double x2) {
            return ex.g(x1, x2);
        });
        ScalarField2D a1 = ScalarField2D::sampled(grid, [&](double x1, double x2) {
            return ex.a1(x1, x2);
        });
        PotentialResult pr = reciprocal_forward(g12, a1);
        double e = 0.0;
        const double ref0 = ex.y_of(grid.x0, grid.y0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                e = std::max(e, std::abs(pr.potential.at(i, j) -
                                         (ex.y_of(grid.x(i), grid.y(j)) - ref0)));
        return std::tuple<double, double, double>{e, max_abs(pr.closedness), pr.path_defect};
    };
    auto [e1, c1, p1] = err(24);
    auto [e2, c2, p2] = err(48);
    CHECK(e1 / e2 > 3.2);
    CHECK(c1 / c2 > 3.2);
    // the cellwise trapezoid circulations cancel almost exactly here
    CHECK(p1 < 1e-12);
    CHECK(p2 < 1e-12);
}

TEST_CASE("generic unrelated fields are exposed by the path-independence defect") {
    std::mt19937_64 rng(51);
    Grid2D grid(24, 24, 0.04, 0.04, 0.0, 0.0, false, false);
    ScalarField2D g12 = test::random_smooth_field2d(grid, rng, 0.0, 0.4);
    ScalarField2D aN1 = test::random_smooth_field2d(grid, rng, 2.0, 0.5);
    PotentialResult pr = reciprocal_forward(g12, aN1);
    CHECK(pr.path_defect > 1e-3);
    CHECK(max_abs(pr.closedness) > 1e-2);
}

TEST_CASE("snapshot reconstruction applies the density formulas") {
    ScalarField1D a1(16, 0.1, 0.0, true, 1.0);
    ScalarField1D b0(16, 0.1, 0.0, true, 0.0);
    ScalarField1D g12, aN1;
    reconstruct_snapshot(HydroSnapshot(2, a1, {b0}), 1, g12, aN1);
    CHECK(max_abs(g12) == 0.0);
    for (double v : aN1.values) CHECK(v == 1.0);

    ScalarField1D a4(16, 0.1, 0.0, true, 4.0);
    reconstruct_snapshot(HydroSnapshot(2, a4, {b0}), 1, g12, aN1);
    for (double v : aN1.values) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

    CHECK_THROWS_AS(reconstruct_snapshot(HydroSnapshot(2, a4, {b0}), 2, g12, aN1),
                    std::invalid_argument);
}

TEST_CASE("series reconstruction is closed on true solutions and flags corrupted data") {
    test::ExactTwoComponent ex;
    auto closedness = [&](int n, bool corrupt) {
        const double dx = 1.0 / n, dy = dx;
        std::vector<HydroSnapshot> series;
        std::vector<double> y;
        for (int t = 0; t < 7; ++t) {
            HydroSnapshot s = ex.snapshot(n, dx, -0.5, t * dy);
            if (corrupt && t == 3)
                for (int i = 0; i < n; ++i)
                    s.b[0].values[i] += 0.04 * std::sin(5.0 * s.a.x(i));
            series.push_back(std::move(s));
            y.push_back(t * dy);
        }
        Reconstruction rec = reconstruct_series(series, y, 1);
        // the density is a bounded metric entry by construction
        for (const auto& row : rec.chart.g12) CHECK(max_abs(row) < 1.0);
        CHECK(rec.min_aN1 > 0.0);
        return rec.closedness_max;
    };
    const double e1 = closedness(32, false), e2 = closedness(64, false);
    CHECK(e1 / e2 > 3.2);
    CHECK(closedness(64, true) > 0.05); // corrupted data stays O(1)
}

TEST_CASE("chart potential: constants and the closed-form chart") {
    // constants: x1 = c x + d y
    {
        ChartSeries cs;
        cs.nx = 12;
        cs.dx = 0.1;
        cs.x0 = 0.0;
        cs.periodic = false;
        const double c = 0.3, d = 1.2;
        for (int t = 0; t < 5; ++t) {
            cs.y.push_back(0.07 * t);
            cs.g12.push_back(ScalarField1D(12, 0.1, 0.0, false, c));
            cs.aN1.push_back(ScalarField1D(12, 0.1, 0.0, false, d));
        }
        double defect = 0.0;
        auto rows = x1_potential(cs, &defect);
        CHECK(defect < 1e-14);
        for (int t = 0; t < 5; ++t)
            for (int i = 0; i < 12; ++i)
                CHECK(rows[t].values[i] ==
                      doctest::Approx(c * (0.1 * i) + d * cs.y[t]).epsilon(1e-13));
    }
    // consistent chart: potential matches the closed form at second order
    ExactChart ex;
    auto err = [&](int n) {
        const double dx = 0.6 / (n - 1);
        ChartSeries cs = exact_forward_chart(ex, n, dx, -0.3, n, dx);
        double defect = 0.0;
        auto rows = x1_potential(cs, &defect);
        const double ref = ex.x1_of(-0.3, 0.0);
        double e = 0.0;
        for (std::size_t t = 0; t < cs.y.size(); ++t)
            for (int i = 0; i < n; ++i)
                e = std::max(e, std::abs(rows[t].values[i] -
                                         (ex.x1_of(cs.x0 + i * dx, cs.y[t]) - ref)));
        return std::pair<double, double>{e, defect};
    };
    auto [e1, d1] = err(20);
    auto [e2, d2] = err(40);
    CHECK(e1 / e2 > 3.2);
    CHECK(d1 < 1e-4);
    CHECK(d2 < 2.5e-5);
}

TEST_CASE("chart inversion resamples fields onto the (x1,x2) grid") {
    ExactChart ex;
    const int n = 40;
    const double dx = 0.6 / (n - 1);
    ChartSeries cs = exact_forward_chart(ex, n, dx, -0.3, n, dx);
    auto rows = x1_potential(cs, nullptr);
    // shift rows to absolute x1 values to compare against closed forms
    const double ref = ex.x1_of(-0.3, 0.0);
    for (auto& r : rows)
        for (auto& v : r.values) v += ref;

    double lo, hi;
    chart_image_bounds(cs, rows, lo, hi);
    REQUIRE(hi > lo);
    Grid2D target(16, 16, (hi - lo) * 0.9 / 15, (0.6 - 4 * dx) / 15, lo + 0.05 * (hi - lo),
                  -0.3 + 2 * dx, false, false);
    InvertedChart inv = invert_chart(cs, rows, {&cs.g12, &cs.aN1}, target);
    for (int i = 0; i < target.nx; ++i)
        for (int j = 0; j < target.ny; ++j) {
            const double x1 = target.x(i), x2 = target.y(j);
            CHECK(std::abs(inv.fields[0].at(i, j) - ex.g(x1, x2)) < 5e-6);
            CHECK(std::abs(inv.fields[1].at(i, j) - ex.a1(x1, x2)) < 5e-6);
        }
    // x2 = x holds by construction: a target outside the sampled x range fails
    Grid2D outside(8, 8, 0.01, 0.2, lo + 0.05 * (hi - lo), -0.5, false, false);
    CHECK_THROWS_AS(invert_chart(cs, rows, {&cs.g12}, outside), numerical_error);
}

TEST_CASE("generating-equation residual on the original chart") {
    ExactChart ex;
    const double lam0 = 0.07;
    auto level_p = [&](double x1, double x2) {
        const double g = ex.g(x1, x2), a1 = ex.a1(x1, x2);
        const double bq = 2.0 * g * lam0 - a1;
        const double s = (-bq + std::sqrt(bq * bq - 4.0 * lam0 * lam0)) / (2.0 * lam0);
        return 1.0 / std::sqrt(1.0 + 2.0 * g * s + s * s);
    };
    auto err = [&](int n) {
        Grid2D grid(n, n, 0.6 / (n - 1), 0.6 / (n - 1), -0.3, -0.3, false, false);
        ScalarField2D p = ScalarField2D::sampled(grid, level_p);
        ScalarField2D g12 = ScalarField2D::sampled(grid, [&](double x1, double x2) {
            return ex.g(x1, x2);
        });
        return max_abs(hj_residual_chebyshev(p, g12));
    };
    const double e1 = err(24), e2 = err(48);
    CHECK(e1 / e2 > 3.2);
    CHECK(e2 < 1e-3);

    // constants give a zero residual
    Grid2D grid(8, 8, 0.1, 0.1);
    CHECK(max_abs(hj_residual_chebyshev(ScalarField2D(grid, 0.5), ScalarField2D(grid, 0.2))) ==
          0.0);

    // noise is exposed at O(1)
    std::mt19937_64 rng(52);
    Grid2D g48(48, 48, 0.6 / 47, 0.6 / 47, -0.3, -0.3, false, false);
    ScalarField2D p = ScalarField2D::sampled(g48, level_p);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto& v : p.values) v += 0.01 * U(rng);
    ScalarField2D g12 = ScalarField2D::sampled(g48, [&](double x1, double x2) {
        return ex.g(x1, x2);
    });
    CHECK(max_abs(hj_residual_chebyshev(p, g12)) > 0.1);

    // square-root domain violations are rejected
    ScalarField2D pbad(grid, 1.2);
    ScalarField2D gz(grid, 0.0);
    CHECK_THROWS_AS(hj_residual_chebyshev(pbad, gz), std::invalid_argument);
}

TEST_CASE("generating-equation residual on the semi-geodesic chart") {
    // constants vanish
    {
        std::vector<ScalarField1D> pt(3, ScalarField1D(8, 0.1, 0.0, false, 0.4));
        std::vector<ScalarField1D> aN1(3, ScalarField1D(8, 0.1, 0.0, false, 1.1));
        std::vector<ScalarField1D> g12(3, ScalarField1D(8, 0.1, 0.0, false, 0.2));
        auto res = hj_residual_semigeodesic(pt, aN1, g12, {0.0, 0.1, 0.2});
        REQUIRE(res.size() == 1);
        CHECK(max_abs(res[0]) < 1e-14);
    }
    // the reconstruction density from an exact evolution satisfies the equation
    test::ExactTwoComponent ex;
    auto err = [&](int n) {
        const double dx = 1.0 / n, dy = dx;
        std::vector<HydroSnapshot> series;
        std::vector<double> y;
        for (int t = 0; t < 7; ++t) {
            series.push_back(ex.snapshot(n, dx, -0.5, t * dy));
            y.push_back(t * dy);
        }
        Reconstruction rec = reconstruct_series(series, y, 1);
        auto res = hj_residual_semigeodesic(rec.chart.g12, rec.chart.aN1, rec.chart.g12,
                                            rec.chart.y);
        double m = 0.0;
        for (const auto& f : res) m = std::max(m, max_abs(f));
        return m;
    };
    const double e1 = err(32), e2 = err(64);
    CHECK(e1 / e2 > 3.2);

    // chained identity: ptilde computed from the p-family on the forward chart
    ExactChart exc;
    const double lam0 = 0.07;
    auto ptilde_of = [&](double x, double y) {
        const double x1 = exc.x1_of(x, y), x2 = x;
        const double g = exc.g(x1, x2), a1 = exc.a1(x1, x2);
        const double bq = 2.0 * g * lam0 - a1;
        const double s = (-bq + std::sqrt(bq * bq - 4.0 * lam0 * lam0)) / (2.0 * lam0);
        const double p = 1.0 / std::sqrt(1.0 + 2.0 * g * s + s * s);
        return std::sqrt((g * g - 1.0) * p * p + 1.0);
    };
    auto errc = [&](int n) {
        const double dx = 0.5 / (n - 1), dy = dx;
        std::vector<ScalarField1D> pt, aN1, g12;
        std::vector<double> y;
        for (int t = 0; t < n; ++t) {
            const double yv = t * dy;
            y.push_back(yv);
            pt.push_back(ScalarField1D::sampled(n, dx, -0.25, false,
                                                [&](double x) { return ptilde_of(x, yv); }));
            aN1.push_back(ScalarField1D::sampled(n, dx, -0.25, false, [&](double x) {
                return exc.a1_chart(x, yv);
            }));
            g12.push_back(ScalarField1D::sampled(n, dx, -0.25, false, [&](double x) {
                return exc.g_chart(x, yv);
            }));
        }
        auto res = hj_residual_semigeodesic(pt, aN1, g12, y);
        double m = 0.0;
        for (const auto& f : res) m = std::max(m, max_abs(f));
        return m;
    };
    const double c1 = errc(24), c2 = errc(48);
    CHECK(c1 / c2 > 3.2);
    CHECK(c2 < 1e-3);
}
