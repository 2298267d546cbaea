#include "geoflow/bridge.hpp"

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

namespace geoflow {

namespace {

[[noreturn]] void reject_point(const char* what, int i, int j, double v) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%s at grid point (%d,%d), value %g", what, i, j, v);
    throw std::invalid_argument(buf);
}

} // namespace

Metric2D metric_chebyshev(const ScalarField2D& g12) {
    const Grid2D& g = g12.grid;
    Metric2D m;
    m.chart = Metric2D::Chart::Chebyshev;
    m.g11 = ScalarField2D(g);
    m.g12cov = ScalarField2D(g);
    m.g22 = ScalarField2D(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double v = g12.at(i, j);
            if (!(std::abs(v) < 1.0))
                reject_point("metric_chebyshev: |g12| >= 1 (degenerate signature)", i, j, v);
            const double d = 1.0 - v * v;
            m.g11.at(i, j) = 1.0 / d;
            m.g22.at(i, j) = 1.0 / d;
            m.g12cov.at(i, j) = -v / d;
        }
    return m;
}

Metric2D metric_semigeodesic(const ScalarField2D& aN1, const ScalarField2D& g12) {
    require_same_grid(aN1.grid, g12.grid, "metric_semigeodesic");
    const Grid2D& g = g12.grid;
    Metric2D m;
    m.chart = Metric2D::Chart::Semigeodesic;
    m.G = ScalarField2D(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double gv = g12.at(i, j);
            const double av = aN1.at(i, j);
            if (!(std::abs(gv) < 1.0))
                reject_point("metric_semigeodesic: |g12| >= 1 (degenerate signature)", i, j, gv);
            if (av == 0.0) reject_point("metric_semigeodesic: aN1 vanishes", i, j, av);
            m.G.at(i, j) = av * av / (1.0 - gv * gv);
        }
    return m;
}

PotentialResult potential_from_form(const ScalarField2D& P, const ScalarField2D& Q) {
    require_same_grid(P.grid, Q.grid, "potential_from_form");
    const Grid2D& g = P.grid;
    PotentialResult out;
    out.potential = ScalarField2D(g);
    ScalarField2D alt(g);

    // canonical path: along axis 1 at j = 0, then along axis 2
    std::vector<double> row0(g.nx, 0.0);
    for (int i = 1; i < g.nx; ++i)
        row0[i] = row0[i - 1] + 0.5 * (P.at(i - 1, 0) + P.at(i, 0)) * g.dx;
    for (int i = 0; i < g.nx; ++i) {
        out.potential.at(i, 0) = row0[i];
        for (int j = 1; j < g.ny; ++j)
            out.potential.at(i, j) =
                out.potential.at(i, j - 1) + 0.5 * (Q.at(i, j - 1) + Q.at(i, j)) * g.dy;
    }
    // opposite order: along axis 2 at i = 0, then along axis 1
    std::vector<double> col0(g.ny, 0.0);
    for (int j = 1; j < g.ny; ++j)
        col0[j] = col0[j - 1] + 0.5 * (Q.at(0, j - 1) + Q.at(0, j)) * g.dy;
    for (int j = 0; j < g.ny; ++j) {
        alt.at(0, j) = col0[j];
        for (int i = 1; i < g.nx; ++i)
            alt.at(i, j) = alt.at(i - 1, j) + 0.5 * (P.at(i - 1, j) + P.at(i, j)) * g.dx;
    }
    for (std::size_t k = 0; k < alt.values.size(); ++k)
        out.path_defect =
            std::max(out.path_defect, std::abs(alt.values[k] - out.potential.values[k]));

    ScalarField2D P2 = partial(P, 2);
    ScalarField2D Q1 = partial(Q, 1);
    out.closedness = ScalarField2D(g);
    for (std::size_t k = 0; k < P2.values.size(); ++k)
        out.closedness.values[k] = P2.values[k] - Q1.values[k];
    return out;
}

PotentialResult reciprocal_forward(const ScalarField2D& g12, const ScalarField2D& aN1) {
    require_same_grid(g12.grid, aN1.grid, "reciprocal_forward");
    const Grid2D& g = g12.grid;
    ScalarField2D P(g), Q(g);
    for (std::size_t k = 0; k < P.values.size(); ++k) {
        const double a = aN1.values[k];
        if (a == 0.0)
            throw std::invalid_argument("reciprocal_forward: aN1 vanishes somewhere on the grid");
        P.values[k] = 1.0 / a;
        Q.values[k] = -g12.values[k] / a;
    }
    return potential_from_form(P, Q);
}

void reconstruct_snapshot(const HydroSnapshot& s, int k, ScalarField1D& g12,
                          ScalarField1D& aN1) {
    if (k < 1 || k > s.degree - 1)
        throw std::invalid_argument("reconstruct_snapshot: root index outside 1..N-1");
    const int n = s.n();
    g12 = ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    aN1 = ScalarField1D(s.a.nx, s.a.dx, s.a.x0, s.a.periodic);
    for (int i = 0; i < n; ++i) {
        const double b = s.b[k - 1].values[i];
        const double a = s.a.values[i];
        const double h = b / std::sqrt(1.0 + b * b);
        g12.values[i] = h;
        aN1.values[i] = std::sqrt((1.0 - h * h) / a);
    }
}

Reconstruction reconstruct_series(const std::vector<HydroSnapshot>& states,
                                  const std::vector<double>& y, int k) {
    if (states.size() != y.size())
        throw std::invalid_argument("reconstruct_series: states/y size mismatch");
    if (states.size() < 3)
        throw std::invalid_argument("reconstruct_series: need at least 3 snapshots");
    const int T = static_cast<int>(states.size());

    Reconstruction rec;
    ChartSeries& cs = rec.chart;
    cs.nx = states[0].a.nx;
    cs.dx = states[0].a.dx;
    cs.x0 = states[0].a.x0;
    cs.periodic = states[0].a.periodic;
    // the chart's y axis runs opposite to the evolution coordinate
    for (int t = T - 1; t >= 0; --t) cs.y.push_back(y.back() - y[t]);
    rec.min_aN1 = std::numeric_limits<double>::max();
    for (int t = T - 1; t >= 0; --t) {
        ScalarField1D g12row, aN1row;
        reconstruct_snapshot(states[t], k, g12row, aN1row);
        for (double v : aN1row.values) rec.min_aN1 = std::min(rec.min_aN1, v);
        cs.g12.push_back(std::move(g12row));
        cs.aN1.push_back(std::move(aN1row));
    }

    for (int t = 1; t + 1 < T; ++t) {
        ScalarField1D ax = partial1d(cs.aN1[t]);
        ScalarField1D res(cs.nx, cs.dx, cs.x0, cs.periodic);
        const double hm = cs.y[t] - cs.y[t - 1], hp = cs.y[t + 1] - cs.y[t];
        for (int i = 0; i < cs.nx; ++i) {
            const double gy = central_nonuniform(cs.g12[t - 1].values[i], cs.g12[t].values[i],
                                                 cs.g12[t + 1].values[i], hm, hp);
            res.values[i] = gy - ax.values[i];
            rec.closedness_max = std::max(rec.closedness_max, std::abs(res.values[i]));
        }
        rec.closedness.push_back(std::move(res));
    }
    return rec;
}

std::vector<ScalarField1D> x1_potential(const ChartSeries& cs, double* path_defect) {
    const int T = static_cast<int>(cs.y.size());
    if (T < 2 || static_cast<int>(cs.g12.size()) != T || static_cast<int>(cs.aN1.size()) != T)
        throw std::invalid_argument("x1_potential: inconsistent chart series");

    std::vector<ScalarField1D> x1(T, ScalarField1D(cs.nx, cs.dx, cs.x0, cs.periodic));
    // x leg along row 0, then the y legs per column
    for (int i = 1; i < cs.nx; ++i)
        x1[0].values[i] = x1[0].values[i - 1] +
                          0.5 * (cs.g12[0].values[i - 1] + cs.g12[0].values[i]) * cs.dx;
    for (int t = 1; t < T; ++t) {
        const double dy = cs.y[t] - cs.y[t - 1];
        for (int i = 0; i < cs.nx; ++i)
            x1[t].values[i] = x1[t - 1].values[i] +
                              0.5 * (cs.aN1[t - 1].values[i] + cs.aN1[t].values[i]) * dy;
    }
    if (path_defect) {
        // opposite order: y leg along column 0, then x legs per row
        double defect = 0.0;
        std::vector<double> col0(T, 0.0);
        for (int t = 1; t < T; ++t)
            col0[t] = col0[t - 1] + 0.5 * (cs.aN1[t - 1].values[0] + cs.aN1[t].values[0]) *
                                        (cs.y[t] - cs.y[t - 1]);
        for (int t = 0; t < T; ++t) {
            double acc = col0[t];
            defect = std::max(defect, std::abs(acc - x1[t].values[0]));
            for (int i = 1; i < cs.nx; ++i) {
                acc += 0.5 * (cs.g12[t].values[i - 1] + cs.g12[t].values[i]) * cs.dx;
                defect = std::max(defect, std::abs(acc - x1[t].values[i]));
            }
        }
        *path_defect = defect;
    }
    return x1;
}

void chart_image_bounds(const ChartSeries& cs, const std::vector<ScalarField1D>& x1rows,
                        double& x1_lo, double& x1_hi) {
    x1_lo = -std::numeric_limits<double>::max();
    x1_hi = std::numeric_limits<double>::max();
    for (int i = 0; i < cs.nx; ++i) {
        x1_lo = std::max(x1_lo, x1rows.front().values[i]);
        x1_hi = std::min(x1_hi, x1rows.back().values[i]);
    }
}

namespace {

// Lagrange interpolation through 4 nodes.
double lagrange4(const double* xs, const double* ys, double x) {
    double out = 0.0;
    for (int m = 0; m < 4; ++m) {
        double w = ys[m];
        for (int j = 0; j < 4; ++j)
            if (j != m) w *= (x - xs[j]) / (xs[m] - xs[j]);
        out += w;
    }
    return out;
}

} // namespace

InvertedChart invert_chart(const ChartSeries& cs, const std::vector<ScalarField1D>& x1rows,
                           const std::vector<const std::vector<ScalarField1D>*>& fields,
                           const Grid2D& target) {
    const int T = static_cast<int>(cs.y.size());
    if (T < 4) throw std::invalid_argument("invert_chart: need at least 4 y stations");

    InvertedChart out;
    out.grid = target;
    out.fields.assign(fields.size(), ScalarField2D(target));

    std::vector<int> fail(static_cast<std::size_t>(target.nx) * target.ny, 0);

    parallel_for(static_cast<std::ptrdiff_t>(target.nx) * target.ny, [&](std::ptrdiff_t idx) {
        const int i = static_cast<int>(idx) / target.ny;
        const int j = static_cast<int>(idx) % target.ny;
        const double X1 = target.x(i);
        const double X2 = target.y(j);

        // four chart columns around X2 (x2 = x identically). The x1 potential
        // winds across the periodic seam, so the stencil never wraps; it is
        // clamped instead, and X2 must stay inside the sampled x-range.
        if (X2 < cs.x0 || X2 > cs.x0 + (cs.nx - 1) * cs.dx) {
            fail[idx] = 1;
            return;
        }
        int c0 = static_cast<int>(std::floor((X2 - cs.x0) / cs.dx)) - 1;
        c0 = std::clamp(c0, 0, cs.nx - 4);
        double xs[4];
        std::vector<std::array<double, 4>> vals(fields.size());
        for (int m = 0; m < 4; ++m) {
            const int c = c0 + m;
            xs[m] = cs.x0 + c * cs.dx;
            const int cw = c;
            // invert the monotone column map y -> x1 at column cw
            if (x1rows[0].values[cw] > X1 || x1rows[T - 1].values[cw] < X1) {
                fail[idx] = 1;
                return;
            }
            int lo = 0, hi = T - 1;
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                if (x1rows[mid].values[cw] <= X1) lo = mid;
                else hi = mid;
            }
            const int t0 = std::clamp(lo - 1, 0, T - 4);
            double xv[4], yv[4];
            for (int q = 0; q < 4; ++q) {
                xv[q] = x1rows[t0 + q].values[cw];
                yv[q] = cs.y[t0 + q];
            }
            const double ystar = lagrange4(xv, yv, X1); // inverse interpolation
            for (std::size_t fld = 0; fld < fields.size(); ++fld) {
                double fv[4];
                for (int q = 0; q < 4; ++q) fv[q] = (*fields[fld])[t0 + q].values[cw];
                vals[fld][m] = lagrange4(yv, fv, ystar);
            }
        }
        for (std::size_t fld = 0; fld < fields.size(); ++fld)
            out.fields[fld].values[idx] = lagrange4(xs, vals[fld].data(), X2);
    });
    for (std::size_t k = 0; k < fail.size(); ++k)
        if (fail[k])
            throw numerical_error("invert_chart: target grid leaves the chart image");
    return out;
}

ScalarField2D hj_residual_chebyshev(const ScalarField2D& p, const ScalarField2D& g12) {
    require_same_grid(p.grid, g12.grid, "hj_residual_chebyshev");
    const Grid2D& g = p.grid;
    ScalarField2D flux(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            const double gv = g12.at(i, j), pv = p.at(i, j);
            const double rad = (gv * gv - 1.0) * pv * pv + 1.0;
            if (!(rad > 0.0))
                reject_point("hj_residual_chebyshev: (g12^2-1)p^2+1 <= 0", i, j, rad);
            flux.at(i, j) = std::sqrt(rad) - gv * pv;
        }
    ScalarField2D p2 = partial(p, 2);
    ScalarField2D f1 = partial(flux, 1);
    ScalarField2D out(g);
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = p2.values[k] - f1.values[k];
    return out;
}

std::vector<ScalarField1D> hj_residual_semigeodesic(const std::vector<ScalarField1D>& ptilde,
                                                    const std::vector<ScalarField1D>& aN1,
                                                    const std::vector<ScalarField1D>& g12,
                                                    const std::vector<double>& y) {
    const int T = static_cast<int>(y.size());
    if (static_cast<int>(ptilde.size()) != T || static_cast<int>(aN1.size()) != T ||
        static_cast<int>(g12.size()) != T)
        throw std::invalid_argument("hj_residual_semigeodesic: series size mismatch");
    if (T < 3) throw std::invalid_argument("hj_residual_semigeodesic: need at least 3 stations");

    const int n = ptilde[0].nx;
    std::vector<ScalarField1D> out;
    out.reserve(T - 2);
    for (int t = 1; t + 1 < T; ++t) {
        ScalarField1D flux(ptilde[t].nx, ptilde[t].dx, ptilde[t].x0, ptilde[t].periodic);
        for (int i = 0; i < n; ++i) {
            const double pt = ptilde[t].values[i];
            const double gv = g12[t].values[i];
            if (!(std::abs(pt) <= 1.0))
                throw std::domain_error("hj_residual_semigeodesic: |ptilde| > 1");
            flux.values[i] =
                aN1[t].values[i] / std::sqrt(1.0 - gv * gv) * std::sqrt(1.0 - pt * pt);
        }
        ScalarField1D fx = partial1d(flux);
        ScalarField1D res(ptilde[t].nx, ptilde[t].dx, ptilde[t].x0, ptilde[t].periodic);
        const double hm = y[t] - y[t - 1], hp = y[t + 1] - y[t];
        for (int i = 0; i < n; ++i) {
            const double py = central_nonuniform(ptilde[t - 1].values[i], ptilde[t].values[i],
                                                 ptilde[t + 1].values[i], hm, hp);
            res.values[i] = py - fx.values[i];
        }
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace geoflow
