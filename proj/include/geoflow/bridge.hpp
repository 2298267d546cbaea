// Reciprocal transformations between the conformal-Chebyshev chart (x1,x2)
// and the semi-geodesic chart (x,y): metric construction on both charts,
// potentials of the defining 1-forms, metric reconstruction from evolved
// states, chart inversion back to (x1,x2), and the Hamilton-Jacobi
// generating-equation residuals.

#pragma once

#include "geoflow/grid.hpp"
#include "geoflow/riemann.hpp"

#include <vector>

namespace geoflow {

struct Metric2D {
    enum class Chart { Chebyshev, Semigeodesic };
    Chart chart = Chart::Chebyshev;
    // Chebyshev chart: covariant components of
    //   ds^2 = [ (dx1)^2 - 2 g12 dx1 dx2 + (dx2)^2 ] / (1 - g12^2)
    ScalarField2D g11, g12cov, g22;
    // Semi-geodesic chart: ds^2 = dx^2 + G dy^2
    ScalarField2D G;
};

// Requires |g12| < 1 everywhere; the first offending point is named.
Metric2D metric_chebyshev(const ScalarField2D& g12);

// G = aN1^2 / (1 - g12^2); requires |g12| < 1 and aN1 != 0.
Metric2D metric_semigeodesic(const ScalarField2D& aN1, const ScalarField2D& g12);

// Potential of the 1-form P dx1 + Q dx2 on a uniform grid by trapezoidal
// path integration (x1 leg first, then x2). The opposite integration order
// quantifies path dependence; the discrete curl P_{x2} - Q_{x1} is reported
// as a field.
struct PotentialResult {
    ScalarField2D potential;
    ScalarField2D closedness;
    double path_defect = 0.0;
};
PotentialResult potential_from_form(const ScalarField2D& P, const ScalarField2D& Q);

// Semi-geodesic coordinate y from fields on the (x1,x2) chart:
//   dy = (1/aN1) dx1 - (g12/aN1) dx2, x = x2.
PotentialResult reciprocal_forward(const ScalarField2D& g12, const ScalarField2D& aN1);

// Fields sampled on the semi-geodesic chart: a fixed x-grid crossed with a
// strictly increasing list of y stations (spacing may be non-uniform).
struct ChartSeries {
    int nx = 0;
    double dx = 0.0, x0 = 0.0;
    bool periodic = true;
    std::vector<double> y;
    std::vector<ScalarField1D> g12, aN1; // one row per y station
};

// Conservation-law reconstruction of the metric data from an evolved state:
//   h = b_k / sqrt(1 + b_k^2),  g12 = h,  aN1 = sqrt((1 - h^2)/a).
void reconstruct_snapshot(const HydroSnapshot& s, int k, ScalarField1D& g12,
                          ScalarField1D& aN1);

// Series variant. The chart's y coordinate runs opposite to the evolution
// coordinate (rows are emitted in reversed order); with that orientation the
// 1-form g12 dx + aN1 dy is closed on solutions and the residual
// (g12)_y - (aN1)_x decays at the discretization order.
struct Reconstruction {
    ChartSeries chart;
    std::vector<ScalarField1D> closedness; // interior rows
    double closedness_max = 0.0;
    double min_aN1 = 0.0;                  // Jacobian-sign indicator
};
Reconstruction reconstruct_series(const std::vector<HydroSnapshot>& states,
                                  const std::vector<double>& y, int k);

// x1(x,y) on the chart: potential of g12 dx + aN1 dy, trapezoidal, x leg
// first. Returns one row per y station; `path_defect`, when non-null,
// receives the opposite-order discrepancy.
std::vector<ScalarField1D> x1_potential(const ChartSeries& cs, double* path_defect = nullptr);

// Image bounds usable as the x1-range of a target chart-inversion grid.
void chart_image_bounds(const ChartSeries& cs, const std::vector<ScalarField1D>& x1rows,
                        double& x1_lo, double& x1_hi);

// Resamples chart fields onto a uniform (x1,x2) grid inside the chart image.
// x2 = x exactly; per column the monotone map y -> x1 is inverted with local
// cubic (4-point) interpolation.
struct InvertedChart {
    Grid2D grid;
    std::vector<ScalarField2D> fields; // one per requested series
};
InvertedChart invert_chart(const ChartSeries& cs, const std::vector<ScalarField1D>& x1rows,
                           const std::vector<const std::vector<ScalarField1D>*>& fields,
                           const Grid2D& target);

// Residual of the generating equation on the (x1,x2) chart,
//   p_{x2} - ( sqrt((g12^2-1) p^2 + 1) - g12 p )_{x1},
// with the flux differentiated as a composite field (total-derivative
// convention). Requires (g12^2-1) p^2 + 1 > 0.
ScalarField2D hj_residual_chebyshev(const ScalarField2D& p, const ScalarField2D& g12);

// Residual of the generating equation on the semi-geodesic chart,
//   pt_y - ( aN1/sqrt(1-g12^2) * sqrt(1-pt^2) )_x,
// per interior y station. Requires |pt| <= 1.
std::vector<ScalarField1D> hj_residual_semigeodesic(const std::vector<ScalarField1D>& ptilde,
                                                    const std::vector<ScalarField1D>& aN1,
                                                    const std::vector<ScalarField1D>& g12,
                                                    const std::vector<double>& y);

} // namespace geoflow
