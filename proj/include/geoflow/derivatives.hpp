// Second-order finite-difference first derivatives. Central stencils in the
// interior; wrap-around on periodic axes; one-sided second-order stencils on
// the two boundary layers of non-periodic axes. Exact on polynomials of
// degree <= 2.

#pragma once

#include "geoflow/grid.hpp"

#include <vector>

namespace geoflow {

// axis: 1 differentiates along x^1 (index i), 2 along x^2 (index j).
ScalarField2D partial(const ScalarField2D& field, int axis);

ScalarField1D partial1d(const ScalarField1D& field);

// Second-order derivative of a sequence sampled at strictly increasing,
// possibly non-uniform positions t. Used for derivatives across snapshot
// series where the step size is CFL-controlled.
//
// values.size() == t.size() >= 3; returns one entry per sample (one-sided
// second-order at the ends).
std::vector<double> nonuniform_derivative(const std::vector<double>& t,
                                          const std::vector<double>& values);

// Derivative at interior sample k of a series given neighbor values;
// h_minus = t[k]-t[k-1], h_plus = t[k+1]-t[k].
inline double central_nonuniform(double fm, double f0, double fp, double h_minus,
                                 double h_plus) {
    const double a = -h_plus / (h_minus * (h_minus + h_plus));
    const double c = h_minus / (h_plus * (h_minus + h_plus));
    return a * fm - (a + c) * f0 + c * fp;
}

} // namespace geoflow
