// Direct verification layer: bicubic-spline metric interpolation, Hamilton's
// equations for H = 1/2 p1^2 + g12 p1 p2 + 1/2 p2^2, fixed-step RK4
// trajectories, and conservation-drift reporting for H and a polynomial
// first integral.

#pragma once

#include "geoflow/grid.hpp"
#include "geoflow/momenta.hpp"

#include <memory>
#include <span>
#include <vector>

namespace geoflow {

// Interpolating bicubic spline (B-spline basis with prefiltered
// coefficients): C^2 inside the domain, passes through the samples, analytic
// gradient. Periodic axes wrap; non-periodic axes use natural end conditions.
class CubicSpline2D {
public:
    explicit CubicSpline2D(const ScalarField2D& f);

    bool in_domain(double x1, double x2) const;
    double value(double x1, double x2) const;
    void value_and_gradient(double x1, double x2, double& v, double& d1, double& d2) const;

    const Grid2D& grid() const { return grid_; }

private:
    Grid2D grid_;
    std::vector<double> c_; // spline coefficients, row-major like the field
    double coeff(int i, int j) const;
};

struct PhaseState {
    double x1 = 0.0, x2 = 0.0, p1 = 0.0, p2 = 0.0;
};

// Interpolated first integral: degree-N momenta polynomial whose field
// coefficients were replaced by splines.
class InterpolatedPolynomial {
public:
    InterpolatedPolynomial(const MomentaPolynomial& f);
    double evaluate(double x1, double x2, double p1, double p2) const;
    int degree() const { return degree_; }

private:
    int degree_;
    std::vector<double> constants_;
    std::vector<std::unique_ptr<CubicSpline2D>> splines_; // null -> constant
};

// Right-hand side of Hamilton's equations:
//   x1' = p1 + g12 p2, x2' = g12 p1 + p2, p_i' = -(g12)_{x^i} p1 p2.
void hamilton_rhs(const CubicSpline2D& g12, const PhaseState& s, double out[4]);

struct GeodesicRecord {
    std::vector<double> t, x1, x2, p1, p2, H, f;
    bool exited = false;   // left the interpolation domain; trajectory truncated
    double H_drift = 0.0;
    double f_drift = 0.0;  // 0 when no integral was supplied
};

// Classical fixed-step fourth-order integration; records every
// `record_every` steps (plus start and final state).
GeodesicRecord integrate_geodesic(const CubicSpline2D& g12, const InterpolatedPolynomial* f,
                                  const PhaseState& s0, double t_end, double dt,
                                  int record_every = 1);

// Max relative deviation from the initial value; falls back to absolute
// deviation when |v0| is below the floor.
double drift(std::span<const double> v, double floor = 1e-30);

} // namespace geoflow
