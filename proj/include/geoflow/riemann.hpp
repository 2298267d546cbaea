// The Riemann-surface function, its branch points, Riemann invariants and
// characteristic velocities, root-power moments, the generating density map,
// the transformed Liouville-equation residual, and the Tsarev symmetry
// diagnostic for diagonal velocities.

#pragma once

#include "geoflow/grid.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace geoflow {

// State of the evolutionary system on a 1-D grid: a > 0 and the N-1 root
// fields b_1..b_{N-1}, all on one grid.
struct HydroSnapshot {
    int degree = 0; // N
    ScalarField1D a;
    std::vector<ScalarField1D> b;

    HydroSnapshot() = default;
    HydroSnapshot(int degree_, ScalarField1D a_, std::vector<ScalarField1D> b_);

    int n() const { return a.nx; }
};

// Value of the surface function
//   a^{-1/2} (1+q^2)^{-N/2} prod_m (q - b_m)
double surface_value(double q, double a, std::span<const double> b, int N);

// d/dq of the surface function at fixed (a, b).
double surface_q_derivative(double q, double a, std::span<const double> b, int N);

struct BranchPoints {
    std::vector<double> q; // ascending when ok
    bool ok = true;
    std::string message;
};

// The N branch points: real roots of N*q*P(q) - (1+q^2)*P'(q) with
// P = prod (q - b_m). Monic of degree N; solved by companion matrix.
// Non-real roots or roots closer than 1e-10 (relative) are reported as a
// degenerate outcome.
BranchPoints branch_points(std::span<const double> b, int N);

// Upper bound on max_k |q_k| from the monic coefficients (Cauchy/Lagrange).
double branch_point_bound(std::span<const double> b, int N);

struct PointInvariants {
    std::vector<double> q, r, mu;
};
// q_k ascending, r_k = surface value at q_k, mu_k = a^{-1/2} q_k.
PointInvariants invariants_at(double a, std::span<const double> b, int N);

struct RiemannData {
    std::vector<ScalarField1D> q, r, mu; // N fields each
    bool continuity_ok = true;           // ascending labels stay separated between
                                         // neighboring grid points
};
RiemannData invariants_and_velocities(const HydroSnapshot& s);

// Moments B^0..B^K with B^k = 1/(k+1) sum_m b_m^(k+1) over the N-1 roots.
std::vector<double> moments(std::span<const double> b, int K);
ScalarField1D moment_field(const HydroSnapshot& s, int k);

// Density map between the slope variable and (-1,1):
//   forward: q -> q/sqrt(1+q^2); inverse: p -> p/sqrt(1-p^2), |p| < 1.
double generating_density(double q);
double generating_density_inverse(double p); // throws std::domain_error for |p| >= 1

// Residual of the transformed Liouville equation at fixed q,
//   L_y - a^{-1/2} q L_x - (1+q^2) L_q (a^{-1/2})_x,
// evaluated across a snapshot series (possibly non-uniform y spacing);
// L_q is analytic. One residual field per interior snapshot.
std::vector<ScalarField1D> liouville_residual(const std::vector<HydroSnapshot>& series,
                                              const std::vector<double>& y, double q);

// Tsarev symmetry defect for the characteristic velocities seen as functions
// of the Riemann invariants: max over distinct (i,j,k) of
//   | d/dr_j ( d mu_k/d r_i / (mu_i - mu_k) )
//   - d/dr_i ( d mu_k/d r_j / (mu_j - mu_k) ) |
// on a local r-grid of the given step centered at the image of (a0, b0).
// The map r -> (a,b) is inverted by Newton iteration at every node.
// `perturb`, when set, modifies the velocities after evaluation (negative
// controls). N = 2 is vacuous.
struct TsarevResult {
    bool vacuous = false;
    double defect = 0.0;
};
TsarevResult semi_hamiltonian_defect(
    int N, double a0, std::span<const double> b0, double r_step,
    const std::function<void(const double* r, double* mu, int n)>& perturb = {});

} // namespace geoflow
