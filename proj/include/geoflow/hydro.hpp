// Explicit evolution of the hydrodynamic-type system
//   a_y   = 2 a^{1/2} (sum_m b_m)_x + a^{-1/2} a_x (sum_m b_m)
//   b_k,y = a^{-1/2} b_k b_k,x - (1 + b_k^2) (a^{-1/2})_x
// on periodic grids, its diagonal (Riemann-invariant) form, and the
// conservation-law / moment-chain monitors evaluated on snapshot series.

#pragma once

#include "geoflow/riemann.hpp"

#include <functional>
#include <string>
#include <vector>

namespace geoflow {

enum class Scheme { LaxFriedrichs, LaxWendroff, UpwindDiagonal };

struct EvolutionConfig {
    Scheme scheme = Scheme::LaxFriedrichs;
    double cfl = 0.4;           // in (0,1)
    double y_end = 0.0;         // > 0
    int output_every = 1;       // snapshot cadence in steps
    double dissipation = 0.0;   // extra neighbor-Laplacian strength (Lax-Wendroff)
    double shock_factor = 50.0; // halt when max|b_x| exceeds this times its initial value

    void validate() const;
};

enum class HaltReason { Completed, Shock, NonFinite, PositivityLoss };

struct RhsFields {
    ScalarField1D da;
    std::vector<ScalarField1D> db;
};

// y-derivative of the state, transcribed with the fields-module derivative
// operators (the a^{-1/2} field is differentiated as a field).
RhsFields evolution_rhs(const HydroSnapshot& s);

// Largest |mu| compatible with the state; uses a root bound on the branch
// polynomial, cheap and always >= the true maximum.
double max_speed_bound(const HydroSnapshot& s);

struct ConservationReport {
    std::vector<double> y;              // output instants
    std::vector<double> mass;           // integral of a
    std::vector<double> second;         // integral of B^0 a^{3/2}
    double mass_drift_rel = 0.0;        // max |mass-mass0| / |mass0|
    double second_drift_rel = 0.0;      // max |second-second0| / max(|second0|, floor)
    double flux_form_residual = 0.0;    // max-norm of a_y - (2 a^{1/2} B^0)_x, interior outputs
    std::vector<double> moment_chain;   // max-norm residual per k = 0..K
};

struct EvolveResult {
    std::vector<double> y;
    std::vector<HydroSnapshot> states;
    HaltReason halt = HaltReason::Completed;
    std::string message;
    int steps = 0;
    ConservationReport report;
};

// Explicit stepping with per-step dy = cfl*dx/max|mu|; emits a snapshot every
// output_every steps plus the final state; halts (keeping the last good
// state) on NaN, loss of positivity, or gradient catastrophe.
EvolveResult evolve(const HydroSnapshot& initial, const EvolutionConfig& cfg,
                    int chain_orders = 2);

// Residuals of the moment-equation chain on a snapshot series:
//   B^0_y = a^{-1/2} B^1_x     - ((N-1) + 2 B^1) (a^{-1/2})_x
//   B^k_y = a^{-1/2} B^{k+1}_x - (k B^{k-1} + (k+2) B^{k+1}) (a^{-1/2})_x
// Returns the max-norm residual for each k = 0..K.
std::vector<double> moment_chain_residual(const std::vector<HydroSnapshot>& series,
                                          const std::vector<double>& y, int K);

// Pointwise characteristic-velocity closure: fills mu[0..N-1] from r[0..N-1].
using VelocityClosure = std::function<void(const double* r, double* mu, int N)>;

struct DiagonalResult {
    std::vector<double> y;
    std::vector<std::vector<ScalarField1D>> r; // per output instant, N fields
    HaltReason halt = HaltReason::Completed;
    int steps = 0;
};

// First-order upwind evolution of r_k,y = mu_k(r) r_k,x, wind chosen per
// point from the sign of mu_k.
DiagonalResult evolve_diagonal(const std::vector<ScalarField1D>& r0,
                               const VelocityClosure& closure, const EvolutionConfig& cfg);

// Exact closure of the two-component diagonal system: mu_1 = -2 r_2,
// mu_2 = -2 r_1.
VelocityClosure two_component_closure();

} // namespace geoflow
