// The first-order quasi-linear PDE system satisfied by the coefficients
// (a_1..a_{N-1}, g12) of a degree-N polynomial first integral, kept at the
// level of symbolic terms so printed special cases can be compared
// structurally, plus numerical residual evaluation and the cross-check
// against the Poisson-bracket coefficients.

#pragma once

#include "geoflow/momenta.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

namespace geoflow {

struct SystemTerm {
    enum class Side { LHS, RHS };
    enum class Factor { One, G12, A };     // algebraic prefactor
    enum class Unknown { A, G12 };         // differentiated unknown

    Side side = Side::LHS;
    long long scalar = 1;                  // nonzero integer
    Factor factor = Factor::One;
    int factor_index = 0;                  // a_k index when factor == A
    Unknown derivative_of = Unknown::A;
    int derivative_index = 0;              // a_k index when derivative_of == A
    int wrt = 1;                           // axis, 1 or 2

    friend bool operator==(const SystemTerm&, const SystemTerm&) = default;
};

struct CoefficientSystem {
    int degree = 0;                        // N
    std::set<int> zero_mask;               // indices k with a_k identically 0
    struct Equation {
        int k = 0;                         // momenta monomial p1^(N+1-k) p2^k
        std::vector<SystemTerm> terms;
    };
    std::vector<Equation> equations;
};

// Builds the system for degree N with the given vanishing coefficients.
// Equations whose terms all reference masked unknowns degenerate to 0 = 0
// and are dropped; masking everything is rejected.
CoefficientSystem build_system(int N, const std::set<int>& zero_mask = {});

// Sorts terms into the canonical order used for structural comparison.
void canonicalize(CoefficientSystem& sys);
bool structurally_equal(const CoefficientSystem& a, const CoefficientSystem& b);

// Per-equation residual fields LHS - RHS. `a` maps k -> coefficient field for
// every unmasked index; a missing unmasked index is an error.
std::vector<ScalarField2D> system_residual(const CoefficientSystem& sys,
                                           const std::map<int, Coefficient>& a,
                                           const Coefficient& g12);

// Max relative discrepancy between the Poisson-bracket coefficient fields of
// the masked normal-form polynomial and the system residuals, with equation k
// matched to the coefficient of p1^(N+1-k) p2^k. Both routes use the same
// discrete derivatives, so the gap must sit at rounding level.
double bracket_system_gap(int N, const std::set<int>& zero_mask,
                          const std::map<int, Coefficient>& a, const Coefficient& g12);

std::string render_text(const CoefficientSystem& sys);
nlohmann::ordered_json system_to_json(const CoefficientSystem& sys);

} // namespace geoflow
