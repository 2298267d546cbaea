// Homogeneous polynomials in the momenta (p1, p2) with coefficients that are
// either real constants or sampled fields, the normal-form Hamiltonian
// 1/2*eps1*p1^2 + g12*p1*p2 + 1/2*eps2*p2^2, the Poisson bracket of the two,
// root-multiplicity analysis of the binary form, and the coefficient
// substitution taking the integral to semi-geodesic momenta.

#pragma once

#include "geoflow/grid.hpp"

#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace geoflow {

// A polynomial coefficient: constant or field. Constants are promoted to
// fields lazily, only when combined with a field.
class Coefficient {
public:
    Coefficient(double c = 0.0) : v_(c) {}
    Coefficient(ScalarField2D f) : v_(std::move(f)) {}

    bool is_constant() const { return std::holds_alternative<double>(v_); }
    double constant() const { return std::get<double>(v_); }
    const ScalarField2D& field() const { return std::get<ScalarField2D>(v_); }

    double at(int i, int j) const {
        return is_constant() ? constant() : field().at(i, j);
    }
    const Grid2D* grid_or_null() const {
        return is_constant() ? nullptr : &field().grid;
    }

private:
    std::variant<double, ScalarField2D> v_;
};

// Coefficient arithmetic with lazy promotion; mixed-grid operands are
// rejected with a diagnostic.
Coefficient cf_add(const Coefficient& a, const Coefficient& b);
Coefficient cf_mul(const Coefficient& a, const Coefficient& b);
Coefficient cf_scale(double s, const Coefficient& a);
Coefficient cf_partial(const Coefficient& a, int axis); // derivative of a constant is 0

struct MomentaPolynomial {
    int degree = 0;                    // N >= 1
    std::vector<Coefficient> coeffs;   // a_0..a_N, f = sum a_m p1^(N-m) p2^m

    MomentaPolynomial() = default;
    MomentaPolynomial(int degree_, std::vector<Coefficient> coeffs_);

    // Common grid of all field coefficients, if any. Throws on a mismatch.
    std::optional<Grid2D> common_grid() const;

    // Normal form a_0 = a_N = 0 with interior coefficients a_1..a_{N-1}.
    static MomentaPolynomial normal_form(int degree, std::vector<Coefficient> interior);
};

struct HamiltonianForm {
    int eps1 = 1, eps2 = 1; // each in {-1, 0, 1}
    Coefficient g12;

    HamiltonianForm(Coefficient g12_, int eps1_ = 1, int eps2_ = 1);

    // The Hamiltonian's own quadratic momenta polynomial.
    MomentaPolynomial quadratic() const;
};

// {f, H} as a degree-(N+1) momenta polynomial, assembled from derivatives of
// the coefficients through the discrete operators of the fields module.
MomentaPolynomial poisson_bracket(const MomentaPolynomial& f, const HamiltonianForm& H);

double evaluate(const MomentaPolynomial& f, int i, int j, double p1, double p2);

struct RootStructure {
    struct Entry {
        double value = 0.0;    // ignored when at_infinity
        int multiplicity = 1;
        bool at_infinity = false;
    };
    std::vector<Entry> roots;  // finite roots ascending, infinity last
    bool real_factorization = true;
    std::string message;

    int total_multiplicity() const {
        int s = 0;
        for (const auto& r : roots) s += r.multiplicity;
        return s;
    }
};

// Roots of the binary form at one grid point, in the slope s = p2/p1.
// Finite roots come from the companion matrix of the dehomogenized
// polynomial; trailing zero coefficients contribute the root at infinity.
// Roots closer than tol (relative to the root magnitude scale) are merged.
RootStructure root_structure(const MomentaPolynomial& f, int i, int j, double tol = 1e-8);
RootStructure root_structure_values(std::span<const double> coeffs, int degree,
                                    double tol = 1e-8);

// Coefficient substitution into semi-geodesic momenta
//   p1 = pt2 / a_{N-1},  p2 = pt1 - g12 * pt2 / a_{N-1}.
// Input: interior coefficients a_1..a_{N-1} (a.size() == N-1) and g12 at one
// point; output: atilde_1..atilde_{N-1} with the pt2*pt1^(N-1) coefficient
// normalized to 1 (checked). Requires a_{N-1} != 0.
std::vector<double> semigeodesic_coefficients(std::span<const double> a, double g12);

// Fieldwise variant; rejects a vanishing a_{N-1} naming the grid point.
std::vector<Coefficient> semigeodesic_coefficients(const std::vector<Coefficient>& a,
                                                   const Coefficient& g12);

// Inverse direction: expand
//   f = sum_j atilde_j (aN1*p1)^(j+1) (p2 + g12*p1)^(N-1-j),  atilde_0 = 1
// back into p1,p2 coefficients a_0..a_N (returned with size N+1). On data
// coming from a consistent chart, a_0 and a_N vanish to rounding.
std::vector<double> chebyshev_coefficients(std::span<const double> atilde, double g12,
                                           double aN1);

} // namespace geoflow
