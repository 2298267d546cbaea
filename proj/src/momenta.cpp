#include "geoflow/momenta.hpp"

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"

#include "polyroots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace geoflow {

namespace {

const Grid2D* merge_grids(const Grid2D* a, const Grid2D* b, const char* what) {
    if (!a) return b;
    if (!b) return a;
    require_same_grid(*a, *b, what);
    return a;
}

template <class Op>
Coefficient combine(const Coefficient& a, const Coefficient& b, Op op, const char* what) {
    if (a.is_constant() && b.is_constant()) return Coefficient(op(a.constant(), b.constant()));
    const Grid2D* g = merge_grids(a.grid_or_null(), b.grid_or_null(), what);
    ScalarField2D out(*g);
    const int ny = g->ny;
    if (a.is_constant()) {
        const double av = a.constant();
        const auto& bf = b.field().values;
        parallel_for(static_cast<std::ptrdiff_t>(g->size()),
                     [&](std::ptrdiff_t k) { out.values[k] = op(av, bf[k]); });
    } else if (b.is_constant()) {
        const double bv = b.constant();
        const auto& af = a.field().values;
        parallel_for(static_cast<std::ptrdiff_t>(g->size()),
                     [&](std::ptrdiff_t k) { out.values[k] = op(af[k], bv); });
    } else {
        const auto& af = a.field().values;
        const auto& bf = b.field().values;
        parallel_for(static_cast<std::ptrdiff_t>(g->size()),
                     [&](std::ptrdiff_t k) { out.values[k] = op(af[k], bf[k]); });
    }
    (void)ny;
    return Coefficient(std::move(out));
}

} // namespace

Coefficient cf_add(const Coefficient& a, const Coefficient& b) {
    return combine(a, b, [](double x, double y) { return x + y; }, "coefficient add");
}

Coefficient cf_mul(const Coefficient& a, const Coefficient& b) {
    if (a.is_constant() && a.constant() == 0.0) return Coefficient(0.0);
    if (b.is_constant() && b.constant() == 0.0) return Coefficient(0.0);
    return combine(a, b, [](double x, double y) { return x * y; }, "coefficient multiply");
}

Coefficient cf_scale(double s, const Coefficient& a) {
    if (s == 0.0) return Coefficient(0.0);
    return combine(Coefficient(s), a, [](double x, double y) { return x * y; },
                   "coefficient scale");
}

Coefficient cf_partial(const Coefficient& a, int axis) {
    if (a.is_constant()) return Coefficient(0.0);
    return Coefficient(partial(a.field(), axis));
}

MomentaPolynomial::MomentaPolynomial(int degree_, std::vector<Coefficient> coeffs_)
    : degree(degree_), coeffs(std::move(coeffs_)) {
    if (degree < 1) throw std::invalid_argument("MomentaPolynomial: degree must be >= 1");
    if (static_cast<int>(coeffs.size()) != degree + 1)
        throw std::invalid_argument("MomentaPolynomial: need exactly degree+1 coefficients");
    common_grid(); // validates shared grid
}

std::optional<Grid2D> MomentaPolynomial::common_grid() const {
    const Grid2D* g = nullptr;
    for (const auto& c : coeffs) g = merge_grids(g, c.grid_or_null(), "MomentaPolynomial");
    if (!g) return std::nullopt;
    return *g;
}

MomentaPolynomial MomentaPolynomial::normal_form(int degree, std::vector<Coefficient> interior) {
    if (static_cast<int>(interior.size()) != degree - 1)
        throw std::invalid_argument("normal_form: need degree-1 interior coefficients");
    std::vector<Coefficient> all;
    all.reserve(degree + 1);
    all.emplace_back(0.0);
    for (auto& c : interior) all.push_back(std::move(c));
    all.emplace_back(0.0);
    return MomentaPolynomial(degree, std::move(all));
}

HamiltonianForm::HamiltonianForm(Coefficient g12_, int eps1_, int eps2_)
    : eps1(eps1_), eps2(eps2_), g12(std::move(g12_)) {
    if (std::abs(eps1) > 1 || std::abs(eps2) > 1)
        throw std::invalid_argument("HamiltonianForm: eps must be in {-1,0,1}");
}

MomentaPolynomial HamiltonianForm::quadratic() const {
    return MomentaPolynomial(2, {Coefficient(0.5 * eps1), g12, Coefficient(0.5 * eps2)});
}

MomentaPolynomial poisson_bracket(const MomentaPolynomial& f, const HamiltonianForm& H) {
    const int N = f.degree;
    // validate that f and g12 live on one grid
    {
        const Grid2D* g = nullptr;
        auto fg = f.common_grid();
        if (fg) g = &*fg;
        merge_grids(g, H.g12.grid_or_null(), "poisson_bracket");
    }
    const Coefficient& g = H.g12;
    const Coefficient gx1 = cf_partial(g, 1);
    const Coefficient gx2 = cf_partial(g, 2);

    auto a = [&](int m) -> Coefficient {
        if (m < 0 || m > N) return Coefficient(0.0);
        return f.coeffs[m];
    };

    std::vector<Coefficient> out;
    out.reserve(N + 2);
    for (int j = 0; j <= N + 1; ++j) {
        // eps1*d1(a_j) + g*d1(a_{j-1}) + g*d2(a_j) + eps2*d2(a_{j-1})
        //   - (N+1-j)*a_{j-1}*d1(g) - j*a_j*d2(g)
        Coefficient c = cf_scale(static_cast<double>(H.eps1), cf_partial(a(j), 1));
        c = cf_add(c, cf_mul(g, cf_partial(a(j - 1), 1)));
        c = cf_add(c, cf_mul(g, cf_partial(a(j), 2)));
        c = cf_add(c, cf_scale(static_cast<double>(H.eps2), cf_partial(a(j - 1), 2)));
        c = cf_add(c, cf_scale(-(N + 1.0 - j), cf_mul(a(j - 1), gx1)));
        c = cf_add(c, cf_scale(-static_cast<double>(j), cf_mul(a(j), gx2)));
        out.push_back(std::move(c));
    }
    return MomentaPolynomial(N + 1, std::move(out));
}

double evaluate(const MomentaPolynomial& f, int i, int j, double p1, double p2) {
    if (auto g = f.common_grid()) {
        if (i < 0 || i >= g->nx || j < 0 || j >= g->ny)
            throw std::out_of_range("evaluate: grid index out of range");
    }
    double sum = 0.0;
    for (int m = 0; m <= f.degree; ++m) {
        double term = f.coeffs[m].at(i, j);
        for (int k = 0; k < f.degree - m; ++k) term *= p1;
        for (int k = 0; k < m; ++k) term *= p2;
        sum += term;
    }
    return sum;
}

RootStructure root_structure_values(std::span<const double> coeffs, int degree, double tol) {
    const int N = degree;
    RootStructure rs;
    int hi = N;
    while (hi >= 0 && coeffs[hi] == 0.0) --hi;
    if (hi < 0) throw std::invalid_argument("root_structure: polynomial is zero at the point");
    int lo = 0;
    while (coeffs[lo] == 0.0) ++lo;

    const int inf_mult = N - hi;       // trailing zero coefficients
    const int zero_mult = lo;          // leading zero coefficients -> root s = 0
    std::vector<double> finite;
    if (hi > lo) {
        std::vector<double> core(coeffs.begin() + lo, coeffs.begin() + hi + 1);
        if (!detail::companion_real_roots(core, finite, 1e-10)) {
            rs.real_factorization = false;
            rs.message = "non-real factorization";
            return rs;
        }
    }
    if (zero_mult > 0) finite.insert(finite.begin(), zero_mult, 0.0);
    std::sort(finite.begin(), finite.end());

    // merge clusters closer than tol relative to the magnitude scale
    double scale = 1.0;
    for (double r : finite) scale = std::max(scale, std::abs(r));
    const double gap = tol * scale;
    std::size_t i = 0;
    while (i < finite.size()) {
        std::size_t j = i + 1;
        double sum = finite[i];
        while (j < finite.size() && finite[j] - finite[j - 1] <= gap) {
            sum += finite[j];
            ++j;
        }
        RootStructure::Entry e;
        e.value = sum / static_cast<double>(j - i);
        e.multiplicity = static_cast<int>(j - i);
        rs.roots.push_back(e);
        i = j;
    }
    if (inf_mult > 0) {
        RootStructure::Entry e;
        e.at_infinity = true;
        e.multiplicity = inf_mult;
        rs.roots.push_back(e);
    }
    return rs;
}

RootStructure root_structure(const MomentaPolynomial& f, int i, int j, double tol) {
    std::vector<double> c(f.degree + 1);
    for (int m = 0; m <= f.degree; ++m) c[m] = f.coeffs[m].at(i, j);
    return root_structure_values(c, f.degree, tol);
}

std::vector<double> semigeodesic_coefficients(std::span<const double> a, double g12) {
    const int N = static_cast<int>(a.size()) + 1;
    const double aN1 = a[N - 2];
    if (aN1 == 0.0)
        throw std::invalid_argument("semigeodesic_coefficients: a_{N-1} vanishes");
    // f = sum_m a_m (pt2/aN1)^(N-m) (pt1 - (g/aN1) pt2)^m, collect in pt2-power j
    std::vector<double> A(N + 1, 0.0);
    const double c = g12 / aN1;
    for (int m = 1; m <= N - 1; ++m) {
        double base = a[m - 1] * std::pow(aN1, m - N);
        double binom = 1.0;
        double cpow = 1.0;
        for (int i = 0; i <= m; ++i) {
            // pt2-power j = N - m + i, pt1-power = m - i
            A[N - m + i] += base * binom * ((i % 2) ? -cpow : cpow);
            binom = binom * (m - i) / (i + 1.0);
            cpow *= c;
        }
    }
    if (std::abs(A[0]) > 1e-12 * (1.0 + std::abs(A[1])))
        throw numerical_error("semigeodesic_coefficients: pt1^N coefficient did not vanish");
    if (std::abs(A[1] - 1.0) > 1e-12)
        throw numerical_error("semigeodesic_coefficients: leading coefficient is not 1");
    return std::vector<double>(A.begin() + 2, A.end());
}

std::vector<Coefficient> semigeodesic_coefficients(const std::vector<Coefficient>& a,
                                                   const Coefficient& g12) {
    const int N = static_cast<int>(a.size()) + 1;
    const Grid2D* g = g12.grid_or_null();
    for (const auto& c : a) g = merge_grids(g, c.grid_or_null(), "semigeodesic_coefficients");
    if (!g) {
        std::vector<double> av(N - 1);
        for (int m = 0; m < N - 1; ++m) av[m] = a[m].constant();
        auto t = semigeodesic_coefficients(av, g12.constant());
        return std::vector<Coefficient>(t.begin(), t.end());
    }
    // fieldwise: locate any vanishing a_{N-1} first for a precise diagnostic
    for (int i = 0; i < g->nx; ++i)
        for (int j = 0; j < g->ny; ++j)
            if (a[N - 2].at(i, j) == 0.0) {
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "semigeodesic_coefficients: a_{N-1} vanishes at grid point (%d,%d)",
                              i, j);
                throw std::invalid_argument(buf);
            }
    std::vector<ScalarField2D> out(N - 1, ScalarField2D(*g));
    const int ny = g->ny;
    parallel_for(static_cast<std::ptrdiff_t>(g->size()), [&](std::ptrdiff_t k) {
        const int i = static_cast<int>(k) / ny;
        const int j = static_cast<int>(k) % ny;
        std::vector<double> av(N - 1);
        for (int m = 0; m < N - 1; ++m) av[m] = a[m].at(i, j);
        auto t = semigeodesic_coefficients(av, g12.at(i, j));
        for (int m = 0; m < N - 1; ++m) out[m].values[k] = t[m];
    });
    return std::vector<Coefficient>(std::make_move_iterator(out.begin()),
                                    std::make_move_iterator(out.end()));
}

std::vector<double> chebyshev_coefficients(std::span<const double> atilde, double g12,
                                           double aN1) {
    const int N = static_cast<int>(atilde.size()) + 1;
    std::vector<double> A(N + 1, 0.0); // coefficient of p1^(N-m) p2^m at index m
    for (int j = 0; j <= N - 1; ++j) {
        const double at = (j == 0) ? 1.0 : atilde[j - 1];
        // (aN1*p1)^(j+1) * (p2 + g*p1)^(N-1-j)
        const int e = N - 1 - j;
        double binom = 1.0;
        double gpow = 1.0;
        // term i of the binomial: C(e,i) g^i p1^i p2^(e-i); total p1 power j+1+i
        for (int i = 0; i <= e; ++i) {
            const int m = e - i; // p2 power
            A[m] += at * std::pow(aN1, j + 1) * binom * gpow;
            binom = binom * (e - i) / (i + 1.0);
            gpow *= g12;
        }
    }
    return A; // A[0] is the pure p1^N coefficient, A[N] the pure p2^N one
}

} // namespace geoflow
