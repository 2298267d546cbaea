#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoflow/integrability.hpp"
#include "testutil.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>

using namespace geoflow;

namespace {

using Side = SystemTerm::Side;
using Factor = SystemTerm::Factor;
using Unknown = SystemTerm::Unknown;

SystemTerm lhs_d(int a_idx, int wrt, Factor f = Factor::One) {
    return {Side::LHS, 1, f, 0, Unknown::A, a_idx, wrt};
}
SystemTerm rhs_g(long long scalar, int a_idx, int wrt) {
    return {Side::RHS, scalar, Factor::A, a_idx, Unknown::G12, 0, wrt};
}

CoefficientSystem fixture(int N, std::vector<std::pair<int, std::vector<SystemTerm>>> eqs) {
    CoefficientSystem s;
    s.degree = N;
    for (auto& [k, terms] : eqs) s.equations.push_back({k, std::move(terms)});
    return s;
}

// a_k <-> a_{N-k}, x1 <-> x2 leaves the system invariant up to re-indexing
// the equations k -> N+1-k.
CoefficientSystem swapped(const CoefficientSystem& s) {
    CoefficientSystem o = s;
    o.zero_mask.clear();
    for (int k : s.zero_mask) o.zero_mask.insert(s.degree - k);
    for (auto& eq : o.equations) {
        eq.k = s.degree + 1 - eq.k;
        for (auto& t : eq.terms) {
            if (t.factor == Factor::A) t.factor_index = s.degree - t.factor_index;
            if (t.derivative_of == Unknown::A) t.derivative_index = s.degree - t.derivative_index;
            t.wrt = 3 - t.wrt;
        }
    }
    std::sort(o.equations.begin(), o.equations.end(),
              [](const auto& a, const auto& b) { return a.k < b.k; });
    return o;
}

} // namespace

TEST_CASE("cubic system matches the printed three equations term by term") {
    // a1_x1 + a1_x2 g = g_x2 a1
    // a1_x1 g + a2_x1 + a1_x2 + a2_x2 g = 2 g_x1 a1 + 2 g_x2 a2
    // a2_x1 g + a2_x2 = g_x1 a2
    CoefficientSystem printed = fixture(
        3, {{1, {lhs_d(1, 1), lhs_d(1, 2, Factor::G12), rhs_g(1, 1, 2)}},
            {2,
             {lhs_d(1, 1, Factor::G12), lhs_d(2, 1), lhs_d(1, 2), lhs_d(2, 2, Factor::G12),
              rhs_g(2, 1, 1), rhs_g(2, 2, 2)}},
            {3, {lhs_d(2, 1, Factor::G12), lhs_d(2, 2), rhs_g(1, 2, 1)}}});
    CHECK(structurally_equal(build_system(3), printed));
}

TEST_CASE("quartic system matches the printed four equations term by term") {
    CoefficientSystem printed = fixture(
        4,
        {{1, {lhs_d(1, 1), lhs_d(1, 2, Factor::G12), rhs_g(1, 1, 2)}},
         {2,
          {lhs_d(1, 2), lhs_d(2, 1), lhs_d(1, 1, Factor::G12), lhs_d(2, 2, Factor::G12),
           rhs_g(2, 2, 2), rhs_g(3, 1, 1)}},
         {3,
          {lhs_d(3, 1), lhs_d(2, 2), lhs_d(3, 2, Factor::G12), lhs_d(2, 1, Factor::G12),
           rhs_g(3, 3, 2), rhs_g(2, 2, 1)}},
         {4, {lhs_d(3, 2), lhs_d(3, 1, Factor::G12), rhs_g(1, 3, 1)}}});
    CHECK(structurally_equal(build_system(4), printed));
}

TEST_CASE("quadratic system specializes to the two boundary equations") {
    CoefficientSystem printed = fixture(
        2, {{1, {lhs_d(1, 1), lhs_d(1, 2, Factor::G12), rhs_g(1, 1, 2)}},
            {2, {lhs_d(1, 1, Factor::G12), lhs_d(1, 2), rhs_g(1, 1, 1)}}});
    CHECK(structurally_equal(build_system(2), printed));
}

TEST_CASE("generic equation k carries the scalars k and N+1-k") {
    for (int N = 2; N <= 6; ++N) {
        CoefficientSystem s = build_system(N);
        REQUIRE(static_cast<int>(s.equations.size()) == N);
        for (const auto& eq : s.equations) {
            for (const auto& t : eq.terms) {
                if (t.side != Side::RHS) continue;
                if (t.factor_index == eq.k) CHECK(t.scalar == eq.k);
                if (t.factor_index == eq.k - 1) CHECK(t.scalar == N + 1 - eq.k);
            }
        }
    }
}

TEST_CASE("index-swap symmetry maps the system onto itself") {
    std::mt19937_64 rng(31);
    for (int N = 2; N <= 6; ++N) {
        for (int rep = 0; rep < 3; ++rep) {
            std::set<int> mask;
            for (int k = 1; k <= N - 1; ++k)
                if (rng() % 3 == 0 && static_cast<int>(mask.size()) < N - 2) mask.insert(k);
            std::set<int> swapped_mask;
            for (int k : mask) swapped_mask.insert(N - k);
            CHECK(structurally_equal(swapped(build_system(N, mask)),
                                     build_system(N, swapped_mask)));
        }
    }
}

TEST_CASE("masking drops degenerate equations") {
    CoefficientSystem s = build_system(4, {2, 3});
    REQUIRE(s.equations.size() == 2); // triple-root reduction
    CHECK(s.equations[0].k == 1);
    CHECK(s.equations[1].k == 2);
    // k=2 keeps only the a1 terms
    for (const auto& t : s.equations[1].terms) {
        const int idx = t.side == Side::RHS ? t.factor_index : t.derivative_index;
        if (t.derivative_of == Unknown::A || t.factor == Factor::A) CHECK(idx == 1);
    }
    CHECK_THROWS_AS(build_system(3, {1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_system(4, {0}), std::invalid_argument);
}

TEST_CASE("residuals vanish on constant fields and expose linear growth") {
    Grid2D g(16, 16, 0.2, 0.2, 0.0, 0.0, false, false);
    std::map<int, Coefficient> a;
    a.emplace(1, Coefficient(ScalarField2D(g, 0.8)));
    Coefficient g12(ScalarField2D(g, 0.3));
    CoefficientSystem s = build_system(2);
    auto res = system_residual(s, a, g12);
    REQUIRE(res.size() == 2);
    CHECK(max_abs(res[0]) == 0.0);
    CHECK(max_abs(res[1]) == 0.0);

    // g12 = 0, a1 = x1: first equation residual is exactly 1
    std::map<int, Coefficient> a2;
    a2.emplace(1, Coefficient(ScalarField2D::sampled(g, [](double x, double) { return x; })));
    auto res2 = system_residual(s, a2, Coefficient(ScalarField2D(g, 0.0)));
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            CHECK(res2[0].at(i, j) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(max_abs(res2[1]) < 1e-13);
}

TEST_CASE("missing unmasked field is rejected") {
    Grid2D g(8, 8, 0.1, 0.1);
    std::map<int, Coefficient> a; // empty
    CHECK_THROWS_AS(system_residual(build_system(3), a, Coefficient(ScalarField2D(g, 0.1))),
                    std::invalid_argument);
}

TEST_CASE("bracket coefficients equal system residuals to rounding") {
    std::mt19937_64 rng(32);
    Grid2D g(32, 32, 0.19, 0.21, 0.0, 0.0, true, true);
    for (int N = 2; N <= 6; ++N) {
        std::map<int, Coefficient> a;
        for (int k = 1; k <= N - 1; ++k)
            a.emplace(k, Coefficient(test::random_smooth_field2d(g, rng, 0.0, 1.0)));
        Coefficient g12(test::random_smooth_field2d(g, rng, 0.0, 0.3));
        CHECK(bracket_system_gap(N, {}, a, g12) < 1e-12);
    }
    // masked variant: two double roots
    std::map<int, Coefficient> a;
    a.emplace(2, Coefficient(test::random_smooth_field2d(g, rng)));
    CHECK(bracket_system_gap(4, {1, 3}, a,
                             Coefficient(test::random_smooth_field2d(g, rng, 0.0, 0.3))) < 1e-12);
}

TEST_CASE("bracket-system gap is zero on constant fields for all degrees") {
    Grid2D g(8, 8, 0.5, 0.5);
    for (int N = 2; N <= 6; ++N) {
        std::map<int, Coefficient> a;
        for (int k = 1; k <= N - 1; ++k)
            a.emplace(k, Coefficient(ScalarField2D(g, 0.1 * k + 0.4)));
        CHECK(bracket_system_gap(N, {}, a, Coefficient(ScalarField2D(g, 0.25))) == 0.0);
    }
}

TEST_CASE("JSON rendering keeps the stable key order") {
    CoefficientSystem s = build_system(2);
    canonicalize(s);
    const std::string dump = system_to_json(s).dump();
    const auto side = dump.find("\"side\"");
    const auto scalar = dump.find("\"scalar\"");
    const auto factor = dump.find("\"factor\"");
    const auto deriv = dump.find("\"derivative_of\"");
    const auto wrt = dump.find("\"wrt\"");
    CHECK(side < scalar);
    CHECK(scalar < factor);
    CHECK(factor < deriv);
    CHECK(deriv < wrt);
}
