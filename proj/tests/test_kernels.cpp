#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"
#include "testutil.hpp"

#include <random>

using namespace geoflow;

TEST_CASE("serial and OpenMP derivative kernels agree bitwise") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);

    for (bool periodic : {false, true}) {
        const int n = 257;
        std::vector<double> f(n), s(n), p(n);
        for (auto& v : f) v = U(rng);
        kernels::diff1d_serial(f.data(), s.data(), n, 1.0 / 0.02, periodic);
        kernels::diff1d_omp(f.data(), p.data(), n, 1.0 / 0.02, periodic);
        for (int i = 0; i < n; ++i) CHECK(s[i] == p[i]);
    }

    for (bool periodic : {false, true}) {
        const int nx = 61, ny = 44;
        std::vector<double> f(nx * ny), s(nx * ny), p(nx * ny);
        for (auto& v : f) v = U(rng);
        kernels::diff2d_axis1_serial(f.data(), s.data(), nx, ny, 7.0, periodic);
        kernels::diff2d_axis1_omp(f.data(), p.data(), nx, ny, 7.0, periodic);
        for (int i = 0; i < nx * ny; ++i) CHECK(s[i] == p[i]);
        kernels::diff2d_axis2_serial(f.data(), s.data(), nx, ny, 3.0, periodic);
        kernels::diff2d_axis2_omp(f.data(), p.data(), nx, ny, 3.0, periodic);
        for (int i = 0; i < nx * ny; ++i) CHECK(s[i] == p[i]);
    }
}

TEST_CASE("backend switch routes the field operators to identical results") {
    std::mt19937_64 rng(12);
    Grid2D g(48, 40, 0.1, 0.12, 0.0, 0.0, true, false);
    ScalarField2D f = test::random_smooth_field2d(g, rng);

    set_backend(Backend::Serial);
    ScalarField2D d1s = partial(f, 1), d2s = partial(f, 2);
    set_backend(Backend::OpenMP);
    ScalarField2D d1p = partial(f, 1), d2p = partial(f, 2);
    for (std::size_t k = 0; k < d1s.values.size(); ++k) {
        CHECK(d1s.values[k] == d1p.values[k]);
        CHECK(d2s.values[k] == d2p.values[k]);
    }
}

TEST_CASE("parallel_for covers each index exactly once") {
    for (Backend b : {Backend::Serial, Backend::OpenMP}) {
        set_backend(b);
        std::vector<int> hits(1000, 0);
        parallel_for(1000, [&](std::ptrdiff_t i) { hits[i] += 1; });
        for (int h : hits) CHECK(h == 1);
    }
}
