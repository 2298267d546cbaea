// Timing comparison of the serial reference kernels against the OpenMP
// variants on representative workloads.

#include "geoflow/core.hpp"
#include "geoflow/derivatives.hpp"
#include "geoflow/grid.hpp"
#include "geoflow/riemann.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

using namespace geoflow;

namespace {

double time_ms(const std::function<void()>& fn, int reps) {
    fn(); // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void row(const char* name, const std::function<void()>& fn, int reps) {
    set_backend(Backend::Serial);
    const double ts = time_ms(fn, reps);
    set_backend(Backend::OpenMP);
    const double tp = time_ms(fn, reps);
    std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, ts, tp, ts / tp);
}

} // namespace

int main() {
    std::printf("backend: OpenMP %s, %d workers\n", openmp_available() ? "on" : "off",
                worker_count());
    std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

    const int n = 1024;
    Grid2D grid(n, n, 0.01, 0.01, 0.0, 0.0, true, true);
    ScalarField2D f = ScalarField2D::sampled(
        grid, [](double x, double y) { return std::sin(0.61 * x) * std::cos(0.42 * y); });

    row("partial axis1 1024x1024", [&] { (void)partial(f, 1); }, 20);
    row("partial axis2 1024x1024", [&] { (void)partial(f, 2); }, 20);

    const int m = 16384;
    ScalarField1D a = ScalarField1D::sampled(m, 0.001, 0.0, true,
                                             [](double x) { return 1.2 + 0.2 * std::sin(x); });
    std::vector<ScalarField1D> b;
    b.push_back(ScalarField1D::sampled(m, 0.001, 0.0, true,
                                       [](double x) { return 0.4 * std::sin(2.0 * x); }));
    b.push_back(ScalarField1D::sampled(m, 0.001, 0.0, true,
                                       [](double x) { return 1.0 + 0.3 * std::cos(x); }));
    HydroSnapshot snap(3, a, b);
    row("invariants fieldwise 16384", [&] { (void)invariants_and_velocities(snap); }, 5);

    return 0;
}
