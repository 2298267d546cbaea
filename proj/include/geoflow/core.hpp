// Execution backend selection and the low-level data-parallel kernels.
//
// Every grid kernel exists twice: a plain serial loop that serves as the
// reference implementation, and an OpenMP variant used by default when the
// library is built with OpenMP. The two must produce bitwise-identical
// results; tests/test_kernels.cpp enforces that and tools/bench.cpp times
// the two against each other.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace geoflow {

enum class Backend { Serial, OpenMP };

Backend backend() noexcept;
void set_backend(Backend b) noexcept;
bool openmp_available() noexcept;
int worker_count() noexcept;

// Numerical failure that is not a caller contract violation (degenerate
// branch points, halted evolution, non-invertible local maps, ...).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Index-space map over [0, n). The body must not touch shared mutable state.
template <class F>
void parallel_for(std::ptrdiff_t n, F&& body) {
#ifdef _OPENMP
    if (backend() == Backend::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
}

namespace kernels {

// Second-order first derivative of a 1-D sample array.
// inv2dx = 1/(2*dx). Periodic wraps; non-periodic uses one-sided
// second-order stencils on the two boundary layers.
void diff1d_serial(const double* f, double* out, int n, double inv2dx, bool periodic);
void diff1d_omp(const double* f, double* out, int n, double inv2dx, bool periodic);

// Same stencils along axis 1 (index i) / axis 2 (index j) of a row-major
// nx-by-ny array (element (i,j) at f[i*ny + j]).
void diff2d_axis1_serial(const double* f, double* out, int nx, int ny, double inv2dx, bool periodic);
void diff2d_axis1_omp(const double* f, double* out, int nx, int ny, double inv2dx, bool periodic);
void diff2d_axis2_serial(const double* f, double* out, int nx, int ny, double inv2dy, bool periodic);
void diff2d_axis2_omp(const double* f, double* out, int nx, int ny, double inv2dy, bool periodic);

} // namespace kernels

} // namespace geoflow
