// OpenMP variants of the derivative kernels. Work is split across grid
// lines (2-D) or points (1-D); each output element is written exactly once,
// with the same per-point arithmetic as the serial reference.

#include "geoflow/core.hpp"
#include "kernels_detail.hpp"

namespace geoflow::kernels {

void diff1d_omp(const double* f, double* out, int n, double inv2dx, bool periodic) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[i] = detail::line_point(f, i, n, 1, inv2dx, periodic);
}

void diff2d_axis1_omp(const double* f, double* out, int nx, int ny, double inv2dx,
                      bool periodic) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < ny; ++j) detail::diff_line(f + j, out + j, nx, ny, inv2dx, periodic);
}

void diff2d_axis2_omp(const double* f, double* out, int nx, int ny, double inv2dy,
                      bool periodic) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nx; ++i)
        detail::diff_line(f + i * ny, out + i * ny, ny, 1, inv2dy, periodic);
}

} // namespace geoflow::kernels
