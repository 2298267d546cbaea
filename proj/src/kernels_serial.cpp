// Reference implementations of the derivative kernels: straightforward
// loops, no threading. The OpenMP variants must match these bitwise.

#include "geoflow/core.hpp"
#include "kernels_detail.hpp"

namespace geoflow::kernels {

void diff1d_serial(const double* f, double* out, int n, double inv2dx, bool periodic) {
    detail::diff_line(f, out, n, 1, inv2dx, periodic);
}

void diff2d_axis1_serial(const double* f, double* out, int nx, int ny, double inv2dx,
                         bool periodic) {
    for (int j = 0; j < ny; ++j) detail::diff_line(f + j, out + j, nx, ny, inv2dx, periodic);
}

void diff2d_axis2_serial(const double* f, double* out, int nx, int ny, double inv2dy,
                         bool periodic) {
    for (int i = 0; i < nx; ++i)
        detail::diff_line(f + i * ny, out + i * ny, ny, 1, inv2dy, periodic);
}

} // namespace geoflow::kernels
