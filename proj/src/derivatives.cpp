#include "geoflow/derivatives.hpp"

#include "geoflow/core.hpp"

#include <stdexcept>

namespace geoflow {

ScalarField2D partial(const ScalarField2D& field, int axis) {
    if (axis != 1 && axis != 2) throw std::invalid_argument("partial: axis must be 1 or 2");
    const Grid2D& g = field.grid;
    ScalarField2D out(g);
    const bool omp = backend() == Backend::OpenMP;
    if (axis == 1) {
        const double inv2 = 1.0 / (2.0 * g.dx);
        if (omp)
            kernels::diff2d_axis1_omp(field.values.data(), out.values.data(), g.nx, g.ny, inv2,
                                      g.periodic_x);
        else
            kernels::diff2d_axis1_serial(field.values.data(), out.values.data(), g.nx, g.ny,
                                         inv2, g.periodic_x);
    } else {
        const double inv2 = 1.0 / (2.0 * g.dy);
        if (omp)
            kernels::diff2d_axis2_omp(field.values.data(), out.values.data(), g.nx, g.ny, inv2,
                                      g.periodic_y);
        else
            kernels::diff2d_axis2_serial(field.values.data(), out.values.data(), g.nx, g.ny,
                                         inv2, g.periodic_y);
    }
    return out;
}

ScalarField1D partial1d(const ScalarField1D& field) {
    ScalarField1D out(field.nx, field.dx, field.x0, field.periodic);
    const double inv2 = 1.0 / (2.0 * field.dx);
    if (backend() == Backend::OpenMP)
        kernels::diff1d_omp(field.values.data(), out.values.data(), field.nx, inv2,
                            field.periodic);
    else
        kernels::diff1d_serial(field.values.data(), out.values.data(), field.nx, inv2,
                               field.periodic);
    return out;
}

std::vector<double> nonuniform_derivative(const std::vector<double>& t,
                                          const std::vector<double>& values) {
    const std::size_t n = t.size();
    if (values.size() != n) throw std::invalid_argument("nonuniform_derivative: size mismatch");
    if (n < 3) throw std::invalid_argument("nonuniform_derivative: need at least 3 samples");
    std::vector<double> out(n);
    for (std::size_t k = 1; k + 1 < n; ++k)
        out[k] = central_nonuniform(values[k - 1], values[k], values[k + 1], t[k] - t[k - 1],
                                    t[k + 1] - t[k]);
    // one-sided second-order ends
    {
        const double h1 = t[1] - t[0], s = t[2] - t[0];
        const double c = -h1 / (s * (s - h1));
        const double b = -c * (s * s) / (h1 * h1);
        out[0] = -(b + c) * values[0] + b * values[1] + c * values[2];
    }
    {
        const double h1 = t[n - 2] - t[n - 1], s = t[n - 3] - t[n - 1]; // negative steps
        const double c = -h1 / (s * (s - h1));
        const double b = -c * (s * s) / (h1 * h1);
        out[n - 1] = -(b + c) * values[n - 1] + b * values[n - 2] + c * values[n - 3];
    }
    return out;
}

} // namespace geoflow
