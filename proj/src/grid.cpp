#include "geoflow/grid.hpp"

#include <cstdio>

namespace geoflow {

double max_abs(const ScalarField1D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const ScalarField2D& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double integral(const ScalarField1D& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s * f.dx;
}

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what) {
    if (a == b) return;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "%s: grid mismatch (%dx%d, dx=%g dy=%g vs %dx%d, dx=%g dy=%g)", what, a.nx,
                  a.ny, a.dx, a.dy, b.nx, b.ny, b.dx, b.dy);
    throw std::invalid_argument(buf);
}

} // namespace geoflow
