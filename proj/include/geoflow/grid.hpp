// Uniform grids and sampled scalar fields in one and two dimensions.
// Fields are plain value types; every operation in the library treats them
// as immutable inputs and returns fresh fields.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace geoflow {

struct Grid2D {
    int nx = 0, ny = 0;
    double dx = 0.0, dy = 0.0;
    double x0 = 0.0, y0 = 0.0;
    bool periodic_x = false, periodic_y = false;

    Grid2D() = default;
    Grid2D(int nx_, int ny_, double dx_, double dy_, double x0_ = 0.0, double y0_ = 0.0,
           bool periodic_x_ = false, bool periodic_y_ = false)
        : nx(nx_), ny(ny_), dx(dx_), dy(dy_), x0(x0_), y0(y0_),
          periodic_x(periodic_x_), periodic_y(periodic_y_) {
        if (nx < 4 || ny < 4) throw std::invalid_argument("Grid2D: nx and ny must be >= 4");
        if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("Grid2D: spacings must be positive");
    }

    double x(int i) const { return x0 + i * dx; }
    double y(int j) const { return y0 + j * dy; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool operator==(const Grid2D&) const = default;
};

struct ScalarField2D {
    Grid2D grid;
    std::vector<double> values; // row-major, (i,j) at values[i*ny + j]

    ScalarField2D() = default;
    explicit ScalarField2D(const Grid2D& g, double fill = 0.0)
        : grid(g), values(g.size(), fill) {}
    ScalarField2D(const Grid2D& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size())
            throw std::invalid_argument("ScalarField2D: value count does not match grid");
        for (double x : values)
            if (!std::isfinite(x)) throw std::invalid_argument("ScalarField2D: non-finite value");
    }

    double& at(int i, int j) { return values[static_cast<std::size_t>(i) * grid.ny + j]; }
    double at(int i, int j) const { return values[static_cast<std::size_t>(i) * grid.ny + j]; }

    template <class F>
    static ScalarField2D sampled(const Grid2D& g, F&& f) {
        ScalarField2D out(g);
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) out.at(i, j) = f(g.x(i), g.y(j));
        return out;
    }
};

struct ScalarField1D {
    int nx = 0;
    double dx = 0.0, x0 = 0.0;
    bool periodic = false;
    std::vector<double> values;

    ScalarField1D() = default;
    ScalarField1D(int nx_, double dx_, double x0_, bool periodic_, double fill = 0.0)
        : nx(nx_), dx(dx_), x0(x0_), periodic(periodic_), values(nx_, fill) {
        check_shape();
    }
    ScalarField1D(int nx_, double dx_, double x0_, bool periodic_, std::vector<double> v)
        : nx(nx_), dx(dx_), x0(x0_), periodic(periodic_), values(std::move(v)) {
        check_shape();
        if (static_cast<int>(values.size()) != nx)
            throw std::invalid_argument("ScalarField1D: value count does not match nx");
        for (double x : values)
            if (!std::isfinite(x)) throw std::invalid_argument("ScalarField1D: non-finite value");
    }

    double x(int i) const { return x0 + i * dx; }
    double length() const { return nx * dx; } // period on periodic grids

    bool same_layout(const ScalarField1D& o) const {
        return nx == o.nx && dx == o.dx && x0 == o.x0 && periodic == o.periodic;
    }

    template <class F>
    static ScalarField1D sampled(int nx, double dx, double x0, bool periodic, F&& f) {
        ScalarField1D out(nx, dx, x0, periodic);
        for (int i = 0; i < nx; ++i) out.values[i] = f(x0 + i * dx);
        return out;
    }

private:
    void check_shape() const {
        if (nx < 4) throw std::invalid_argument("ScalarField1D: nx must be >= 4");
        if (!(dx > 0.0)) throw std::invalid_argument("ScalarField1D: dx must be positive");
    }
};

// Max-norm over samples.
double max_abs(const ScalarField1D& f);
double max_abs(const ScalarField2D& f);

// Discrete integral (sum times spacing).
double integral(const ScalarField1D& f);

void require_same_grid(const Grid2D& a, const Grid2D& b, const char* what);

} // namespace geoflow
