// Shared stencil bodies for the serial and OpenMP kernel variants, so the
// per-point arithmetic is written once and the two backends stay bitwise
// identical.

#pragma once

namespace geoflow::kernels::detail {

inline double interior(const double* f, int i, int stride, double inv2dx) {
    return (f[(i + 1) * stride] - f[(i - 1) * stride]) * inv2dx;
}

// One-sided ends written as difference-of-differences so constants cancel
// exactly: -3a+4b-c = 4(b-a) - (c-a).
inline double onesided_low(const double* f, int stride, double inv2dx) {
    return (4.0 * (f[stride] - f[0]) - (f[2 * stride] - f[0])) * inv2dx;
}

inline double onesided_high(const double* f, int n, int stride, double inv2dx) {
    const double a = f[(n - 1) * stride], b = f[(n - 2) * stride], c = f[(n - 3) * stride];
    return (4.0 * (a - b) - (a - c)) * inv2dx;
}

inline void diff_line(const double* f, double* out, int n, int stride, double inv2dx,
                      bool periodic) {
    if (periodic) {
        out[0] = (f[stride] - f[(n - 1) * stride]) * inv2dx;
        for (int i = 1; i < n - 1; ++i) out[i * stride] = interior(f, i, stride, inv2dx);
        out[(n - 1) * stride] = (f[0] - f[(n - 2) * stride]) * inv2dx;
    } else {
        out[0] = onesided_low(f, stride, inv2dx);
        for (int i = 1; i < n - 1; ++i) out[i * stride] = interior(f, i, stride, inv2dx);
        out[(n - 1) * stride] = onesided_high(f, n, stride, inv2dx);
    }
}

inline double line_point(const double* f, int i, int n, int stride, double inv2dx,
                         bool periodic) {
    if (i > 0 && i < n - 1) return interior(f, i, stride, inv2dx);
    if (periodic) {
        if (i == 0) return (f[stride] - f[(n - 1) * stride]) * inv2dx;
        return (f[0] - f[(n - 2) * stride]) * inv2dx;
    }
    if (i == 0) return onesided_low(f, stride, inv2dx);
    return onesided_high(f, n, stride, inv2dx);
}

} // namespace geoflow::kernels::detail
