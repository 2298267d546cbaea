#include "geoflow/core.hpp"

namespace geoflow {

namespace {
Backend& backend_state() noexcept {
#ifdef _OPENMP
    static Backend b = Backend::OpenMP;
#else
    static Backend b = Backend::Serial;
#endif
    return b;
}
} // namespace

Backend backend() noexcept { return backend_state(); }

void set_backend(Backend b) noexcept {
#ifndef _OPENMP
    b = Backend::Serial;
#endif
    backend_state() = b;
}

bool openmp_available() noexcept {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

int worker_count() noexcept {
#ifdef _OPENMP
    if (backend() == Backend::OpenMP) return omp_get_max_threads();
#endif
    return 1;
}

} // namespace geoflow
