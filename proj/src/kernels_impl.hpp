#pragma once

#include "cohsim/kernels.hpp"

// Per-backend entry points. Each backend must implement the full table;
// the dispatcher in kernels_dispatch.cpp picks one at startup.

namespace cohsim::kernels::detail {

struct Backend {
    const char* name;
    void (*scale)(cxd*, cxd, std::size_t);
    void (*axpy)(cxd*, cxd, const cxd*, std::size_t);
    void (*mul)(cxd*, const cxd*, const cxd*, std::size_t);
    void (*mul_real)(cxd*, const double*, const cxd*, std::size_t);
    void (*axpy_real)(cxd*, double, const double*, const cxd*, std::size_t);
    double (*norm_sq)(const cxd*, std::size_t);
    double (*weighted_norm_sq)(const double*, const cxd*, std::size_t);
    cxd (*dotc)(const cxd*, const cxd*, std::size_t);
};

const Backend& scalar_backend();

#if defined(COHSIM_HAVE_AVX2)
const Backend& avx2_backend();
#endif

}  // namespace cohsim::kernels::detail
