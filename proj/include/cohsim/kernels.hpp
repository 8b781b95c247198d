#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

// Vectorized primitives for the complex inner loops (trajectory stepping,
// density-matrix stencils, split-step phase application). Every operation
// has a scalar reference implementation and, on x86-64, an AVX2 variant;
// the backend is selected at runtime (override with COHSIM_KERNELS=scalar
// or =avx2). Pointwise operations are bit-identical across backends;
// reductions may differ by a few ulps because of summation order.

namespace cohsim::kernels {

using cxd = std::complex<double>;

// z[i] *= s
void scale(cxd* z, cxd s, std::size_t n);

// z[i] += s * x[i]
void axpy(cxd* z, cxd s, const cxd* x, std::size_t n);

// z[i] = x[i] * y[i]
void mul(cxd* z, const cxd* x, const cxd* y, std::size_t n);

// z[i] = w[i] * x[i], real weights
void mul_real(cxd* z, const double* w, const cxd* x, std::size_t n);

// z[i] += s * w[i] * x[i], real weights and scalar
void axpy_real(cxd* z, double s, const double* w, const cxd* x, std::size_t n);

// sum_i |x[i]|^2
double norm_sq(const cxd* x, std::size_t n);

// sum_i w[i] * |x[i]|^2
double weighted_norm_sq(const double* w, const cxd* x, std::size_t n);

// sum_i conj(x[i]) * y[i]
cxd dotc(const cxd* x, const cxd* y, std::size_t n);

// Name of the active backend ("scalar" or "avx2").
std::string_view backend();

// Force a backend by name ("scalar", "avx2", "auto"). Returns false (and
// leaves the selection unchanged) if the CPU or build lacks support.
bool set_backend(std::string_view name);

}  // namespace cohsim::kernels
