#include "kernels_impl.hpp"

// Reference implementations. These define the semantics the SIMD variants
// are tested against; keep them simple enough to audit by eye.

namespace cohsim::kernels::detail {

namespace {

void scale_scalar(cxd* z, cxd s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] *= s;
}

void axpy_scalar(cxd* z, cxd s, const cxd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] += s * x[i];
}

void mul_scalar(cxd* z, const cxd* x, const cxd* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void mul_real_scalar(cxd* z, const double* w, const cxd* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] = w[i] * x[i];
}

void axpy_real_scalar(cxd* z, double s, const double* w, const cxd* x,
                      std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) z[i] += (s * w[i]) * x[i];
}

double norm_sq_scalar(const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return acc;
}

double weighted_norm_sq_scalar(const double* w, const cxd* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    }
    return acc;
}

cxd dotc_scalar(const cxd* x, const cxd* y, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

}  // namespace

const Backend& scalar_backend() {
    static const Backend table{
        "scalar",        scale_scalar,     axpy_scalar,
        mul_scalar,      mul_real_scalar,  axpy_real_scalar,
        norm_sq_scalar,  weighted_norm_sq_scalar, dotc_scalar,
    };
    return table;
}

}  // namespace cohsim::kernels::detail
