#include "kernels_impl.hpp"

#if defined(COHSIM_HAVE_AVX2)

#include <immintrin.h>

// AVX2 variants. Layout: one __m256d holds two interleaved complex doubles
// [re0, im0, re1, im1]. No FMA is used so that pointwise results match the
// scalar backend bit for bit (the whole project builds with
// -ffp-contract=off for the same reason).

namespace cohsim::kernels::detail {

namespace {

// [re0,im0,re1,im1] * complex stored as (r_dup, i_dup) vectors
inline __m256d cmul(__m256d x, __m256d yr, __m256d yi) {
    __m256d xswap = _mm256_permute_pd(x, 0x5);  // [im0,re0,im1,re1]
    return _mm256_addsub_pd(_mm256_mul_pd(x, yr), _mm256_mul_pd(xswap, yi));
}

// duplicate the real parts of two packed complex values: [a,b,c,d] -> [a,a,c,c]
inline __m256d dup_re(__m256d v) { return _mm256_movedup_pd(v); }
// duplicate the imaginary parts: [a,b,c,d] -> [b,b,d,d]
inline __m256d dup_im(__m256d v) { return _mm256_permute_pd(v, 0xF); }

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(lo) + _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo));
}

// broadcast two consecutive real weights into complex-slot duplicates:
// [w0, w1] -> [w0, w0, w1, w1]
inline __m256d dup_weights(const double* w) {
    __m128d wv = _mm_loadu_pd(w);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(wv), 0b01010000);
}

void scale_avx2(cxd* z, cxd s, std::size_t n) {
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    auto* p = reinterpret_cast<double*>(z);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, p += 4) {
        _mm256_storeu_pd(p, cmul(_mm256_loadu_pd(p), sr, si));
    }
    for (; i < n; ++i) z[i] *= s;
}

void axpy_avx2(cxd* z, cxd s, const cxd* x, std::size_t n) {
    const __m256d sr = _mm256_set1_pd(s.real());
    const __m256d si = _mm256_set1_pd(s.imag());
    auto* pz = reinterpret_cast<double*>(z);
    const auto* px = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, pz += 4, px += 4) {
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(pz),
                                    cmul(_mm256_loadu_pd(px), sr, si));
        _mm256_storeu_pd(pz, acc);
    }
    for (; i < n; ++i) z[i] += s * x[i];
}

void mul_avx2(cxd* z, const cxd* x, const cxd* y, std::size_t n) {
    auto* pz = reinterpret_cast<double*>(z);
    const auto* px = reinterpret_cast<const double*>(x);
    const auto* py = reinterpret_cast<const double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, pz += 4, px += 4, py += 4) {
        __m256d yv = _mm256_loadu_pd(py);
        _mm256_storeu_pd(pz, cmul(_mm256_loadu_pd(px), dup_re(yv), dup_im(yv)));
    }
    for (; i < n; ++i) z[i] = x[i] * y[i];
}

void mul_real_avx2(cxd* z, const double* w, const cxd* x, std::size_t n) {
    auto* pz = reinterpret_cast<double*>(z);
    const auto* px = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, pz += 4, px += 4) {
        _mm256_storeu_pd(pz, _mm256_mul_pd(dup_weights(w + i), _mm256_loadu_pd(px)));
    }
    for (; i < n; ++i) z[i] = w[i] * x[i];
}

void axpy_real_avx2(cxd* z, double s, const double* w, const cxd* x,
                    std::size_t n) {
    const __m256d sv = _mm256_set1_pd(s);
    auto* pz = reinterpret_cast<double*>(z);
    const auto* px = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, pz += 4, px += 4) {
        __m256d coef = _mm256_mul_pd(sv, dup_weights(w + i));
        __m256d acc = _mm256_add_pd(_mm256_loadu_pd(pz),
                                    _mm256_mul_pd(coef, _mm256_loadu_pd(px)));
        _mm256_storeu_pd(pz, acc);
    }
    for (; i < n; ++i) z[i] += (s * w[i]) * x[i];
}

double norm_sq_avx2(const cxd* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const auto* px = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, px += 4) {
        __m256d v = _mm256_loadu_pd(px);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        total += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    }
    return total;
}

double weighted_norm_sq_avx2(const double* w, const cxd* x, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const auto* px = reinterpret_cast<const double*>(x);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, px += 4) {
        __m256d v = _mm256_loadu_pd(px);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(dup_weights(w + i),
                                               _mm256_mul_pd(v, v)));
    }
    double total = hsum(acc);
    for (; i < n; ++i) {
        total += w[i] * (x[i].real() * x[i].real() + x[i].imag() * x[i].imag());
    }
    return total;
}

cxd dotc_avx2(const cxd* x, const cxd* y, std::size_t n) {
    // re = xr*yr + xi*yi accumulates lanewise; im = xr*yi - xi*yr needs a
    // lane-alternating sign applied once at the end.
    __m256d racc = _mm256_setzero_pd();
    __m256d iacc = _mm256_setzero_pd();
    const auto* px = reinterpret_cast<const double*>(x);
    const auto* py = reinterpret_cast<const double*>(y);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2, px += 4, py += 4) {
        __m256d xv = _mm256_loadu_pd(px);
        __m256d yv = _mm256_loadu_pd(py);
        racc = _mm256_add_pd(racc, _mm256_mul_pd(xv, yv));
        iacc = _mm256_add_pd(iacc, _mm256_mul_pd(_mm256_permute_pd(xv, 0x5), yv));
    }
    const __m256d sign = _mm256_set_pd(1.0, -1.0, 1.0, -1.0);
    double re = hsum(racc);
    double im = hsum(_mm256_mul_pd(iacc, sign));
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

}  // namespace

const Backend& avx2_backend() {
    static const Backend table{
        "avx2",        scale_avx2,    axpy_avx2,
        mul_avx2,      mul_real_avx2, axpy_real_avx2,
        norm_sq_avx2,  weighted_norm_sq_avx2, dotc_avx2,
    };
    return table;
}

}  // namespace cohsim::kernels::detail

#endif  // COHSIM_HAVE_AVX2
