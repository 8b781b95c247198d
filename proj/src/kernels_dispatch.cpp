#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace cohsim::kernels {

namespace {

using detail::Backend;

bool cpu_has_avx2() {
#if defined(COHSIM_HAVE_AVX2)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Backend* pick(std::string_view name) {
    if (name == "scalar") return &detail::scalar_backend();
#if defined(COHSIM_HAVE_AVX2)
    if (name == "avx2" && cpu_has_avx2()) return &detail::avx2_backend();
#endif
    if (name == "auto" || name.empty()) {
#if defined(COHSIM_HAVE_AVX2)
        if (cpu_has_avx2()) return &detail::avx2_backend();
#endif
        return &detail::scalar_backend();
    }
    return nullptr;
}

std::atomic<const Backend*>& active_slot() {
    static std::atomic<const Backend*> slot{[] {
        const char* env = std::getenv("COHSIM_KERNELS");
        const Backend* b = pick(env ? std::string_view{env} : std::string_view{});
        return b ? b : &detail::scalar_backend();
    }()};
    return slot;
}

const Backend& active() { return *active_slot().load(std::memory_order_relaxed); }

}  // namespace

void scale(cxd* z, cxd s, std::size_t n) { active().scale(z, s, n); }
void axpy(cxd* z, cxd s, const cxd* x, std::size_t n) { active().axpy(z, s, x, n); }
void mul(cxd* z, const cxd* x, const cxd* y, std::size_t n) { active().mul(z, x, y, n); }
void mul_real(cxd* z, const double* w, const cxd* x, std::size_t n) {
    active().mul_real(z, w, x, n);
}
void axpy_real(cxd* z, double s, const double* w, const cxd* x, std::size_t n) {
    active().axpy_real(z, s, w, x, n);
}
double norm_sq(const cxd* x, std::size_t n) { return active().norm_sq(x, n); }
double weighted_norm_sq(const double* w, const cxd* x, std::size_t n) {
    return active().weighted_norm_sq(w, x, n);
}
cxd dotc(const cxd* x, const cxd* y, std::size_t n) { return active().dotc(x, y, n); }

std::string_view backend() { return active().name; }

bool set_backend(std::string_view name) {
    const Backend* b = pick(name);
    if (!b) return false;
    active_slot().store(b, std::memory_order_relaxed);
    return true;
}

}  // namespace cohsim::kernels
