#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "cohsim/kernels.hpp"
#include "cohsim/rng.hpp"

using cohsim::RandomStream;
using cohsim::kernels::cxd;
namespace k = cohsim::kernels;

namespace {

std::vector<cxd> random_vec(std::size_t n, std::uint64_t stream) {
    RandomStream rng(42, stream);
    std::vector<cxd> v(n);
    for (auto& z : v) z = {2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0};
    return v;
}

std::vector<double> random_weights(std::size_t n, std::uint64_t stream) {
    RandomStream rng(99, stream);
    std::vector<double> w(n);
    for (auto& x : w) x = 3.0 * rng.next_uniform();
    return w;
}

bool bit_equal(const std::vector<cxd>& a, const std::vector<cxd>& b) {
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(cxd)) == 0;
}

}  // namespace

TEST_CASE("scalar kernel semantics") {
    REQUIRE(k::set_backend("scalar"));
    std::vector<cxd> z{{1.0, 2.0}, {3.0, -1.0}};
    k::scale(z.data(), {0.0, 1.0}, z.size());
    CHECK(z[0] == cxd{-2.0, 1.0});
    CHECK(z[1] == cxd{1.0, 3.0});

    std::vector<cxd> x{{1.0, 0.0}, {0.0, 1.0}};
    k::axpy(z.data(), {2.0, 0.0}, x.data(), z.size());
    CHECK(z[0] == cxd{0.0, 1.0});
    CHECK(z[1] == cxd{1.0, 5.0});

    CHECK(k::norm_sq(x.data(), x.size()) == doctest::Approx(2.0));
    const cxd d = k::dotc(x.data(), z.data(), x.size());
    // conj(1)* (0+1i) + conj(i)*(1+5i) = i + (5 - i) = 5
    CHECK(d.real() == doctest::Approx(5.0));
    CHECK(d.imag() == doctest::Approx(0.0));

    std::vector<double> w{2.0, 3.0};
    CHECK(k::weighted_norm_sq(w.data(), x.data(), 2) == doctest::Approx(5.0));

    std::vector<cxd> out(2);
    k::mul(out.data(), x.data(), z.data(), 2);
    CHECK(out[0] == cxd{0.0, 1.0});
    CHECK(out[1] == cxd{-5.0, 1.0});

    k::mul_real(out.data(), w.data(), x.data(), 2);
    CHECK(out[0] == cxd{2.0, 0.0});
    CHECK(out[1] == cxd{0.0, 3.0});

    k::axpy_real(out.data(), 2.0, w.data(), x.data(), 2);
    CHECK(out[0] == cxd{6.0, 0.0});
    CHECK(out[1] == cxd{0.0, 9.0});
    k::set_backend("auto");
}

TEST_CASE("avx2 backend matches the scalar reference") {
    if (!k::set_backend("avx2")) {
        MESSAGE("avx2 backend unavailable; skipping equivalence checks");
        return;
    }
    // odd sizes exercise the scalar tails
    for (std::size_t n : {1u, 2u, 3u, 7u, 64u, 129u, 1000u}) {
        const auto x = random_vec(n, n);
        const auto y = random_vec(n, n + 1000);
        const auto w = random_weights(n, n);
        const cxd s{0.7, -0.3};

        std::vector<cxd> za(x), zs(x), out_a(n), out_s(n);

        k::set_backend("avx2");
        k::scale(za.data(), s, n);
        k::set_backend("scalar");
        k::scale(zs.data(), s, n);
        CHECK(bit_equal(za, zs));

        za = x;
        zs = x;
        k::set_backend("avx2");
        k::axpy(za.data(), s, y.data(), n);
        k::set_backend("scalar");
        k::axpy(zs.data(), s, y.data(), n);
        CHECK(bit_equal(za, zs));

        k::set_backend("avx2");
        k::mul(out_a.data(), x.data(), y.data(), n);
        k::set_backend("scalar");
        k::mul(out_s.data(), x.data(), y.data(), n);
        CHECK(bit_equal(out_a, out_s));

        k::set_backend("avx2");
        k::mul_real(out_a.data(), w.data(), x.data(), n);
        k::set_backend("scalar");
        k::mul_real(out_s.data(), w.data(), x.data(), n);
        CHECK(bit_equal(out_a, out_s));

        za = y;
        zs = y;
        k::set_backend("avx2");
        k::axpy_real(za.data(), 1.3, w.data(), x.data(), n);
        k::set_backend("scalar");
        k::axpy_real(zs.data(), 1.3, w.data(), x.data(), n);
        CHECK(bit_equal(za, zs));

        // reductions: summation order differs, allow a few ulps
        k::set_backend("avx2");
        const double na = k::norm_sq(x.data(), n);
        const double wa = k::weighted_norm_sq(w.data(), x.data(), n);
        const cxd da = k::dotc(x.data(), y.data(), n);
        k::set_backend("scalar");
        const double ns = k::norm_sq(x.data(), n);
        const double ws = k::weighted_norm_sq(w.data(), x.data(), n);
        const cxd ds = k::dotc(x.data(), y.data(), n);
        CHECK(na == doctest::Approx(ns).epsilon(1e-13));
        CHECK(wa == doctest::Approx(ws).epsilon(1e-13));
        CHECK(da.real() == doctest::Approx(ds.real()).epsilon(1e-12));
        CHECK(std::abs(da.imag() - ds.imag()) < 1e-13 * (1.0 + std::abs(ds.imag())));
    }
    k::set_backend("auto");
}

TEST_CASE("random streams are reproducible and index-split") {
    RandomStream a(123456789, 7);
    RandomStream b(123456789, 7);
    RandomStream c(123456789, 8);
    bool identical = true, distinct = false;
    for (int i = 0; i < 64; ++i) {
        const auto va = a.next_u64();
        identical = identical && (va == b.next_u64());
        distinct = distinct || (va != c.next_u64());
    }
    CHECK(identical);
    CHECK(distinct);
}

TEST_CASE("uniform draws look uniform") {
    RandomStream rng(2026, 0);
    const int n = 200000;
    double mean = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        mean += u;
        var += (u - 0.5) * (u - 0.5);
    }
    mean /= n;
    var /= n;
    CHECK(std::abs(mean - 0.5) < 0.005);       // ~17 sigma headroom
    CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}
