#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "cohsim/exchange.hpp"
#include "cohsim/rng.hpp"

using namespace cohsim;

namespace {

// Independent oracle: the exchange of excitations between two modes is the
// beam-splitter unitary exp(theta (ae+ as - ae as+)) on the truncated joint
// space. Builds it by dense matrix exponentiation and applies it to |n, 0>.
TwoModeState beam_splitter_oracle(int n, double theta) {
    const int d = n + 1;
    auto idx = [d](int m, int k) { return m * d + k; };
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(d * d, d * d);
    for (int m = 1; m < d; ++m) {
        for (int k = 0; k + 1 < d; ++k) {
            // ae+ as |m, k> = sqrt(m (k+1)) |m-1, k+1>
            const double amp = std::sqrt(static_cast<double>(m) * (k + 1));
            gen(idx(m - 1, k + 1), idx(m, k)) += amp;
            gen(idx(m, k), idx(m - 1, k + 1)) -= amp;  // minus ae as+
        }
    }
    Eigen::MatrixXd u = (theta * gen).exp();
    Eigen::VectorXd psi0 = Eigen::VectorXd::Zero(d * d);
    psi0(idx(n, 0)) = 1.0;
    Eigen::VectorXd psi = u * psi0;

    TwoModeState out;
    out.n_trunc_s = out.n_trunc_e = n;
    out.amp.resize(static_cast<std::size_t>(d) * d);
    for (int m = 0; m < d; ++m) {
        for (int k = 0; k < d; ++k) out.at(m, k) = psi(idx(m, k));
    }
    return out;
}

FockVector random_state(int n_trunc, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    FockVector v;
    v.amp.resize(static_cast<std::size_t>(n_trunc) + 1);
    for (auto& z : v.amp) {
        z = {2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0};
    }
    v.normalize();
    return v;
}

}  // namespace

TEST_CASE("amplitude pair contract") {
    CHECK_THROWS_AS(AmplitudePair(cxd{1.0, 0.0}, cxd{0.5, 0.0}), std::invalid_argument);
    const AmplitudePair half = AmplitudePair::from_beta_sq(0.5);
    CHECK(std::norm(half.alpha) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(AmplitudePair::from_beta_sq(1.5), std::invalid_argument);
}

TEST_CASE("evolve_fock basics") {
    SUBCASE("n = 0 stays vacuum") {
        const TwoModeState s = evolve_fock(0, AmplitudePair::from_beta_sq(0.3));
        CHECK(std::abs(s.at(0, 0) - cxd{1.0, 0.0}) < 1e-14);
    }
    SUBCASE("n = 1 reproduces the exchange form") {
        const AmplitudePair amps{cxd{0.6, 0.0}, cxd{0.0, 0.8}};
        const TwoModeState s = evolve_fock(1, amps);
        CHECK(std::abs(s.at(1, 0) - amps.alpha) < 1e-14);
        CHECK(std::abs(s.at(0, 1) - amps.beta) < 1e-14);
    }
    SUBCASE("n = 2 at a balanced splitter") {
        const TwoModeState s = evolve_fock(2, AmplitudePair::from_beta_sq(0.5));
        CHECK(s.at(2, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(s.at(1, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(s.at(0, 2).real() == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("agrees with the beam-splitter matrix exponential") {
        for (int n : {1, 2, 3, 5}) {
            for (double theta : {0.2, 0.785398163397448, 1.2}) {
                const TwoModeState brute = beam_splitter_oracle(n, theta);
                const AmplitudePair amps{std::cos(theta), std::sin(theta)};
                const TwoModeState fast = evolve_fock(n, amps);
                for (std::size_t i = 0; i < fast.amp.size(); ++i) {
                    CHECK(std::abs(fast.amp[i] - brute.amp[i]) < 1e-10);
                }
            }
        }
    }
    SUBCASE("norm survives n = 200") {
        const TwoModeState s = evolve_fock(200, AmplitudePair::from_beta_sq(0.5));
        CHECK(std::abs(s.norm_sq() - 1.0) < 1e-10);
    }
}

TEST_CASE("evolve_system") {
    SUBCASE("vacuum is inert") {
        const TwoModeState s = evolve_system(fock_state(0, 3),
                                             AmplitudePair::from_beta_sq(0.7));
        CHECK(std::abs(s.at(0, 0) - cxd{1.0, 0.0}) < 1e-14);
    }
    SUBCASE("coherent input factorizes into coherent(l a) x coherent(l b)") {
        const cxd lambda{1.2, 0.5};
        const AmplitudePair amps = AmplitudePair::from_beta_sq(0.4);
        const int nt = auto_truncation(lambda);
        const TwoModeState s = evolve_system(coherent_state(lambda, nt), amps);

        const FockVector cs = coherent_state(lambda * amps.alpha, nt, true);
        const FockVector ce = coherent_state(lambda * amps.beta, nt, true);
        double max_err = 0.0;
        for (int m = 0; m <= nt; ++m) {
            for (int k = 0; k <= nt; ++k) {
                // the joint truncation cuts m + k <= nt, where the product has
                // support below the tail tolerance anyway
                const cxd expect = (m + k <= nt) ? cs.amp[m] * ce.amp[k] : cxd{0.0, 0.0};
                max_err = std::max(max_err, std::abs(s.at(m, k) - expect));
            }
        }
        CHECK(max_err < 1e-6);

        const SchmidtDecomposition sd = schmidt(s);
        CHECK(sd.coefficients[0] >= 1.0 - 1e-8);
    }
    SUBCASE("unitarity, conservation, linearity on random states") {
        const AmplitudePair amps = AmplitudePair::from_beta_sq(0.35);
        const FockVector psi1 = random_state(12, 3);
        const FockVector psi2 = random_state(12, 4);

        const TwoModeState s1 = evolve_system(psi1, amps);
        CHECK(std::abs(s1.norm_sq() - 1.0) < 1e-10);

        const double n_in = psi1.mean_occupation();
        const double n_out = s1.mean_occupation_system() + s1.mean_occupation_environment();
        CHECK(n_out == doctest::Approx(n_in).epsilon(1e-10));

        // linearity through a normalized superposition
        const cxd a{0.6, 0.1}, b{0.3, -0.7};
        FockVector mix;
        mix.amp.resize(psi1.amp.size());
        for (std::size_t i = 0; i < mix.amp.size(); ++i) {
            mix.amp[i] = a * psi1.amp[i] + b * psi2.amp[i];
        }
        const double mix_norm = std::sqrt(mix.norm_sq());
        mix.normalize();
        const TwoModeState sm = evolve_system(mix, amps);
        const TwoModeState s2 = evolve_system(psi2, amps);
        double max_err = 0.0;
        for (std::size_t i = 0; i < sm.amp.size(); ++i) {
            const cxd expect = (a * s1.amp[i] + b * s2.amp[i]) / mix_norm;
            max_err = std::max(max_err, std::abs(sm.amp[i] - expect));
        }
        CHECK(max_err < 1e-10);
    }
}

TEST_CASE("coherent factorization across the lambda grid") {
    for (const cxd lambda : {cxd{1.0, 0.0}, cxd{2.0, 0.0}, cxd{3.0, 0.0}, cxd{0.0, 2.0},
                             cxd{1.0, 2.0}}) {
        const int nt = auto_truncation(lambda);
        const FockVector psi = coherent_state(lambda, nt);
        for (int i = 0; i < 20; ++i) {
            const AmplitudePair amps = AmplitudePair::from_beta_sq(i / 19.0);
            const SchmidtDecomposition sd = schmidt(evolve_system(psi, amps));
            CHECK(sd.coefficients[0] >= 1.0 - 1e-8);
        }
    }
}

TEST_CASE("factorization check values") {
    SUBCASE("coherent input stays pure") {
        const FockVector psi = coherent_state(2.0, auto_truncation(2.0));
        CHECK(factorization_check(psi, AmplitudePair::from_beta_sq(0.7)) >= 1.0 - 1e-8);
    }
    SUBCASE("single excitation gives a Bell pair at the balanced point") {
        CHECK(factorization_check(fock_state(1, 1), AmplitudePair::from_beta_sq(0.5)) ==
              doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("kitten purity matches the exact overlap algebra") {
        // rho = (P+ + P- + d(X + X+))/N gives
        // purity = (1 + g^2 + 4G + d^2 (1 + g^2)) / (2 (1 + G)^2)
        // with g = e^{-2|la|^2}, d = e^{-2|lb|^2}, G = g d = e^{-2|l|^2}.
        const double lam = 2.0;
        const double beta2 = 0.5;
        const double g = std::exp(-2.0 * lam * lam * (1.0 - beta2));
        const double d = std::exp(-2.0 * lam * lam * beta2);
        const double G = g * d;
        const double expect =
            (1.0 + g * g + 4.0 * G + d * d * (1.0 + g * g)) / (2.0 * (1.0 + G) * (1.0 + G));

        const FockVector kit = kitten_state(lam, auto_truncation(lam));
        const double p = factorization_check(kit, AmplitudePair::from_beta_sq(beta2));
        CHECK(p == doctest::Approx(expect).epsilon(1e-9));
    }
    SUBCASE("well separated kitten branches mix to purity 1/2") {
        const FockVector kit = kitten_state(3.0, auto_truncation(3.0));
        const double p = factorization_check(kit, AmplitudePair::from_beta_sq(0.5));
        CHECK(p == doctest::Approx(0.5).epsilon(1e-6));
    }
}
