#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cohsim/fock.hpp"
#include "cohsim/rng.hpp"

using namespace cohsim;

namespace {

// Independent oracle for the Poisson tail: plain long-double summation from
// above the cut until terms stop mattering.
long double tail_by_summation(double mu, int n) {
    long double term = std::exp(static_cast<long double>(-mu));
    for (int k = 1; k <= n; ++k) term *= mu / k;
    // term = p_n; sum p_{n+1}, p_{n+2}, ...
    long double tail = 0.0L;
    for (int k = n + 1; k < n + 4000; ++k) {
        term *= mu / k;
        tail += term;
        if (term < tail * 1e-25L && k > static_cast<int>(mu) + 4) break;
    }
    return tail;
}

TwoModeState random_two_mode(int ns, int ne, std::uint64_t seed) {
    RandomStream rng(seed, 0);
    TwoModeState s;
    s.n_trunc_s = ns;
    s.n_trunc_e = ne;
    s.amp.resize(static_cast<std::size_t>(ns + 1) * (ne + 1));
    for (auto& z : s.amp) {
        z = {2.0 * rng.next_uniform() - 1.0, 2.0 * rng.next_uniform() - 1.0};
    }
    const double n2 = s.norm_sq();
    for (auto& z : s.amp) z /= std::sqrt(n2);
    return s;
}

// brute-force reduced state by explicit index loops
DensityMatrix brute_force_trace_system(const TwoModeState& s) {
    DensityMatrix rho = DensityMatrix::zero(s.rows());
    for (int m = 0; m < s.rows(); ++m) {
        for (int mp = 0; mp < s.rows(); ++mp) {
            cxd acc{0.0, 0.0};
            for (int e = 0; e < s.cols(); ++e) acc += s.at(m, e) * std::conj(s.at(mp, e));
            rho.at(m, mp) = acc;
        }
    }
    return rho;
}

}  // namespace

TEST_CASE("coherent state amplitudes and moments") {
    SUBCASE("vacuum at lambda = 0") {
        const FockVector v = coherent_state(0.0, 10);
        CHECK(v.amp[0].real() == doctest::Approx(1.0).epsilon(1e-14));
        for (int n = 1; n <= 10; ++n) CHECK(std::abs(v.amp[n]) == 0.0);
    }
    SUBCASE("lambda = 1 amplitudes") {
        const FockVector v = coherent_state(1.0, 20);
        CHECK(v.amp[0].real() == doctest::Approx(0.6065306597126334).epsilon(1e-12));
        CHECK(v.amp[1].real() == doctest::Approx(0.6065306597126334).epsilon(1e-12));
        CHECK(v.amp[2].real() == doctest::Approx(0.42888194248035344).epsilon(1e-12));
    }
    SUBCASE("ratio recurrence holds after renormalization") {
        const cxd lambda{1.3, -0.4};
        const FockVector v = coherent_state(lambda, auto_truncation(lambda));
        for (int n = 0; n + 1 <= v.n_trunc(); ++n) {
            if (std::abs(v.amp[n]) < 1e-200) continue;
            const cxd ratio = v.amp[n + 1] / v.amp[n];
            CHECK(std::abs(ratio - lambda / std::sqrt(n + 1.0)) < 1e-14);
        }
    }
    SUBCASE("mean occupation equals |lambda|^2") {
        const FockVector v = coherent_state(cxd{0.0, 2.0}, 30);
        CHECK(v.mean_occupation() == doctest::Approx(4.0).epsilon(1e-10));
    }
    SUBCASE("norm within 1e-10 across a lambda grid") {
        for (double r : {0.3, 1.0, 2.2, 3.0}) {
            for (double phase : {0.0, 1.1, 2.5}) {
                const cxd lambda = r * std::exp(cxd{0.0, phase});
                const FockVector v = coherent_state(lambda, auto_truncation(lambda));
                CHECK(std::abs(v.norm_sq() - 1.0) < 1e-10);
            }
        }
    }
    SUBCASE("rejects inadequate truncation unless overridden") {
        CHECK_THROWS_AS((void)coherent_state(3.0, 5), std::invalid_argument);
        CHECK_NOTHROW((void)coherent_state(3.0, 5, /*allow_truncation_loss=*/true));
    }
}

TEST_CASE("kitten state structure") {
    SUBCASE("lambda = 0 is vacuum") {
        const FockVector v = kitten_state(0.0, 6);
        CHECK(std::abs(v.amp[0] - cxd{1.0, 0.0}) < 1e-14);
    }
    SUBCASE("odd amplitudes vanish exactly and c0/c2 = sqrt(2)/lambda^2") {
        const FockVector v = kitten_state(2.0, auto_truncation(2.0));
        for (int n = 1; n <= v.n_trunc(); n += 2) CHECK(std::abs(v.amp[n]) == 0.0);
        const cxd ratio = v.amp[0] / v.amp[2];
        CHECK(ratio.real() == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
        CHECK(std::abs(ratio.imag()) < 1e-14);
    }
    SUBCASE("overlap with the bare coherent state approaches 1/2") {
        const int nt = auto_truncation(3.0);
        const FockVector kit = kitten_state(3.0, nt);
        const FockVector coh = coherent_state(3.0, nt);
        const double overlap2 = std::norm(inner_product(kit, coh));
        CHECK(std::abs(overlap2 - 0.5) < 3.0 * std::exp(-2.0 * 9.0) + 1e-12);
    }
}

TEST_CASE("annihilation operator") {
    SUBCASE("vacuum maps to zero") {
        CHECK(annihilate(fock_state(0, 4)).norm_sq() == 0.0);
    }
    SUBCASE("|3> maps to sqrt(3)|2>") {
        const FockVector out = annihilate(fock_state(3, 5));
        CHECK(std::abs(out.amp[2] - cxd{std::sqrt(3.0), 0.0}) < 1e-14);
        CHECK(out.norm_sq() == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("coherent states are eigenstates") {
        const cxd lambda{1.1, 0.7};
        const FockVector c = coherent_state(lambda, auto_truncation(lambda));
        FockVector lowered = annihilate(c);
        // eigenvalue check: a|l> = l |l> up to the truncated tail
        FockVector expect = c;
        for (auto& z : expect.amp) z *= lambda;
        double diff = 0.0;
        for (int n = 0; n < c.dim(); ++n) diff += std::norm(lowered.amp[n] - expect.amp[n]);
        CHECK(diff < 1e-10);

        lowered.normalize();
        const double fid = std::norm(inner_product(lowered, c));
        CHECK(fid >= 1.0 - 1e-10);
    }
}

TEST_CASE("auto truncation against direct tail summation") {
    CHECK(auto_truncation(0.0) == 0);
    for (double lam : {2.0, 3.0}) {
        const int n = auto_truncation(lam);
        CHECK(tail_by_summation(lam * lam, n) < 1e-12);
        CHECK(tail_by_summation(lam * lam, n - 1) >= 1e-12);
    }
    CHECK(poisson_tail(4.0, 2) ==
          doctest::Approx(static_cast<double>(tail_by_summation(4.0, 2))).epsilon(1e-10));
}

TEST_CASE("partial trace") {
    SUBCASE("product state stays pure") {
        TwoModeState s;
        s.n_trunc_s = s.n_trunc_e = 1;
        s.amp = {cxd{0, 0}, cxd{0, 0}, cxd{0, 0}, cxd{0, 0}};
        s.at(1, 0) = 1.0;  // |1> (x) |0>
        const DensityMatrix rho = partial_trace(s, Axis::system);
        CHECK(rho.at(1, 1).real() == doctest::Approx(1.0));
        CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("Bell-like state gives a maximally mixed block") {
        TwoModeState s;
        s.n_trunc_s = s.n_trunc_e = 1;
        s.amp.assign(4, cxd{0, 0});
        s.at(1, 0) = 1.0 / std::sqrt(2.0);
        s.at(0, 1) = 1.0 / std::sqrt(2.0);
        const DensityMatrix rho = partial_trace(s, Axis::system);
        CHECK(rho.at(0, 0).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rho.at(1, 1).real() == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(rho.at(0, 1)) < 1e-14);
        CHECK(purity(rho) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("agrees with explicit loops and keeps the spectrum across axes") {
        const TwoModeState s = random_two_mode(5, 7, 11);
        const DensityMatrix rs = partial_trace(s, Axis::system);
        const DensityMatrix brute = brute_force_trace_system(s);
        for (std::size_t i = 0; i < rs.entries.size(); ++i) {
            CHECK(std::abs(rs.entries[i] - brute.entries[i]) < 1e-12);
        }

        const DensityMatrix re = partial_trace(s, Axis::environment);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
            Eigen::Map<const RowMatrixXcd>(rs.entries.data(), rs.dimension, rs.dimension),
            Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ee(
            Eigen::Map<const RowMatrixXcd>(re.entries.data(), re.dimension, re.dimension),
            Eigen::EigenvaluesOnly);
        // nonzero eigenvalues agree (Schmidt spectrum symmetry)
        auto evs = es.eigenvalues();
        auto eve = ee.eigenvalues();
        std::vector<double> a(evs.data(), evs.data() + evs.size());
        std::vector<double> b(eve.data(), eve.data() + eve.size());
        std::sort(a.rbegin(), a.rend());
        std::sort(b.rbegin(), b.rend());
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            if (a[i] < 1e-10 && b[i] < 1e-10) continue;
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-8));
        }
    }
}

TEST_CASE("schmidt decomposition") {
    SUBCASE("product state has a single unit coefficient") {
        TwoModeState s;
        s.n_trunc_s = 2;
        s.n_trunc_e = 1;
        s.amp.assign(6, cxd{0, 0});
        s.at(2, 1) = 1.0;
        const SchmidtDecomposition sd = schmidt(s);
        CHECK(sd.coefficients[0] == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t i = 1; i < sd.coefficients.size(); ++i) {
            CHECK(sd.coefficients[i] < 1e-12);
        }
    }
    SUBCASE("Bell-like state splits evenly") {
        TwoModeState s;
        s.n_trunc_s = s.n_trunc_e = 1;
        s.amp.assign(4, cxd{0, 0});
        s.at(1, 0) = 1.0 / std::sqrt(2.0);
        s.at(0, 1) = 1.0 / std::sqrt(2.0);
        const SchmidtDecomposition sd = schmidt(s);
        CHECK(sd.coefficients[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
        CHECK(sd.coefficients[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    }
    SUBCASE("reconstruction, ordering, orthonormality, entropy consistency") {
        const TwoModeState s = random_two_mode(6, 4, 5);
        const SchmidtDecomposition sd = schmidt(s);

        double sum_sq = 0.0;
        for (std::size_t i = 0; i + 1 < sd.coefficients.size(); ++i) {
            CHECK(sd.coefficients[i] >= sd.coefficients[i + 1]);
        }
        for (double c : sd.coefficients) sum_sq += c * c;
        CHECK(sum_sq == doctest::Approx(1.0).epsilon(1e-8));

        // orthonormal families
        Eigen::MatrixXcd gl = sd.left_vectors.adjoint() * sd.left_vectors;
        Eigen::MatrixXcd gr = sd.right_vectors.adjoint() * sd.right_vectors;
        CHECK((gl - Eigen::MatrixXcd::Identity(gl.rows(), gl.cols())).cwiseAbs().maxCoeff() <
              1e-8);
        CHECK((gr - Eigen::MatrixXcd::Identity(gr.rows(), gr.cols())).cwiseAbs().maxCoeff() <
              1e-8);

        // rebuild the amplitude matrix
        double max_err = 0.0;
        for (int m = 0; m < s.rows(); ++m) {
            for (int e = 0; e < s.cols(); ++e) {
                cxd acc{0.0, 0.0};
                for (std::size_t i = 0; i < sd.coefficients.size(); ++i) {
                    acc += sd.coefficients[i] * sd.left_vectors(m, i) * sd.right_vectors(e, i);
                }
                max_err = std::max(max_err, std::abs(acc - s.at(m, e)));
            }
        }
        CHECK(max_err < 1e-8);

        // entropy from Schmidt weights equals entropy from the traced state
        std::vector<double> probs;
        for (double c : sd.coefficients) probs.push_back(c * c);
        const double s_schmidt = entropy_bits(probs.data(), probs.size());
        const double s_rho = von_neumann_entropy(partial_trace(s, Axis::system));
        CHECK(s_schmidt == doctest::Approx(s_rho).epsilon(1e-8));
    }
}

TEST_CASE("entropy and purity") {
    SUBCASE("pure state has zero entropy") {
        const DensityMatrix rho = pure_density(coherent_state(1.5, auto_truncation(1.5)));
        CHECK(von_neumann_entropy(rho) == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(purity(rho) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("diag(1/2, 1/2) carries one bit") {
        DensityMatrix rho = DensityMatrix::zero(2);
        rho.at(0, 0) = rho.at(1, 1) = 0.5;
        CHECK(von_neumann_entropy(rho) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(purity(rho) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("diag(1/4, 1/2, 1/4) carries 1.5 bits") {
        DensityMatrix rho = DensityMatrix::zero(3);
        rho.at(0, 0) = 0.25;
        rho.at(1, 1) = 0.5;
        rho.at(2, 2) = 0.25;
        CHECK(von_neumann_entropy(rho) == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("slightly negative eigenvalues clip, grossly negative ones throw") {
        std::vector<double> ok{0.5, 0.5, -5e-9};
        CHECK(entropy_bits(ok.data(), ok.size()) == doctest::Approx(1.0));
        std::vector<double> bad{0.5, 0.5, -1e-6};
        CHECK_THROWS_AS((void)entropy_bits(bad.data(), bad.size()), invariant_error);
    }
}

TEST_CASE("density matrix validation catches breaches") {
    DensityMatrix rho = DensityMatrix::zero(2);
    rho.at(0, 0) = 0.7;
    rho.at(1, 1) = 0.3;
    CHECK_NOTHROW(rho.validate());

    DensityMatrix bad_trace = rho;
    bad_trace.at(0, 0) = 0.8;
    CHECK_THROWS_AS(bad_trace.validate(), invariant_error);

    DensityMatrix bad_herm = rho;
    bad_herm.at(0, 1) = cxd{0.0, 1e-3};
    CHECK_THROWS_AS(bad_herm.validate(), invariant_error);

    DensityMatrix bad_psd = DensityMatrix::zero(2);
    bad_psd.at(0, 0) = 1.5;
    bad_psd.at(1, 1) = -0.5;
    CHECK_THROWS_AS(bad_psd.validate(), invariant_error);
}

TEST_CASE("trace distance and mean quantities") {
    DensityMatrix a = DensityMatrix::zero(2);
    a.at(0, 0) = 1.0;
    DensityMatrix b = DensityMatrix::zero(2);
    b.at(1, 1) = 1.0;
    CHECK(trace_distance(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(trace_distance(a, a) == doctest::Approx(0.0));
    CHECK(mean_occupation(b) == doctest::Approx(1.0));

    const cxd lambda{0.9, 0.4};
    const DensityMatrix rho = pure_density(coherent_state(lambda, auto_truncation(lambda)));
    const cxd a_mean = mean_annihilation(rho);
    CHECK(std::abs(a_mean - lambda) < 1e-9);
}
