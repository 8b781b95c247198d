#include "cohsim/exchange.hpp"

#include <cmath>

namespace cohsim {

AmplitudePair::AmplitudePair(cxd alpha, cxd beta) : alpha(alpha), beta(beta) {
    const double s = std::norm(alpha) + std::norm(beta);
    if (std::abs(s - 1.0) > 1e-10) {
        throw std::invalid_argument("AmplitudePair: |alpha|^2 + |beta|^2 = " +
                                    std::to_string(s));
    }
}

AmplitudePair AmplitudePair::from_beta_sq(double beta_sq) {
    if (beta_sq < 0.0 || beta_sq > 1.0) {
        throw std::invalid_argument("from_beta_sq: |beta|^2 outside [0, 1]");
    }
    return {std::sqrt(1.0 - beta_sq), std::sqrt(beta_sq)};
}

namespace {

// sqrt(binom(n, m)) via log-gamma; stable up to n of a few hundred.
double sqrt_binomial(int n, int m) {
    return std::exp(0.5 * (std::lgamma(n + 1.0) - std::lgamma(m + 1.0) -
                           std::lgamma(n - m + 1.0)));
}

// Writes the evolved |n, 0> amplitudes, scaled by weight, into out along the
// anti-diagonal m + k = n.
void add_evolved_row(TwoModeState& out, int n, const AmplitudePair& amps, cxd weight) {
    // alpha^m and beta^(n-m) by iterated products; exact zeros propagate.
    std::vector<cxd> apow(static_cast<std::size_t>(n) + 1);
    std::vector<cxd> bpow(static_cast<std::size_t>(n) + 1);
    apow[0] = bpow[0] = cxd{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        apow[i + 1] = apow[i] * amps.alpha;
        bpow[i + 1] = bpow[i] * amps.beta;
    }
    for (int m = 0; m <= n; ++m) {
        out.at(m, n - m) += weight * sqrt_binomial(n, m) * apow[m] * bpow[n - m];
    }
}

}  // namespace

TwoModeState evolve_fock(int n, const AmplitudePair& amps) {
    if (n < 0) throw std::invalid_argument("evolve_fock: n < 0");
    TwoModeState out;
    out.n_trunc_s = out.n_trunc_e = n;
    out.amp.assign(static_cast<std::size_t>(n + 1) * (n + 1), cxd{0.0, 0.0});
    add_evolved_row(out, n, amps, cxd{1.0, 0.0});
    const double n2 = out.norm_sq();
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw invariant_error("evolve_fock: norm off by " + std::to_string(n2 - 1.0));
    }
    return out;
}

TwoModeState evolve_system(const FockVector& psi, const AmplitudePair& amps) {
    const double in_norm = psi.norm_sq();
    if (std::abs(in_norm - 1.0) > kNormTol) {
        throw invariant_error("evolve_system: input norm off by " +
                              std::to_string(in_norm - 1.0));
    }
    const int nt = psi.n_trunc();
    TwoModeState out;
    out.n_trunc_s = out.n_trunc_e = nt;
    out.amp.assign(static_cast<std::size_t>(nt + 1) * (nt + 1), cxd{0.0, 0.0});
    for (int n = 0; n <= nt; ++n) {
        if (psi.amp[n] != cxd{0.0, 0.0}) add_evolved_row(out, n, amps, psi.amp[n]);
    }
    const double n2 = out.norm_sq();
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw invariant_error("evolve_system: norm off by " + std::to_string(n2 - 1.0));
    }
    return out;
}

double factorization_check(const FockVector& psi, const AmplitudePair& amps) {
    return purity(partial_trace(evolve_system(psi, amps), Axis::system));
}

}  // namespace cohsim
