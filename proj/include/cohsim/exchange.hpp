#pragma once

#include "cohsim/fock.hpp"

// The one-quantum-at-a-time exchange map: a system excitation survives with
// amplitude alpha or moves to the environment with amplitude beta, extended
// to all occupation numbers by bosonic symmetry.

namespace cohsim {

// Normalized amplitude pair with |alpha|^2 + |beta|^2 = 1 (within 1e-10).
struct AmplitudePair {
    cxd alpha{1.0, 0.0};
    cxd beta{0.0, 0.0};

    AmplitudePair() = default;
    AmplitudePair(cxd alpha, cxd beta);

    // Real representative with |beta|^2 = beta_sq.
    static AmplitudePair from_beta_sq(double beta_sq);
};

// |n, 0> evolved under the exchange map: amplitude on |m, n-m> is
// sqrt(binom(n, m)) alpha^m beta^(n-m). Output truncated at n on both axes.
TwoModeState evolve_fock(int n, const AmplitudePair& amps);

// Linear extension of evolve_fock over the Fock expansion of psi; the
// environment starts in vacuum. Output truncated at psi.n_trunc() on both
// axes.
TwoModeState evolve_system(const FockVector& psi, const AmplitudePair& amps);

// Purity of the reduced system state after evolve_system; equals 1 up to
// truncation for coherent inputs.
double factorization_check(const FockVector& psi, const AmplitudePair& amps);

}  // namespace cohsim
