#pragma once

#include <vector>

#include "cohsim/amplitude_models.hpp"

// Decoherence of the even coherent-state superposition: closed-form reduced
// state, brute-force partial-trace cross-check, interference damping factor
// and environment record-state overlap.

namespace cohsim {

struct KittenReport {
    double t = 0.0;
    double coherence_closed_form = 1.0;  // e^{-2 |lambda beta|^2}
    double coherence_numeric = 1.0;      // extracted from the traced state
    double purity = 1.0;
    double entropy_bits = 0.0;
    double record_overlap = 1.0;         // |<lambda beta | -lambda beta>|

    // Throws invariant_error if coherences leave [0, 1 + 1e-8] or the
    // record overlap leaves [0, 1].
    void validate() const;
};

// Reduced system state assembled from the four closed-form terms: two
// coherent projectors of amplitude +-lambda*alpha and two cross terms damped
// by e^{-2 |lambda beta|^2}, renormalized by the computed trace (the
// renormalization only absorbs the truncation loss; the four terms sum to
// unit trace exactly).
DensityMatrix kitten_reduced_closed_form(cxd lambda, const AmplitudePair& amps,
                                         int n_trunc);

// Same state via evolve_system(kitten_state(lambda), amps) and a partial
// trace; the brute-force oracle for the closed form.
DensityMatrix kitten_reduced_numeric(cxd lambda, const AmplitudePair& amps,
                                     int n_trunc);

// Damping factor recovered from the cross-term component of rho in the
// (non-orthogonal) operator family {|m><m|, |-m><-m|, |m><-m|, |-m><m|},
// m = lambda*alpha, assuming the closed-form weights on the direct terms.
double coherence_metric(const DensityMatrix& rho, cxd lambda,
                        const AmplitudePair& amps);

// |<lambda beta | -lambda beta>| = e^{-2 |lambda beta|^2}.
double record_state_overlap(cxd lambda, const AmplitudePair& amps);

// The environment state pair counts as a record once the overlap drops to
// e^{-10} (|lambda beta|^2 >= 5).
bool record_flag(double overlap);

// Weight outside the two leading Schmidt terms of the evolved joint state;
// exactly zero in infinite dimension, reported so the rank-2 record form is
// measured rather than assumed.
double kitten_schmidt_rank2_deficit(cxd lambda, const AmplitudePair& amps,
                                    int n_trunc);

// One report per time point. Closed-form and numeric coherence must agree
// to 1e-6 at every point (invariant_error otherwise).
std::vector<KittenReport> kitten_timeline(cxd lambda, const ExchangeModel& model,
                                          const std::vector<double>& times,
                                          int n_trunc = -1);

}  // namespace cohsim
