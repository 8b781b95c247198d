#include "cohsim/kitten.hpp"

#include <cmath>

#include "cohsim/kernels.hpp"

namespace cohsim {

void KittenReport::validate() const {
    auto in_unit = [](double v, double hi) { return v >= 0.0 && v <= hi; };
    if (!in_unit(coherence_closed_form, 1.0 + 1e-8) ||
        !in_unit(coherence_numeric, 1.0 + 1e-8)) {
        throw invariant_error("KittenReport: coherence outside [0, 1]");
    }
    if (!in_unit(record_overlap, 1.0)) {
        throw invariant_error("KittenReport: record overlap outside [0, 1]");
    }
}

namespace {

// Unnormalized branch vector v_n = mu^n / sqrt(n!).
std::vector<cxd> branch_vector(cxd mu, int n_trunc) {
    std::vector<cxd> v(static_cast<std::size_t>(n_trunc) + 1);
    v[0] = 1.0;
    for (int n = 0; n < n_trunc; ++n) v[n + 1] = v[n] * mu / std::sqrt(n + 1.0);
    return v;
}

void add_outer(DensityMatrix& rho, cxd weight, const std::vector<cxd>& x,
               const std::vector<cxd>& y) {
    const int d = rho.dimension;
    for (int i = 0; i < d; ++i) {
        kernels::axpy(&rho.entries[static_cast<std::size_t>(i) * d],
                      weight * x[i], y.data(), d);
    }
}

}  // namespace

DensityMatrix kitten_reduced_closed_form(cxd lambda, const AmplitudePair& amps,
                                         int n_trunc) {
    const double mu2 = std::norm(lambda * amps.alpha);
    const double damp = std::exp(-2.0 * std::norm(lambda * amps.beta));
    const double norm_const = 2.0 * (1.0 + std::exp(-2.0 * std::norm(lambda)));

    const std::vector<cxd> vp = branch_vector(lambda * amps.alpha, n_trunc);
    std::vector<cxd> vm_conj = branch_vector(-lambda * amps.alpha, n_trunc);
    std::vector<cxd> vp_conj = vp;
    for (auto& z : vp_conj) z = std::conj(z);
    std::vector<cxd> vm(vm_conj);
    for (auto& z : vm_conj) z = std::conj(z);

    DensityMatrix rho = DensityMatrix::zero(n_trunc + 1);
    const double pref = std::exp(-mu2) / norm_const;
    add_outer(rho, pref, vp, vp_conj);
    add_outer(rho, pref, vm, vm_conj);
    add_outer(rho, pref * damp, vp, vm_conj);
    add_outer(rho, pref * damp, vm, vp_conj);

    const double tr = rho.trace_real();
    // The printed four-term form has unit trace; only the truncated tail and
    // roundoff can move it.
    if (std::abs(tr - 1.0) > std::exp(-2.0 * std::norm(lambda)) + 1e-8) {
        throw invariant_error("kitten closed form: trace off by " +
                              std::to_string(tr - 1.0));
    }
    kernels::scale(rho.entries.data(), 1.0 / tr, rho.entries.size());
    rho.validate("kitten closed form");
    return rho;
}

DensityMatrix kitten_reduced_numeric(cxd lambda, const AmplitudePair& amps,
                                     int n_trunc) {
    return partial_trace(evolve_system(kitten_state(lambda, n_trunc), amps),
                         Axis::system);
}

double coherence_metric(const DensityMatrix& rho, cxd lambda,
                        const AmplitudePair& amps) {
    const cxd mu = lambda * amps.alpha;
    const int n_trunc = rho.dimension - 1;
    const FockVector plus = coherent_state(mu, n_trunc, /*allow=*/true);
    const FockVector minus = coherent_state(-mu, n_trunc, /*allow=*/true);

    // s = <mu| rho |-mu>, g = <mu|-mu> (real). With the closed-form direct
    // weights 1/N this solves to d = (N Re(s) - 2g) / (1 + g^2), which stays
    // well conditioned down to alpha = 0 where the probes coincide.
    const double g = inner_product(plus, minus).real();
    Eigen::Map<const RowMatrixXcd> R(rho.entries.data(), rho.dimension, rho.dimension);
    Eigen::Map<const Eigen::VectorXcd> u(plus.amp.data(), plus.dim());
    Eigen::Map<const Eigen::VectorXcd> w(minus.amp.data(), minus.dim());
    const double s = (u.adjoint() * R * w).value().real();
    const double norm_const = 2.0 * (1.0 + std::exp(-2.0 * std::norm(lambda)));
    return (norm_const * s - 2.0 * g) / (1.0 + g * g);
}

double record_state_overlap(cxd lambda, const AmplitudePair& amps) {
    return std::exp(-2.0 * std::norm(lambda * amps.beta));
}

bool record_flag(double overlap) { return overlap <= std::exp(-10.0) * (1.0 + 1e-9); }

double kitten_schmidt_rank2_deficit(cxd lambda, const AmplitudePair& amps,
                                    int n_trunc) {
    const SchmidtDecomposition sd =
        schmidt(evolve_system(kitten_state(lambda, n_trunc), amps));
    double rank2 = 0.0;
    for (std::size_t i = 0; i < sd.coefficients.size() && i < 2; ++i) {
        rank2 += sd.coefficients[i] * sd.coefficients[i];
    }
    return 1.0 - rank2;
}

std::vector<KittenReport> kitten_timeline(cxd lambda, const ExchangeModel& model,
                                          const std::vector<double>& times,
                                          int n_trunc) {
    if (n_trunc < 0) n_trunc = auto_truncation(lambda);
    std::vector<KittenReport> reports;
    reports.reserve(times.size());
    for (double t : times) {
        const AmplitudePair amps = model_amplitudes(model, t);
        const DensityMatrix rho = kitten_reduced_numeric(lambda, amps, n_trunc);

        KittenReport r;
        r.t = t;
        r.coherence_closed_form = record_state_overlap(lambda, amps);
        double metric = coherence_metric(rho, lambda, amps);
        if (metric < -1e-9) {
            throw invariant_error("kitten_timeline: negative coherence " +
                                  std::to_string(metric));
        }
        r.coherence_numeric = std::max(metric, 0.0);
        r.purity = purity(rho);
        r.entropy_bits = von_neumann_entropy(rho);
        r.record_overlap = record_state_overlap(lambda, amps);
        r.validate();
        if (std::abs(r.coherence_numeric - r.coherence_closed_form) > 1e-6) {
            throw invariant_error("kitten_timeline: closed form and numeric "
                                  "coherence disagree at t = " + std::to_string(t));
        }
        reports.push_back(r);
    }
    return reports;
}

}  // namespace cohsim
