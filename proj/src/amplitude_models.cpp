#include "cohsim/amplitude_models.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace cohsim {

RabiModel::RabiModel(double omega, double kappa) : omega(omega), kappa(kappa) {
    if (!(kappa > 0.0)) throw std::invalid_argument("RabiModel: kappa must be > 0");
}

MarkovModel::MarkovModel(double gamma, double omega) : gamma(gamma), omega(omega) {
    if (!(gamma > 0.0)) throw std::invalid_argument("MarkovModel: gamma must be > 0");
}

AmplitudePair rabi_amplitudes(const RabiModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("rabi_amplitudes: t < 0");
    const cxd carrier = std::exp(cxd{0.0, -model.omega * t});
    return {carrier * std::cos(model.kappa * t), carrier * std::sin(model.kappa * t)};
}

AmplitudePair markov_amplitudes(const MarkovModel& model, double t) {
    if (t < 0.0) throw std::invalid_argument("markov_amplitudes: t < 0");
    const cxd carrier = std::exp(cxd{0.0, -model.omega * t});
    const double survival = std::exp(-model.gamma * t);
    return {carrier * std::sqrt(survival), carrier * std::sqrt(1.0 - survival)};
}

AmplitudePair model_amplitudes(const ExchangeModel& model, double t) {
    return std::visit(
        [t](const auto& m) {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, RabiModel>) return rabi_amplitudes(m, t);
            else return markov_amplitudes(m, t);
        },
        model);
}

RabiEigencheck rabi_eigencheck(const RabiModel& model) {
    const double w = model.omega;
    const double k = model.kappa;

    // One-excitation block of H = w(n_S + n_E) + i k (a_E^+ a_S - a_E a_S^+)
    // in the basis (|1,0>, |0,1>).
    Eigen::Matrix2cd H;
    H << cxd{w, 0.0}, cxd{0.0, -k}, cxd{0.0, k}, cxd{w, 0.0};

    RabiEigencheck out;

    const cxd inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int sign : {+1, -1}) {
        Eigen::Vector2cd u;
        u << inv_sqrt2, cxd{0.0, sign * 1.0} * inv_sqrt2;
        const double energy = w + sign * k;
        out.eigenpair_err =
            std::max(out.eigenpair_err, (H * u - energy * u).cwiseAbs().maxCoeff());
    }

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(H);
    out.eigenvalue_err = std::max(std::abs(es.eigenvalues()(0) - (w - k)),
                                  std::abs(es.eigenvalues()(1) - (w + k)));

    // exp(-iHt)|1,0> via the eigendecomposition, against the closed form.
    for (double kt : {0.1, 0.7, 2.0}) {
        const double t = kt / k;
        Eigen::Vector2cd psi0;
        psi0 << cxd{1.0, 0.0}, cxd{0.0, 0.0};
        Eigen::Vector2cd coeffs = es.eigenvectors().adjoint() * psi0;
        Eigen::Vector2cd psi_t =
            es.eigenvectors() *
            (coeffs.array() *
             (cxd{0.0, -t} * es.eigenvalues().array().cast<cxd>()).exp())
                .matrix();
        const AmplitudePair amps = rabi_amplitudes(model, t);
        out.propagation_err = std::max(
            out.propagation_err, std::max(std::abs(psi_t(0) - amps.alpha),
                                          std::abs(psi_t(1) - amps.beta)));
    }

    out.pass = out.eigenpair_err <= 1e-10 && out.eigenvalue_err <= 1e-10 &&
               out.propagation_err <= 1e-10;
    return out;
}

}  // namespace cohsim
