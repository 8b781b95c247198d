#pragma once

#include <cstdint>
#include <vector>

#include "cohsim/fock.hpp"

// Three treatments of the damped mode at zero temperature: the analytic
// damped coherent state, dense fixed-step integration of the master
// equation, and Monte-Carlo trajectory unravelling with jump probability
// Gamma <n> dt. The three are cross-validated against each other.

namespace cohsim {

struct TrajectoryConfig {
    double gamma = 1.0;
    double omega = 0.0;
    double dt = 1e-3;
    int n_traj = 1;
    std::uint64_t master_seed = 0;
    int n_threads = 0;  // 0 = hardware concurrency

    // Requires dt * gamma * (n_trunc) < 0.1 so every per-step jump weight is
    // a valid probability with headroom, and n_traj >= 1.
    void validate(int n_trunc) const;
};

struct MasterSolution {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
};

// d rho/dt = -i[w n, rho] + (Gamma/2)(2 a rho a+ - n rho - rho n), written
// into out (resized as needed).
void lindblad_rhs(const DensityMatrix& rho, double omega, double gamma,
                  DensityMatrix& out);

// Classical fixed-step 4th-order integration saved at the requested times
// (which must be non-decreasing, starting at 0). dt <= 0 selects the step
// from gamma * dim * dt <= 0.01. Per-step trace drift above 1e-10 aborts.
MasterSolution integrate_master(const DensityMatrix& rho0, double h_omega,
                                double gamma, const std::vector<double>& times,
                                double dt = 0.0);

// coherent(lambda * e^{-i w t - Gamma t / 2}); n_trunc < 0 picks the
// truncation for the initial lambda.
FockVector damped_coherent_analytic(cxd lambda, double gamma, double omega,
                                    double t, int n_trunc = -1);

// Max-entry residual between the analytic time derivative of the damped
// coherent projector and the master-equation right side; bounded by the
// truncation tail.
double damped_coherent_residual(cxd lambda, double gamma, double omega,
                                double t, int n_trunc = -1);

// Ensemble average of |psi><psi| over quantum trajectories at the given
// times (each must sit on the step grid). Reduction is performed in fixed
// chunk order, so results are bit-identical for any worker count.
MasterSolution run_trajectories(const FockVector& psi0,
                                const TrajectoryConfig& config,
                                const std::vector<double>& times);

std::vector<double> mean_occupation(const MasterSolution& solution);

}  // namespace cohsim
