#include "cohsim/lindblad.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "cohsim/kernels.hpp"
#include "cohsim/rng.hpp"

namespace cohsim {

void TrajectoryConfig::validate(int n_trunc) const {
    if (n_traj < 1) throw std::invalid_argument("TrajectoryConfig: n_traj < 1");
    if (!(dt > 0.0)) throw std::invalid_argument("TrajectoryConfig: dt <= 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("TrajectoryConfig: gamma < 0");
    if (dt * gamma * n_trunc >= 0.1) {
        throw invariant_error("TrajectoryConfig: dt * gamma * n_trunc = " +
                              std::to_string(dt * gamma * n_trunc) +
                              " >= 0.1; shrink dt");
    }
}

namespace {

// Pointwise coefficient tables for the master-equation right side:
//   out(n,m) = c1(n,m) rho(n,m) + c2(n,m) rho(n+1,m+1)
// with c1 = -i w (n-m) - Gamma (n+m)/2 and c2 = Gamma sqrt((n+1)(m+1)).
struct RhsTables {
    int dim = 0;
    double omega = 0.0, gamma = 0.0;
    std::vector<cxd> c1;
    std::vector<double> c2;

    void build(int d, double w, double g) {
        if (dim == d && omega == w && gamma == g) return;
        dim = d;
        omega = w;
        gamma = g;
        c1.resize(static_cast<std::size_t>(d) * d);
        c2.resize(static_cast<std::size_t>(d) * d);
        for (int n = 0; n < d; ++n) {
            for (int m = 0; m < d; ++m) {
                c1[static_cast<std::size_t>(n) * d + m] =
                    cxd{-0.5 * g * (n + m), -w * (n - m)};
                c2[static_cast<std::size_t>(n) * d + m] =
                    g * std::sqrt((n + 1.0) * (m + 1.0));
            }
        }
    }
};

void rhs_apply(const RhsTables& tab, const cxd* rho, cxd* out) {
    const int d = tab.dim;
    for (int n = 0; n < d; ++n) {
        const std::size_t row = static_cast<std::size_t>(n) * d;
        kernels::mul(out + row, tab.c1.data() + row, rho + row, d);
        if (n + 1 < d) {
            // shifted-diagonal inflow from rho(n+1, m+1)
            kernels::axpy_real(out + row, 1.0, tab.c2.data() + row,
                               rho + (row + d) + 1, d - 1);
        }
    }
}

double trace_of(const cxd* m, int d) {
    double tr = 0.0;
    for (int i = 0; i < d; ++i) tr += m[static_cast<std::size_t>(i) * d + i].real();
    return tr;
}

void hermitize(DensityMatrix& rho) {
    const int d = rho.dimension;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            const cxd v = 0.5 * (rho.at(i, j) + std::conj(rho.at(j, i)));
            rho.at(i, j) = v;
            rho.at(j, i) = std::conj(v);
        }
    }
}

}  // namespace

void lindblad_rhs(const DensityMatrix& rho, double omega, double gamma,
                  DensityMatrix& out) {
    static thread_local RhsTables tables;
    tables.build(rho.dimension, omega, gamma);
    out.dimension = rho.dimension;
    out.entries.resize(rho.entries.size());
    rhs_apply(tables, rho.entries.data(), out.entries.data());
}

MasterSolution integrate_master(const DensityMatrix& rho0, double h_omega,
                                double gamma, const std::vector<double>& times,
                                double dt) {
    rho0.validate("integrate_master initial state");
    if (times.empty()) throw std::invalid_argument("integrate_master: empty grid");
    const int d = rho0.dimension;
    if (dt <= 0.0) dt = 0.01 / std::max(gamma * d, 1.0);

    RhsTables tables;
    tables.build(d, h_omega, gamma);

    const std::size_t sz = rho0.entries.size();
    std::vector<cxd> y(rho0.entries), k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);

    auto rk4_step = [&](double h) {
        rhs_apply(tables, y.data(), k1.data());
        tmp = y;
        kernels::axpy(tmp.data(), 0.5 * h, k1.data(), sz);
        rhs_apply(tables, tmp.data(), k2.data());
        tmp = y;
        kernels::axpy(tmp.data(), 0.5 * h, k2.data(), sz);
        rhs_apply(tables, tmp.data(), k3.data());
        tmp = y;
        kernels::axpy(tmp.data(), h, k3.data(), sz);
        rhs_apply(tables, tmp.data(), k4.data());
        kernels::axpy(y.data(), h / 6.0, k1.data(), sz);
        kernels::axpy(y.data(), h / 3.0, k2.data(), sz);
        kernels::axpy(y.data(), h / 3.0, k3.data(), sz);
        kernels::axpy(y.data(), h / 6.0, k4.data(), sz);
    };

    MasterSolution sol;
    sol.times = times;
    sol.states.reserve(times.size());

    double t = 0.0;
    for (double target : times) {
        if (target < t - 1e-12) {
            throw std::invalid_argument("integrate_master: non-monotone grid");
        }
        while (target - t > 1e-12) {
            const int steps_left = std::max(
                1, static_cast<int>(std::ceil((target - t) / dt - 1e-12)));
            const double h = (target - t) / steps_left;
            const double tr_before = trace_of(y.data(), d);
            rk4_step(h);
            if (std::abs(trace_of(y.data(), d) - tr_before) > 1e-10) {
                throw invariant_error("integrate_master: step rejected, trace "
                                      "drift above 1e-10; shrink dt");
            }
            t += h;
        }
        DensityMatrix rho;
        rho.dimension = d;
        rho.entries = y;
        hermitize(rho);
        rho.validate("integrate_master state at t = " + std::to_string(target));
        sol.states.push_back(std::move(rho));
    }
    return sol;
}

FockVector damped_coherent_analytic(cxd lambda, double gamma, double omega,
                                    double t, int n_trunc) {
    if (n_trunc < 0) n_trunc = auto_truncation(lambda);
    const cxd mu = lambda * std::exp(cxd{-0.5 * gamma * t, -omega * t});
    return coherent_state(mu, n_trunc, /*allow_truncation_loss=*/true);
}

double damped_coherent_residual(cxd lambda, double gamma, double omega,
                                double t, int n_trunc) {
    // The truncation boundary leaks into the whole top row of the right side
    // at magnitude ~ gamma |mu|^2 sqrt(tail); a 1e-18 tail keeps the residual
    // comfortably below the 1e-8 contract.
    if (n_trunc < 0) n_trunc = auto_truncation(lambda, 1e-18);
    const FockVector psi = damped_coherent_analytic(lambda, gamma, omega, t, n_trunc);
    const double mu2 = std::norm(lambda) * std::exp(-gamma * t);

    // cdot_n = c_n (Gamma mu2 / 2 + n (-i w - Gamma/2)) for the exact
    // (untruncated) amplitudes; the renormalized truncated ones satisfy it to
    // within the tail mass.
    std::vector<cxd> cdot(psi.amp.size());
    for (std::size_t n = 0; n < psi.amp.size(); ++n) {
        cdot[n] = psi.amp[n] * (cxd{0.5 * gamma * mu2, 0.0} +
                                static_cast<double>(n) * cxd{-0.5 * gamma, -omega});
    }

    const int d = psi.dim();
    DensityMatrix rho = pure_density(psi);
    DensityMatrix rhs;
    lindblad_rhs(rho, omega, gamma, rhs);

    double residual = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            const cxd ddt = cdot[i] * std::conj(psi.amp[j]) + psi.amp[i] * std::conj(cdot[j]);
            residual = std::max(residual, std::abs(ddt - rhs.at(i, j)));
        }
    }
    return residual;
}

MasterSolution run_trajectories(const FockVector& psi0,
                                const TrajectoryConfig& config,
                                const std::vector<double>& times) {
    const int d = psi0.dim();
    config.validate(psi0.n_trunc());
    if (std::abs(psi0.norm_sq() - 1.0) > kNormTol) {
        throw invariant_error("run_trajectories: initial state not normalized");
    }

    // Map every requested time onto the fixed step grid.
    std::vector<long> sample_steps;
    long max_step = 0;
    for (double t : times) {
        const double steps = t / config.dt;
        const long k = std::lround(steps);
        if (std::abs(steps - k) > 1e-6) {
            throw std::invalid_argument("run_trajectories: time " + std::to_string(t) +
                                        " is not a multiple of dt");
        }
        if (!sample_steps.empty() && k < sample_steps.back()) {
            throw std::invalid_argument("run_trajectories: times must be non-decreasing");
        }
        sample_steps.push_back(k);
        max_step = std::max(max_step, k);
    }

    // Componentwise no-jump factor sqrt(1 - Gamma n dt) (1 - i w n dt): the
    // number operator is diagonal, so the drift is a pointwise multiply.
    std::vector<cxd> drift(d);
    std::vector<double> nvec(d);
    for (int n = 0; n < d; ++n) {
        nvec[n] = n;
        drift[n] = std::sqrt(1.0 - config.gamma * n * config.dt) *
                   cxd{1.0, -config.omega * n * config.dt};
    }

    // Fixed-size chunks keep the reduction order independent of the worker
    // count: chunk partials are accumulated in trajectory order inside the
    // chunk and folded in chunk order at the end.
    constexpr int kChunk = 256;
    const int n_chunks = (config.n_traj + kChunk - 1) / kChunk;
    const std::size_t mat = static_cast<std::size_t>(d) * d;
    std::vector<std::vector<cxd>> partials(
        n_chunks, std::vector<cxd>(mat * times.size(), cxd{0.0, 0.0}));

    std::atomic<int> next_chunk{0};
    auto worker = [&] {
        std::vector<cxd> psi(d), stepped(d);
        for (int c = next_chunk.fetch_add(1); c < n_chunks; c = next_chunk.fetch_add(1)) {
            auto& acc = partials[c];
            const int lo = c * kChunk;
            const int hi = std::min(config.n_traj, lo + kChunk);
            for (int traj = lo; traj < hi; ++traj) {
                RandomStream rng(config.master_seed, static_cast<std::uint64_t>(traj));
                psi = psi0.amp;
                std::size_t next_sample = 0;
                for (long step = 0; step <= max_step; ++step) {
                    while (next_sample < sample_steps.size() &&
                           sample_steps[next_sample] == step) {
                        // accumulate conj(psi_i) psi_j; one global conjugation
                        // at fold time turns this into |psi><psi|
                        cxd* out = acc.data() + next_sample * mat;
                        for (int i = 0; i < d; ++i) {
                            kernels::axpy(out + static_cast<std::size_t>(i) * d,
                                          std::conj(psi[i]), psi.data(), d);
                        }
                        ++next_sample;
                    }
                    if (step == max_step) break;

                    const double nbar = kernels::weighted_norm_sq(nvec.data(),
                                                                  psi.data(), d);
                    const double p_jump = config.gamma * nbar * config.dt;
                    if (rng.next_uniform() < p_jump) {
                        // lower and renormalize; the lowered norm is exactly nbar
                        for (int n = 0; n + 1 < d; ++n) {
                            stepped[n] = std::sqrt(n + 1.0) * psi[n + 1];
                        }
                        stepped[d - 1] = cxd{0.0, 0.0};
                        psi.swap(stepped);
                        kernels::scale(psi.data(), 1.0 / std::sqrt(nbar), d);
                    } else {
                        kernels::mul(psi.data(), drift.data(), psi.data(), d);
                        const double n2 = kernels::norm_sq(psi.data(), d);
                        kernels::scale(psi.data(), 1.0 / std::sqrt(n2), d);
                    }
                    const double check = kernels::norm_sq(psi.data(), d);
                    if (std::abs(check - 1.0) > 1e-12) {
                        throw invariant_error("trajectory norm drift " +
                                              std::to_string(check - 1.0));
                    }
                }
            }
        }
    };

    int n_threads = config.n_threads > 0
                        ? config.n_threads
                        : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min(n_threads, n_chunks));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(n_threads);
        pool.reserve(n_threads);
        for (int i = 0; i < n_threads; ++i) {
            pool.emplace_back([&, i] {
                try {
                    worker();
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& err : errors) {
            if (err) std::rethrow_exception(err);
        }
    }

    MasterSolution sol;
    sol.times = times;
    for (std::size_t s = 0; s < times.size(); ++s) {
        DensityMatrix rho = DensityMatrix::zero(d);
        for (int c = 0; c < n_chunks; ++c) {
            kernels::axpy(rho.entries.data(), cxd{1.0, 0.0},
                          partials[c].data() + s * mat, mat);
        }
        // The outer-product accumulation builds the transpose (see
        // pure_density); conjugate once, then average.
        for (auto& z : rho.entries) z = std::conj(z);
        kernels::scale(rho.entries.data(), 1.0 / config.n_traj, mat);
        hermitize(rho);
        const double tr = rho.trace_real();
        if (std::abs(tr - 1.0) > 1e-12) {
            throw invariant_error("trajectory ensemble trace off by " +
                                  std::to_string(tr - 1.0));
        }
        kernels::scale(rho.entries.data(), 1.0 / tr, mat);
        rho.validate("trajectory ensemble at t = " + std::to_string(times[s]));
        sol.states.push_back(std::move(rho));
    }
    return sol;
}

std::vector<double> mean_occupation(const MasterSolution& solution) {
    std::vector<double> out;
    out.reserve(solution.states.size());
    for (const auto& rho : solution.states) out.push_back(mean_occupation(rho));
    return out;
}

}  // namespace cohsim
