#include "cohsim/twobody.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cohsim/kernels.hpp"

namespace cohsim {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanPair {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    PlanPair() = default;
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;

    void make_2d(cxd* buf, int n0, int n1) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        auto* f = reinterpret_cast<fftw_complex*>(buf);
        fwd = fftw_plan_dft_2d(n0, n1, f, f, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_2d(n0, n1, f, f, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    void make_1d(cxd* buf, int n0) {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        auto* f = reinterpret_cast<fftw_complex*>(buf);
        fwd = fftw_plan_dft_1d(n0, f, f, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(n0, f, f, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~PlanPair() {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
};

double wrap_displacement(double d, double length) {
    return d - length * std::round(d / length);
}

}  // namespace

double Potential::operator()(double d) const {
    switch (kind) {
        case Kind::none:
            return 0.0;
        case Kind::gauss:
            return v0 * std::exp(-0.5 * d * d / (width * width));
        case Kind::soft_coulomb:
            return v0 / std::sqrt(d * d + soften * soften);
    }
    return 0.0;
}

void ScatteringScenario::validate() const {
    if (grid_a.n < 8 || grid_b.n < 8) {
        throw std::invalid_argument("scenario: grids must have at least 8 points");
    }
    if ((grid_a.n & (grid_a.n - 1)) != 0 || (grid_b.n & (grid_b.n - 1)) != 0) {
        throw std::invalid_argument("scenario: grid sizes must be powers of two");
    }
    if (!(grid_a.length > 0.0) || !(grid_b.length > 0.0)) {
        throw std::invalid_argument("scenario: box lengths must be positive");
    }
    if (std::abs(grid_a.length - grid_b.length) > 1e-12) {
        throw std::invalid_argument(
            "scenario: V(x_a - x_b) on a periodic box needs equal box lengths");
    }
    if (!(m_a > 0.0) || !(m_b > 0.0)) {
        throw std::invalid_argument("scenario: masses must be positive");
    }
    if (!(packet_a.width > 0.0) || !(packet_b.width > 0.0)) {
        throw std::invalid_argument("scenario: packet widths must be positive");
    }
    if (!(dt > 0.0) || !(t_max > 0.0)) {
        throw std::invalid_argument("scenario: dt and t_max must be positive");
    }
    if (sample_stride < 1) {
        throw std::invalid_argument("scenario: sample_stride must be >= 1");
    }
}

ScatteringScenario ScatteringScenario::refined() const {
    ScatteringScenario r = *this;
    r.grid_a.n *= 2;
    r.grid_b.n *= 2;
    r.dt *= 0.5;
    r.sample_stride *= 2;
    return r;
}

double GridWavefunction2D::norm() const {
    return kernels::norm_sq(psi.data(), psi.size()) * grid_a.dx() * grid_b.dx();
}

GridWavefunction2D initial_state(const ScatteringScenario& scenario) {
    scenario.validate();
    GridWavefunction2D s;
    s.grid_a = scenario.grid_a;
    s.grid_b = scenario.grid_b;
    s.m_a = scenario.m_a;
    s.m_b = scenario.m_b;

    auto packet = [](const Grid1D& g, const PacketSpec& p) {
        std::vector<cxd> v(g.n);
        for (int i = 0; i < g.n; ++i) {
            const double x = g.x(i);
            const double u = x - p.center;
            v[i] = std::exp(cxd{-u * u / (4.0 * p.width * p.width), p.momentum * x});
        }
        const double n2 = kernels::norm_sq(v.data(), v.size()) * g.dx();
        kernels::scale(v.data(), 1.0 / std::sqrt(n2), v.size());
        return v;
    };

    const std::vector<cxd> wa = packet(s.grid_a, scenario.packet_a);
    const std::vector<cxd> wb = packet(s.grid_b, scenario.packet_b);
    s.psi.resize(static_cast<std::size_t>(s.grid_a.n) * s.grid_b.n);
    for (int i = 0; i < s.grid_a.n; ++i) {
        cxd* row = s.psi.data() + static_cast<std::size_t>(i) * s.grid_b.n;
        for (int j = 0; j < s.grid_b.n; ++j) row[j] = wa[i] * wb[j];
    }
    return s;
}

namespace {

// Per-cell marginal probabilities (sum to the state norm).
std::vector<double> marginal_a(const GridWavefunction2D& s) {
    std::vector<double> m(s.grid_a.n);
    const double w = s.grid_a.dx() * s.grid_b.dx();
    for (int i = 0; i < s.grid_a.n; ++i) {
        m[i] = w * kernels::norm_sq(
                       s.psi.data() + static_cast<std::size_t>(i) * s.grid_b.n,
                       s.grid_b.n);
    }
    return m;
}

std::vector<double> marginal_b(const GridWavefunction2D& s) {
    std::vector<double> m(s.grid_b.n, 0.0);
    const double w = s.grid_a.dx() * s.grid_b.dx();
    for (int i = 0; i < s.grid_a.n; ++i) {
        const cxd* row = s.psi.data() + static_cast<std::size_t>(i) * s.grid_b.n;
        for (int j = 0; j < s.grid_b.n; ++j) m[j] += w * std::norm(row[j]);
    }
    return m;
}

double mean_position(const Grid1D& g, const std::vector<double>& marg) {
    double acc = 0.0, tot = 0.0;
    for (int i = 0; i < g.n; ++i) {
        acc += g.x(i) * marg[i];
        tot += marg[i];
    }
    return acc / tot;
}

void check_edges(const Grid1D& g, const std::vector<double>& marg, const char* axis) {
    constexpr int kGuard = 5;
    constexpr double kTol = 1e-8;
    for (int i = 0; i < kGuard; ++i) {
        const double lo = marg[i] / g.dx();
        const double hi = marg[g.n - 1 - i] / g.dx();
        if (lo > kTol || hi > kTol) {
            throw invariant_error(std::string("edge monitor: ") + axis +
                                  " marginal density " +
                                  std::to_string(std::max(lo, hi)) +
                                  " within 5 cells of the box edge");
        }
    }
}

class Propagator2D {
  public:
    Propagator2D(GridWavefunction2D state, const ScatteringScenario& scenario)
        : s_(std::move(state)) {
        const int na = s_.grid_a.n, nb = s_.grid_b.n;
        const std::size_t total = static_cast<std::size_t>(na) * nb;
        kin_half_.resize(total);
        kin_full_.resize(total);
        pot_phase_.resize(total);
        const double inv_n = 1.0 / static_cast<double>(total);
        for (int i = 0; i < na; ++i) {
            const double ta = s_.grid_a.k(i) * s_.grid_a.k(i) / (2.0 * s_.m_a);
            for (int j = 0; j < nb; ++j) {
                const double tb = s_.grid_b.k(j) * s_.grid_b.k(j) / (2.0 * s_.m_b);
                const double phase = -(ta + tb) * scenario.dt;
                const std::size_t idx = static_cast<std::size_t>(i) * nb + j;
                // backward-transform normalization folded into the phases
                kin_half_[idx] = std::exp(cxd{0.0, 0.5 * phase}) * inv_n;
                kin_full_[idx] = std::exp(cxd{0.0, phase}) * inv_n;
            }
        }
        for (int i = 0; i < na; ++i) {
            for (int j = 0; j < nb; ++j) {
                const double d = wrap_displacement(s_.grid_a.x(i) - s_.grid_b.x(j),
                                                   s_.grid_a.length);
                pot_phase_[static_cast<std::size_t>(i) * nb + j] =
                    std::exp(cxd{0.0, -scenario.potential(d) * scenario.dt});
            }
        }
        plans_.make_2d(s_.psi.data(), na, nb);
    }

    // K_half (V K_full)^(n-1) V K_half
    void advance(int n_steps) {
        if (n_steps <= 0) return;
        apply_kinetic(kin_half_);
        for (int step = 0; step < n_steps; ++step) {
            kernels::mul(s_.psi.data(), pot_phase_.data(), s_.psi.data(), s_.psi.size());
            apply_kinetic(step + 1 == n_steps ? kin_half_ : kin_full_);
        }
    }

    const GridWavefunction2D& state() const { return s_; }

  private:
    void apply_kinetic(const std::vector<cxd>& phase) {
        fftw_execute(plans_.fwd);
        kernels::mul(s_.psi.data(), phase.data(), s_.psi.data(), s_.psi.size());
        fftw_execute(plans_.bwd);
    }

    GridWavefunction2D s_;
    std::vector<cxd> kin_half_, kin_full_, pot_phase_;
    PlanPair plans_;
};

}  // namespace

GridWavefunction2D split_step_evolve(const GridWavefunction2D& state,
                                     const ScatteringScenario& scenario,
                                     int n_steps) {
    Propagator2D prop(state, scenario);
    prop.advance(n_steps);
    GridWavefunction2D out = prop.state();
    check_edges(out.grid_a, marginal_a(out), "x_a");
    check_edges(out.grid_b, marginal_b(out), "x_b");
    return out;
}

double total_energy(const GridWavefunction2D& state, const Potential& pot) {
    const int na = state.grid_a.n, nb = state.grid_b.n;
    const std::size_t total = static_cast<std::size_t>(na) * nb;
    std::vector<cxd> hat(state.psi);
    {
        PlanPair plans;
        plans.make_2d(hat.data(), na, nb);
        fftw_execute(plans.fwd);
    }
    const double cell = state.grid_a.dx() * state.grid_b.dx() / total;
    double kinetic = 0.0;
    for (int i = 0; i < na; ++i) {
        const double ta = state.grid_a.k(i) * state.grid_a.k(i) / (2.0 * state.m_a);
        const cxd* row = hat.data() + static_cast<std::size_t>(i) * nb;
        for (int j = 0; j < nb; ++j) {
            const double tb =
                state.grid_b.k(j) * state.grid_b.k(j) / (2.0 * state.m_b);
            kinetic += (ta + tb) * std::norm(row[j]) * cell;
        }
    }
    double pot_energy = 0.0;
    const double w = state.grid_a.dx() * state.grid_b.dx();
    for (int i = 0; i < na; ++i) {
        const cxd* row = state.psi.data() + static_cast<std::size_t>(i) * nb;
        for (int j = 0; j < nb; ++j) {
            const double d = wrap_displacement(state.grid_a.x(i) - state.grid_b.x(j),
                                               state.grid_a.length);
            pot_energy += pot(d) * std::norm(row[j]) * w;
        }
    }
    return kinetic + pot_energy;
}

double entanglement_entropy(const GridWavefunction2D& state) {
    Eigen::Map<const RowMatrixXcd> M(state.psi.data(), state.grid_a.n,
                                     state.grid_b.n);
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(
        M * std::sqrt(state.grid_a.dx() * state.grid_b.dx()));
    Eigen::VectorXd p = svd.singularValues().array().square();
    p /= p.sum();
    return entropy_bits(p.data(), static_cast<std::size_t>(p.size()));
}

double entanglement_entropy_via_rho(const GridWavefunction2D& state) {
    Eigen::Map<const RowMatrixXcd> M(state.psi.data(), state.grid_a.n,
                                     state.grid_b.n);
    Eigen::MatrixXcd rho =
        (M * M.adjoint()) * (state.grid_a.dx() * state.grid_b.dx());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
    Eigen::VectorXd p = es.eigenvalues();
    p /= p.sum();
    return entropy_bits(p.data(), static_cast<std::size_t>(p.size()));
}

ScenarioResult run_scenario(const ScatteringScenario& scenario) {
    scenario.validate();
    const int n_steps = static_cast<int>(std::lround(scenario.t_max / scenario.dt));
    Propagator2D prop(initial_state(scenario), scenario);

    ScenarioResult result;
    double e0 = 0.0;
    int step = 0;
    while (true) {
        const GridWavefunction2D& s = prop.state();
        const std::vector<double> ma = marginal_a(s);
        const std::vector<double> mb = marginal_b(s);
        check_edges(s.grid_a, ma, "x_a");
        check_edges(s.grid_b, mb, "x_b");

        TimelineRow row;
        row.t = step * scenario.dt;
        row.entropy_bits = entanglement_entropy(s);
        row.norm = s.norm();
        row.energy = total_energy(s, scenario.potential);
        row.x_a_mean = mean_position(s.grid_a, ma);
        row.x_b_mean = mean_position(s.grid_b, mb);
        result.rows.push_back(row);

        if (step == 0) e0 = row.energy;
        result.max_entropy_bits = std::max(result.max_entropy_bits, row.entropy_bits);
        result.energy_drift_rel =
            std::max(result.energy_drift_rel,
                     std::abs(row.energy - e0) / std::max(std::abs(e0), 1e-12));

        if (step >= n_steps) break;
        const int chunk = std::min(scenario.sample_stride, n_steps - step);
        prop.advance(chunk);
        step += chunk;
    }
    result.final_entropy_bits = result.rows.back().entropy_bits;
    result.b_center_drift =
        std::abs(result.rows.back().x_b_mean - result.rows.front().x_b_mean);
    return result;
}

ScenarioResult test_particle_run(const ScatteringScenario& scenario) {
    if (scenario.m_b / scenario.m_a < 100.0) {
        throw std::invalid_argument("test_particle_run: mass ratio below 100");
    }
    if (std::abs(scenario.packet_b.momentum) > 1e-12) {
        throw std::invalid_argument("test_particle_run: B must start at rest");
    }
    if (scenario.packet_b.width < 2.0 * scenario.grid_b.dx()) {
        throw std::invalid_argument("test_particle_run: B packet under-resolved");
    }
    return run_scenario(scenario);
}

namespace {

class Propagator1D {
  public:
    Propagator1D(std::vector<cxd> psi, const Grid1D& grid, double mass, double dt)
        : psi_(std::move(psi)), grid_(grid), dt_(dt) {
        kin_half_.resize(grid.n);
        const double inv_n = 1.0 / grid.n;
        for (int i = 0; i < grid.n; ++i) {
            const double t = grid.k(i) * grid.k(i) / (2.0 * mass);
            kin_half_[i] = std::exp(cxd{0.0, -0.5 * t * dt}) * inv_n;
        }
        plans_.make_1d(psi_.data(), grid.n);
    }

    void half_kinetic() {
        fftw_execute(plans_.fwd);
        kernels::mul(psi_.data(), kin_half_.data(), psi_.data(), psi_.size());
        fftw_execute(plans_.bwd);
    }

    // phase from a position-dependent potential over the full step
    void potential_kick(const std::vector<double>& v) {
        for (int i = 0; i < grid_.n; ++i) {
            psi_[i] *= std::exp(cxd{0.0, -v[i] * dt_});
        }
    }

    const std::vector<cxd>& psi() const { return psi_; }
    std::vector<double> density() const {
        std::vector<double> d(grid_.n);
        for (int i = 0; i < grid_.n; ++i) d[i] = std::norm(psi_[i]);
        return d;
    }

  private:
    std::vector<cxd> psi_;
    Grid1D grid_;
    double dt_;
    std::vector<cxd> kin_half_;
    PlanPair plans_;
};

// Circular convolution (V * rho)(x_i) = sum_j V(wrap((i-j) dx)) rho_j dx
// through the frequency domain.
class HartreeConvolver {
  public:
    // mirror = true samples V(-d), the potential as felt by the partner.
    HartreeConvolver(const Grid1D& grid, const Potential& pot, bool mirror)
        : n_(grid.n) {
        buf_.resize(n_);
        plans_.make_1d(buf_.data(), n_);
        const double sign = mirror ? -1.0 : 1.0;
        for (int m = 0; m < n_; ++m) {
            buf_[m] = pot(sign * wrap_displacement(m * grid.dx(), grid.length));
        }
        fftw_execute(plans_.fwd);
        vhat_ = buf_;
        scale_ = grid.dx() / n_;
    }

    std::vector<double> apply(const std::vector<double>& rho) {
        for (int i = 0; i < n_; ++i) buf_[i] = rho[i];
        fftw_execute(plans_.fwd);
        kernels::mul(buf_.data(), vhat_.data(), buf_.data(), buf_.size());
        fftw_execute(plans_.bwd);
        std::vector<double> out(n_);
        for (int i = 0; i < n_; ++i) out[i] = buf_[i].real() * scale_;
        return out;
    }

  private:
    int n_;
    std::vector<cxd> buf_, vhat_;
    double scale_ = 1.0;
    PlanPair plans_;
};

}  // namespace

MeanFieldReport mean_field_comparison(const ScatteringScenario& scenario) {
    scenario.validate();
    if (scenario.grid_a.n != scenario.grid_b.n) {
        throw std::invalid_argument("mean_field_comparison: grids must match");
    }
    const int n_steps = static_cast<int>(std::lround(scenario.t_max / scenario.dt));
    const GridWavefunction2D init = initial_state(scenario);

    Propagator2D full(init, scenario);

    // Marginal single-particle states of the (product) initial state.
    const int n = scenario.grid_a.n;
    std::vector<cxd> pa(n), pb(n);
    {
        // row/column slices of the product state carry the packet up to a
        // constant; renormalize on the 1D grid
        const std::vector<double> ma = marginal_a(init);
        const std::vector<double> mb = marginal_b(init);
        const int ia = static_cast<int>(std::max_element(ma.begin(), ma.end()) -
                                        ma.begin());
        const int ib = static_cast<int>(std::max_element(mb.begin(), mb.end()) -
                                        mb.begin());
        for (int i = 0; i < n; ++i) {
            pa[i] = init.psi[static_cast<std::size_t>(i) * n + ib];
            pb[i] = init.psi[static_cast<std::size_t>(ia) * n + i];
        }
        const double na2 = kernels::norm_sq(pa.data(), n) * scenario.grid_a.dx();
        const double nb2 = kernels::norm_sq(pb.data(), n) * scenario.grid_b.dx();
        kernels::scale(pa.data(), 1.0 / std::sqrt(na2), n);
        kernels::scale(pb.data(), 1.0 / std::sqrt(nb2), n);
    }

    Propagator1D prop_a(std::move(pa), scenario.grid_a, scenario.m_a, scenario.dt);
    Propagator1D prop_b(std::move(pb), scenario.grid_b, scenario.m_b, scenario.dt);
    // A feels V(x_a - x_b) against rho_b; B feels V with the displacement
    // sign flipped against rho_a.
    HartreeConvolver conv_a(scenario.grid_a, scenario.potential, false);
    HartreeConvolver conv_b(scenario.grid_b, scenario.potential, true);

    MeanFieldReport report;
    const double cell = scenario.grid_a.dx() * scenario.grid_b.dx();

    auto fidelity_now = [&](const GridWavefunction2D& s) {
        cxd overlap{0.0, 0.0};
        const std::vector<cxd>& fa = prop_a.psi();
        const std::vector<cxd>& fb = prop_b.psi();
        for (int i = 0; i < n; ++i) {
            const cxd row = kernels::dotc(
                fb.data(), s.psi.data() + static_cast<std::size_t>(i) * n, n);
            overlap += std::conj(fa[i]) * row;
        }
        return std::norm(overlap * cell);
    };

    report.min_fidelity = 1.0;
    for (int step = 0; step <= n_steps; ++step) {
        if (step % scenario.sample_stride == 0 || step == n_steps) {
            report.times.push_back(step * scenario.dt);
            const double f = fidelity_now(full.state());
            report.fidelity.push_back(f);
            report.min_fidelity = std::min(report.min_fidelity, f);
        }
        if (step == n_steps) break;

        full.advance(1);
        prop_a.half_kinetic();
        prop_b.half_kinetic();
        const std::vector<double> rho_a = prop_a.density();
        const std::vector<double> rho_b = prop_b.density();
        prop_a.potential_kick(conv_a.apply(rho_b));
        prop_b.potential_kick(conv_b.apply(rho_a));
        prop_a.half_kinetic();
        prop_b.half_kinetic();
    }
    report.final_fidelity = report.fidelity.back();
    return report;
}

}  // namespace cohsim
