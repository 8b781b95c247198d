// cohsim: batch driver for the coherent-state decoherence laboratory.
// Subcommands: kitten, pointer, lindblad, twobody; plus --selftest.
// Exit codes: 0 success, 2 invalid flags, 3 invariant breach, 4 self-test
// failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cohsim/kernels.hpp"
#include "cohsim/kitten.hpp"
#include "cohsim/lindblad.hpp"
#include "cohsim/manifest.hpp"
#include "cohsim/scenario_io.hpp"

namespace {

using namespace cohsim;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

int resolve_truncation(const std::string& trunc, cxd lambda) {
    if (trunc == "auto") return auto_truncation(lambda);
    std::size_t used = 0;
    const int n = std::stoi(trunc, &used);
    if (used != trunc.size() || n < 0) {
        throw CLI::ValidationError("--trunc", "expected 'auto' or a non-negative integer");
    }
    return n;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

void finish_outputs(RunManifest& manifest, CsvWriter& csv, const std::string& out_path,
                    const Timer& timer) {
    csv.close();
    manifest.wall_time_s = timer.seconds();
    manifest.outputs = {out_path};
    manifest.write_atomic(out_path + ".manifest.json");
}

void emit_header(CsvWriter& csv, const RunManifest& manifest,
                 const std::string& columns_units) {
    csv.comment("cohsim " + manifest.subcommand + " v" + std::string(kVersion));
    csv.comment("manifest_digest: " + manifest.digest());
    std::string params = "params:";
    for (const auto& [k, v] : manifest.params) params += " " + k + "=" + v;
    csv.comment(params);
    csv.comment("units: " + columns_units);
}

// ---------------------------------------------------------------------- kitten

struct KittenArgs {
    std::string lambda = "2";
    std::string model = "markov";
    double kappa = 1.0;
    double gamma = 1.0;
    double omega = 0.0;
    double tmax = 5.0;
    double dt = 0.01;
    std::string trunc = "auto";
    std::string out = "kitten.csv";
};

int run_kitten(const KittenArgs& args) {
    Timer timer;
    const cxd lambda = parse_complex(args.lambda);
    const int n_trunc = resolve_truncation(args.trunc, lambda);

    ExchangeModel model = args.model == "rabi"
                              ? ExchangeModel{RabiModel{args.omega, args.kappa}}
                              : ExchangeModel{MarkovModel{args.gamma, args.omega}};

    const int n_rows = static_cast<int>(std::lround(args.tmax / args.dt));
    std::vector<double> times(n_rows);
    for (int k = 0; k < n_rows; ++k) times[k] = k * args.dt;

    RunManifest manifest;
    manifest.subcommand = "kitten";
    manifest.kernel_backend = std::string(kernels::backend());
    manifest.params = {{"lambda", format_complex(lambda)},
                       {"model", args.model},
                       {"omega", format_double(args.omega)},
                       {"tmax", format_double(args.tmax)},
                       {"dt", format_double(args.dt)},
                       {"trunc", std::to_string(n_trunc)}};
    if (args.model == "rabi") {
        manifest.params["kappa"] = format_double(args.kappa);
    } else {
        manifest.params["gamma"] = format_double(args.gamma);
    }

    const auto reports = kitten_timeline(lambda, model, times, n_trunc);

    CsvWriter csv(args.out);
    emit_header(csv, manifest,
                "t [1/rate]; coherences, purity, record_overlap [1]; entropy [bits]");
    csv.columns({"t", "coherence_closed_form", "coherence_numeric", "purity",
                 "entropy_bits", "record_overlap"});
    for (const auto& r : reports) {
        csv.row({format_double(r.t), format_double(r.coherence_closed_form),
                 format_double(r.coherence_numeric), format_double(r.purity),
                 format_double(r.entropy_bits), format_double(r.record_overlap)});
    }
    finish_outputs(manifest, csv, args.out, timer);
    return 0;
}

// --------------------------------------------------------------------- pointer

struct PointerArgs {
    std::string lambdas = "1,2,3,2i,1+2i";
    int beta2_points = 11;
    std::string inputs = "coherent,fock,kitten";
    int fock_n = 1;
    std::string trunc = "auto";
    std::string out = "pointer.csv";
};

int run_pointer(const PointerArgs& args) {
    Timer timer;
    if (args.beta2_points < 2) {
        throw CLI::ValidationError("--beta2-points", "need at least 2 grid points");
    }

    RunManifest manifest;
    manifest.subcommand = "pointer";
    manifest.kernel_backend = std::string(kernels::backend());
    manifest.params = {{"lambdas", args.lambdas},
                       {"beta2_points", std::to_string(args.beta2_points)},
                       {"inputs", args.inputs},
                       {"fock_n", std::to_string(args.fock_n)},
                       {"trunc", args.trunc}};

    CsvWriter csv(args.out);
    emit_header(csv, manifest, "beta2, purity, schmidt_leading [1]; entropy [bits]");
    csv.columns({"state", "beta2", "purity", "schmidt_leading", "entropy_bits"});

    auto sweep = [&](const std::string& label, const FockVector& psi) {
        for (int i = 0; i < args.beta2_points; ++i) {
            const double beta2 = static_cast<double>(i) / (args.beta2_points - 1);
            const AmplitudePair amps = AmplitudePair::from_beta_sq(beta2);
            const TwoModeState joint = evolve_system(psi, amps);
            const DensityMatrix rho = partial_trace(joint, Axis::system);
            const SchmidtDecomposition sd = schmidt(joint);
            csv.row({label, format_double(beta2), format_double(purity(rho)),
                     format_double(sd.coefficients.front()),
                     format_double(von_neumann_entropy(rho))});
        }
    };

    for (const std::string& kind : split_list(args.inputs)) {
        if (kind == "coherent" || kind == "kitten") {
            for (const std::string& ls : split_list(args.lambdas)) {
                const cxd lambda = parse_complex(ls);
                const int n_trunc = resolve_truncation(args.trunc, lambda);
                const FockVector psi = kind == "coherent"
                                           ? coherent_state(lambda, n_trunc)
                                           : kitten_state(lambda, n_trunc);
                sweep(kind + "(" + format_complex(lambda) + ")", psi);
            }
        } else if (kind == "fock") {
            const int n_trunc = std::max(args.fock_n, 1);
            sweep("fock(" + std::to_string(args.fock_n) + ")",
                  fock_state(args.fock_n, n_trunc));
        } else {
            throw CLI::ValidationError("--inputs", "unknown input kind " + kind);
        }
    }
    finish_outputs(manifest, csv, args.out, timer);
    return 0;
}

// -------------------------------------------------------------------- lindblad

struct LindbladArgs {
    std::string init = "coherent";
    std::string lambda = "2";
    int fock_n = 1;
    double gamma = 1.0;
    double omega = 0.0;
    double tmax = 3.0;
    double dt = 0.002;
    double sample_dt = 0.1;
    int ntraj = 10000;
    std::uint64_t seed = 12345;
    int threads = 0;
    std::string trunc = "auto";
    std::string out = "lindblad.csv";
};

// Exact diagonal solution for an initial number state under pure loss:
// rho_kk(t) = C(n0, k) s^k (1-s)^(n0-k), s = e^{-Gamma t}.
std::vector<double> fock_loss_diagonal(int n0, double survival, int dim) {
    std::vector<double> p(dim, 0.0);
    for (int k = 0; k <= n0 && k < dim; ++k) {
        const double logc = std::lgamma(n0 + 1.0) - std::lgamma(k + 1.0) -
                            std::lgamma(n0 - k + 1.0);
        p[k] = std::exp(logc + k * std::log(survival) +
                        (n0 - k) * std::log1p(-survival));
    }
    return p;
}

int run_lindblad(const LindbladArgs& args) {
    Timer timer;
    if (args.init != "coherent" && args.init != "fock") {
        throw CLI::ValidationError("--init", "expected coherent or fock");
    }
    const bool coherent_init = args.init == "coherent";
    const cxd lambda = parse_complex(args.lambda);
    const int n_trunc = coherent_init ? resolve_truncation(args.trunc, lambda)
                                      : std::max(args.fock_n, 1);

    const double ratio = args.sample_dt / args.dt;
    if (std::abs(ratio - std::lround(ratio)) > 1e-9) {
        throw CLI::ValidationError("--sample-dt", "must be a multiple of --dt");
    }

    const FockVector psi0 = coherent_init ? coherent_state(lambda, n_trunc)
                                          : fock_state(args.fock_n, n_trunc);
    const double n0 = psi0.mean_occupation();

    std::vector<double> times;
    for (double t = 0.0; t <= args.tmax + 1e-9; t += args.sample_dt) times.push_back(t);

    RunManifest manifest;
    manifest.subcommand = "lindblad";
    manifest.seed = args.seed;
    manifest.kernel_backend = std::string(kernels::backend());
    manifest.params = {{"init", args.init},
                       {"lambda", format_complex(lambda)},
                       {"fock_n", std::to_string(args.fock_n)},
                       {"gamma", format_double(args.gamma)},
                       {"omega", format_double(args.omega)},
                       {"tmax", format_double(args.tmax)},
                       {"dt", format_double(args.dt)},
                       {"sample_dt", format_double(args.sample_dt)},
                       {"ntraj", std::to_string(args.ntraj)},
                       {"trunc", std::to_string(n_trunc)}};
    manifest.threads = args.threads;

    const MasterSolution master =
        integrate_master(pure_density(psi0), args.omega, args.gamma, times);

    TrajectoryConfig config;
    config.gamma = args.gamma;
    config.omega = args.omega;
    config.dt = args.dt;
    config.n_traj = args.ntraj;
    config.master_seed = args.seed;
    config.n_threads = args.threads;
    const MasterSolution mc = run_trajectories(psi0, config, times);

    CsvWriter csv(args.out);
    emit_header(csv, manifest,
                "t [1/Gamma]; occupations [quanta]; distance, fidelity [1]");
    csv.columns({"t", "mean_n_analytic", "mean_n_master", "mean_n_mc",
                 "trace_distance_master_mc", "fidelity_master_analytic"});
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        const double survival = std::exp(-args.gamma * t);
        const double mean_analytic = n0 * survival;
        double fid;
        if (coherent_init) {
            fid = fidelity_to_pure(
                master.states[i],
                damped_coherent_analytic(lambda, args.gamma, args.omega, t, n_trunc));
        } else {
            // commuting diagonal states: F = (sum_k sqrt(p_k q_k))^2
            const auto p = fock_loss_diagonal(args.fock_n, survival, n_trunc + 1);
            double acc = 0.0;
            for (int k = 0; k <= n_trunc; ++k) {
                acc += std::sqrt(std::max(p[k], 0.0) *
                                 std::max(master.states[i].at(k, k).real(), 0.0));
            }
            fid = acc * acc;
        }
        csv.row({format_double(t), format_double(mean_analytic),
                 format_double(mean_occupation(master.states[i])),
                 format_double(mean_occupation(mc.states[i])),
                 format_double(trace_distance(master.states[i], mc.states[i])),
                 format_double(fid)});
    }
    finish_outputs(manifest, csv, args.out, timer);
    return 0;
}

// --------------------------------------------------------------------- twobody

struct TwobodyArgs {
    std::string scenario;
    int refine = 0;
    bool cross_check = false;
    std::string out = "twobody.csv";
};

int run_twobody(const TwobodyArgs& args) {
    Timer timer;
    std::ifstream in(args.scenario);
    if (!in) throw CLI::ValidationError("--scenario", "cannot open " + args.scenario);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string scenario_text = buf.str();

    ScatteringScenario scenario = parse_scenario(scenario_text);
    for (int i = 0; i < args.refine; ++i) scenario = scenario.refined();

    RunManifest manifest;
    manifest.subcommand = "twobody";
    manifest.kernel_backend = std::string(kernels::backend());
    manifest.params = {{"scenario", args.scenario},
                       {"scenario_digest", fnv1a64_hex(scenario_text)},
                       {"refine", std::to_string(args.refine)},
                       {"name", scenario.name},
                       {"n_a", std::to_string(scenario.grid_a.n)},
                       {"dt", format_double(scenario.dt)},
                       {"t_max", format_double(scenario.t_max)}};

    const ScenarioResult result = run_scenario(scenario);

    if (args.cross_check) {
        // re-derive the final entropy through the reduced density matrix
        GridWavefunction2D state = initial_state(scenario);
        const int n_steps = static_cast<int>(std::lround(scenario.t_max / scenario.dt));
        state = split_step_evolve(state, scenario, n_steps);
        const double via_rho = entanglement_entropy_via_rho(state);
        if (std::abs(via_rho - result.final_entropy_bits) > 1e-6) {
            throw invariant_error("entropy cross-check mismatch: svd " +
                                  std::to_string(result.final_entropy_bits) +
                                  " vs rho " + std::to_string(via_rho));
        }
    }

    CsvWriter csv(args.out);
    emit_header(csv, manifest,
                "t [time]; entropy [bits]; norm [1]; energy [hbar^2/(m L^2)]; "
                "positions [length]");
    csv.columns({"t", "entropy_bits", "norm", "energy", "x_a_mean", "x_b_mean"});
    for (const auto& r : result.rows) {
        csv.row({format_double(r.t), format_double(r.entropy_bits),
                 format_double(r.norm), format_double(r.energy),
                 format_double(r.x_a_mean), format_double(r.x_b_mean)});
    }
    finish_outputs(manifest, csv, args.out, timer);
    return 0;
}

// -------------------------------------------------------------------- selftest

int run_selftest() {
    int failures = 0;
    auto report = [&](const char* name, bool ok, double value) {
        std::printf("%-58s %s (%.3g)\n", name, ok ? "PASS" : "FAIL", value);
        if (!ok) ++failures;
    };

    // closed form vs numeric partial trace across the standard grid
    double worst = 0.0;
    for (double lam : {1.0, 2.0, 3.0}) {
        const int n_trunc = auto_truncation(lam);
        for (int i = 0; i <= 10; ++i) {
            const AmplitudePair amps = AmplitudePair::from_beta_sq(0.1 * i);
            const DensityMatrix a = kitten_reduced_closed_form(lam, amps, n_trunc);
            const DensityMatrix b = kitten_reduced_numeric(lam, amps, n_trunc);
            for (std::size_t k = 0; k < a.entries.size(); ++k) {
                worst = std::max(worst, std::abs(a.entries[k] - b.entries[k]));
            }
        }
    }
    report("kitten closed form vs numeric partial trace", worst <= 1e-6, worst);

    // oracle triangle at reduced trajectory count
    const cxd lambda{2.0, 0.0};
    const int n_trunc = auto_truncation(lambda);
    const FockVector psi0 = coherent_state(lambda, n_trunc);
    std::vector<double> times;
    for (double t = 0.0; t <= 3.0 + 1e-9; t += 0.5) times.push_back(t);

    const MasterSolution master = integrate_master(pure_density(psi0), 0.0, 1.0, times);
    double worst_fid = 1.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        worst_fid = std::min(worst_fid,
                             fidelity_to_pure(master.states[i],
                                              damped_coherent_analytic(
                                                  lambda, 1.0, 0.0, times[i], n_trunc)));
    }
    report("master integrator vs analytic damped state", worst_fid >= 1.0 - 1e-6,
           1.0 - worst_fid);

    double worst_res = 0.0;
    for (double t : {0.0, 0.7, 1.9, 3.0}) {
        worst_res = std::max(worst_res, damped_coherent_residual(lambda, 1.0, 0.0, t));
    }
    report("damped coherent state master-equation residual", worst_res <= 1e-8,
           worst_res);

    TrajectoryConfig config;
    config.gamma = 1.0;
    config.dt = 0.002;
    config.n_traj = 4000;
    config.master_seed = 777;
    const MasterSolution mc = run_trajectories(psi0, config, times);
    double worst_dist = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        worst_dist = std::max(worst_dist, trace_distance(master.states[i], mc.states[i]));
    }
    report("trajectory ensemble vs master integrator", worst_dist <= 0.05, worst_dist);

    return failures == 0 ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coherent-state pointer laboratory"};
    app.require_subcommand(0, 1);
    bool selftest = false;
    app.add_flag("--selftest", selftest, "run the cross-validation suites and exit");

    KittenArgs kitten_args;
    auto* cmd_kitten = app.add_subcommand("kitten", "kitten decoherence timeline");
    cmd_kitten->add_option("--lambda", kitten_args.lambda, "coherent amplitude (re+imi)");
    cmd_kitten->add_option("--model", kitten_args.model, "rabi | markov")
        ->check(CLI::IsMember({"rabi", "markov"}));
    cmd_kitten->add_option("--kappa", kitten_args.kappa, "Rabi coupling");
    cmd_kitten->add_option("--gamma", kitten_args.gamma, "Markov loss rate");
    cmd_kitten->add_option("--omega", kitten_args.omega, "mode frequency");
    cmd_kitten->add_option("--tmax", kitten_args.tmax, "time horizon");
    cmd_kitten->add_option("--dt", kitten_args.dt, "output grid step");
    cmd_kitten->add_option("--trunc", kitten_args.trunc, "auto | N");
    cmd_kitten->add_option("--out", kitten_args.out, "output CSV path");

    PointerArgs pointer_args;
    auto* cmd_pointer = app.add_subcommand("pointer", "pointer-state purity sweep");
    cmd_pointer->add_option("--lambdas", pointer_args.lambdas, "comma list of lambdas");
    cmd_pointer->add_option("--beta2-points", pointer_args.beta2_points,
                            "grid points for |beta|^2 in [0,1]");
    cmd_pointer->add_option("--inputs", pointer_args.inputs,
                            "comma list of coherent,fock,kitten");
    cmd_pointer->add_option("--fock-n", pointer_args.fock_n, "Fock input occupation");
    cmd_pointer->add_option("--trunc", pointer_args.trunc, "auto | N");
    cmd_pointer->add_option("--out", pointer_args.out, "output CSV path");

    LindbladArgs lindblad_args;
    auto* cmd_lindblad = app.add_subcommand("lindblad", "damped-mode oracle triangle");
    cmd_lindblad->add_option("--init", lindblad_args.init, "coherent | fock")
        ->check(CLI::IsMember({"coherent", "fock"}));
    cmd_lindblad->add_option("--lambda", lindblad_args.lambda, "coherent amplitude");
    cmd_lindblad->add_option("--fock-n", lindblad_args.fock_n, "Fock initial occupation");
    cmd_lindblad->add_option("--gamma", lindblad_args.gamma, "loss rate");
    cmd_lindblad->add_option("--omega", lindblad_args.omega, "mode frequency");
    cmd_lindblad->add_option("--tmax", lindblad_args.tmax, "time horizon");
    cmd_lindblad->add_option("--dt", lindblad_args.dt, "integrator/trajectory step");
    cmd_lindblad->add_option("--sample-dt", lindblad_args.sample_dt, "output grid step");
    cmd_lindblad->add_option("--ntraj", lindblad_args.ntraj, "trajectory count")
        ->check(CLI::PositiveNumber);
    cmd_lindblad->add_option("--seed", lindblad_args.seed, "master seed");
    cmd_lindblad->add_option("--threads", lindblad_args.threads,
                             "worker threads (0 = hardware)");
    cmd_lindblad->add_option("--trunc", lindblad_args.trunc, "auto | N");
    cmd_lindblad->add_option("--out", lindblad_args.out, "output CSV path");

    TwobodyArgs twobody_args;
    auto* cmd_twobody = app.add_subcommand("twobody", "two-particle scattering run");
    cmd_twobody->add_option("--scenario", twobody_args.scenario, "scenario file")
        ->required();
    cmd_twobody->add_option("--refine", twobody_args.refine,
                            "halve dx and dt this many times");
    cmd_twobody->add_flag("--cross-check", twobody_args.cross_check,
                          "verify the entropy through the reduced density matrix");
    cmd_twobody->add_option("--out", twobody_args.out, "output CSV path");

    try {
        app.parse(argc, argv);
        if (selftest) return run_selftest();
        if (cmd_kitten->parsed()) return run_kitten(kitten_args);
        if (cmd_pointer->parsed()) return run_pointer(pointer_args);
        if (cmd_lindblad->parsed()) return run_lindblad(lindblad_args);
        if (cmd_twobody->parsed()) return run_twobody(twobody_args);
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const invariant_error& e) {
        std::cerr << "invariant breach: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid arguments: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
