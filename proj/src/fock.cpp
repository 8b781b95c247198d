#include "cohsim/fock.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cohsim/kernels.hpp"

namespace cohsim {

namespace {

using Eigen::Map;

Map<const RowMatrixXcd> as_matrix(const TwoModeState& s) {
    return {s.amp.data(), s.rows(), s.cols()};
}

Map<const RowMatrixXcd> as_matrix(const DensityMatrix& r) {
    return {r.entries.data(), r.dimension, r.dimension};
}

DensityMatrix from_eigen(const Eigen::MatrixXcd& m) {
    DensityMatrix rho;
    rho.dimension = static_cast<int>(m.rows());
    rho.entries.resize(static_cast<std::size_t>(rho.dimension) * rho.dimension);
    Map<RowMatrixXcd>(rho.entries.data(), rho.dimension, rho.dimension) = m;
    return rho;
}

}  // namespace

double FockVector::norm_sq() const { return kernels::norm_sq(amp.data(), amp.size()); }

void FockVector::normalize() {
    const double n2 = norm_sq();
    if (n2 <= 0.0) throw invariant_error("cannot normalize a zero state");
    kernels::scale(amp.data(), 1.0 / std::sqrt(n2), amp.size());
}

double FockVector::mean_occupation() const {
    double acc = 0.0;
    for (std::size_t n = 0; n < amp.size(); ++n) acc += static_cast<double>(n) * std::norm(amp[n]);
    return acc;
}

double TwoModeState::norm_sq() const { return kernels::norm_sq(amp.data(), amp.size()); }

double TwoModeState::mean_occupation_system() const {
    double acc = 0.0;
    for (int ns = 0; ns < rows(); ++ns) {
        acc += ns * kernels::norm_sq(&amp[static_cast<std::size_t>(ns) * cols()], cols());
    }
    return acc;
}

double TwoModeState::mean_occupation_environment() const {
    double acc = 0.0;
    for (int ns = 0; ns < rows(); ++ns) {
        for (int ne = 0; ne < cols(); ++ne) acc += ne * std::norm(at(ns, ne));
    }
    return acc;
}

double DensityMatrix::trace_real() const {
    double tr = 0.0;
    for (int i = 0; i < dimension; ++i) tr += at(i, i).real();
    return tr;
}

DensityMatrix DensityMatrix::zero(int dimension) {
    DensityMatrix rho;
    rho.dimension = dimension;
    rho.entries.assign(static_cast<std::size_t>(dimension) * dimension, cxd{0.0, 0.0});
    return rho;
}

void DensityMatrix::validate(const std::string& context) const {
    const std::string where = context.empty() ? "density matrix" : context;
    double herm = 0.0;
    for (int i = 0; i < dimension; ++i) {
        for (int j = i; j < dimension; ++j) {
            herm = std::max(herm, std::abs(at(i, j) - std::conj(at(j, i))));
        }
    }
    if (herm > 1e-10) {
        throw invariant_error(where + ": Hermiticity off by " + std::to_string(herm));
    }
    const double tr = trace_real();
    if (std::abs(tr - 1.0) > 1e-8) {
        throw invariant_error(where + ": trace off by " + std::to_string(tr - 1.0));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(as_matrix(*this),
                                                       Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -1e-8) {
        throw invariant_error(where + ": eigenvalue " + std::to_string(min_eig));
    }
}

double poisson_tail(double mu, int n) {
    if (mu <= 0.0) return 0.0;
    long double term = std::exp(static_cast<long double>(-mu));
    long double cum = term;
    for (int k = 1; k <= n; ++k) {
        term *= mu / k;
        cum += term;
    }
    long double tail = 1.0L - cum;
    return tail > 0.0L ? static_cast<double>(tail) : 0.0;
}

int auto_truncation(cxd lambda, double tail_tol) {
    const double mu = std::norm(lambda);
    if (mu == 0.0) return 0;
    if (mu > 600.0) {
        throw std::invalid_argument("auto_truncation: |lambda|^2 beyond desk scale");
    }
    // Weights p_n up to where they stop mattering, then the tail accumulated
    // backward; summing small-to-large avoids the cancellation a 1-cum form
    // hits for tolerances near the floating-point resolution of 1.
    std::vector<long double> p{std::exp(static_cast<long double>(-mu))};
    constexpr int kMax = 4096;
    while (static_cast<int>(p.size()) < kMax) {
        const int n = static_cast<int>(p.size());
        p.push_back(p.back() * mu / n);
        if (n > mu && p.back() < tail_tol * 1e-6) break;
    }
    const int last = static_cast<int>(p.size()) - 1;
    if (last + 1 >= kMax) {
        throw std::invalid_argument("auto_truncation: no adequate truncation below 4096");
    }
    const long double r = mu / (last + 1);
    long double tail = p[last] * r / (1.0L - r);  // geometric bound past p[last]
    for (int n = last - 1; n >= 0; --n) {
        tail += p[n + 1];
        if (tail >= tail_tol) return n + 1;
    }
    return 0;
}

namespace {

void check_truncation(cxd lambda, int n_trunc, bool allow, double tail_tol,
                      const char* what) {
    if (n_trunc < 0) throw std::invalid_argument(std::string(what) + ": n_trunc < 0");
    const double tail = poisson_tail(std::norm(lambda), n_trunc);
    if (!allow && tail >= tail_tol) {
        throw std::invalid_argument(std::string(what) + ": occupation tail " +
                                    std::to_string(tail) + " above tolerance; raise n_trunc");
    }
}

// Unrenormalized coherent amplitudes e^{-|l|^2/2} l^n / sqrt(n!), built by the
// stable ratio recurrence c_{n+1} = c_n * l / sqrt(n+1).
std::vector<cxd> coherent_amplitudes(cxd lambda, int n_trunc) {
    std::vector<cxd> c(static_cast<std::size_t>(n_trunc) + 1);
    c[0] = std::exp(-0.5 * std::norm(lambda));
    for (int n = 0; n < n_trunc; ++n) c[n + 1] = c[n] * lambda / std::sqrt(n + 1.0);
    return c;
}

}  // namespace

FockVector coherent_state(cxd lambda, int n_trunc, bool allow_truncation_loss,
                          double tail_tol) {
    check_truncation(lambda, n_trunc, allow_truncation_loss, tail_tol, "coherent_state");
    FockVector v{coherent_amplitudes(lambda, n_trunc)};
    v.normalize();
    return v;
}

FockVector kitten_state(cxd lambda, int n_trunc, bool allow_truncation_loss,
                        double tail_tol) {
    check_truncation(lambda, n_trunc, allow_truncation_loss, tail_tol, "kitten_state");
    FockVector v{coherent_amplitudes(lambda, n_trunc)};
    // lambda^n + (-lambda)^n doubles even terms and cancels odd ones exactly.
    for (int n = 0; n <= n_trunc; ++n) {
        v.amp[n] = (n % 2 == 0) ? 2.0 * v.amp[n] : cxd{0.0, 0.0};
    }
    v.normalize();
    return v;
}

FockVector fock_state(int n, int n_trunc) {
    if (n < 0 || n > n_trunc) throw std::invalid_argument("fock_state: n out of range");
    FockVector v;
    v.amp.assign(static_cast<std::size_t>(n_trunc) + 1, cxd{0.0, 0.0});
    v.amp[n] = 1.0;
    return v;
}

FockVector annihilate(const FockVector& state) {
    FockVector out;
    out.amp.assign(state.amp.size(), cxd{0.0, 0.0});
    for (int n = 0; n < state.n_trunc(); ++n) {
        out.amp[n] = std::sqrt(n + 1.0) * state.amp[n + 1];
    }
    return out;
}

cxd inner_product(const FockVector& bra, const FockVector& ket) {
    if (bra.amp.size() != ket.amp.size()) {
        throw std::invalid_argument("inner_product: dimension mismatch");
    }
    return kernels::dotc(bra.amp.data(), ket.amp.data(), bra.amp.size());
}

DensityMatrix pure_density(const FockVector& state) {
    const int d = state.dim();
    DensityMatrix rho = DensityMatrix::zero(d);
    for (int i = 0; i < d; ++i) {
        kernels::axpy(&rho.entries[static_cast<std::size_t>(i) * d],
                      std::conj(state.amp[i]), state.amp.data(), d);
    }
    // axpy with conjugated row amplitude builds |psi><psi| transposed; fix by
    // conjugating, which is cheap and keeps one code path.
    for (auto& z : rho.entries) z = std::conj(z);
    return rho;
}

DensityMatrix partial_trace(const TwoModeState& state, Axis keep) {
    const double n2 = state.norm_sq();
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw invariant_error("partial_trace: input norm off by " +
                              std::to_string(n2 - 1.0));
    }
    auto A = as_matrix(state);
    Eigen::MatrixXcd rho;
    if (keep == Axis::system) {
        rho = A * A.adjoint();
    } else {
        rho = A.transpose() * A.conjugate();
    }
    DensityMatrix out = from_eigen(rho);
    out.validate("partial_trace output");
    return out;
}

SchmidtDecomposition schmidt(const TwoModeState& state) {
    const double n2 = state.norm_sq();
    if (std::abs(n2 - 1.0) > kNormTol) {
        throw invariant_error("schmidt: input norm off by " + std::to_string(n2 - 1.0));
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(as_matrix(state),
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    const auto& sv = svd.singularValues();
    out.coefficients.assign(sv.data(), sv.data() + sv.size());
    out.left_vectors = svd.matrixU();
    // A = U S V^H; the environment kets are therefore the conjugated columns
    // of V, so that A(m,k) = sum_i s_i U(m,i) W(k,i).
    out.right_vectors = svd.matrixV().conjugate();
    return out;
}

double entropy_bits(const double* p, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double v = p[i];
        if (v < 0.0) {
            if (v < -1e-8) {
                throw invariant_error("entropy: negative weight " + std::to_string(v));
            }
            v = 0.0;
        }
        if (v < 1e-12) continue;
        s -= v * std::log2(v);
    }
    return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(as_matrix(rho),
                                                       Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    return entropy_bits(ev.data(), static_cast<std::size_t>(ev.size()));
}

double purity(const DensityMatrix& rho) {
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    const double p = kernels::norm_sq(rho.entries.data(), rho.entries.size());
    if (p < 1.0 / rho.dimension - 1e-8 || p > 1.0 + 1e-8) {
        throw invariant_error("purity out of range: " + std::to_string(p));
    }
    return p;
}

double fidelity_to_pure(const DensityMatrix& rho, const FockVector& psi) {
    if (psi.dim() != rho.dimension) {
        throw std::invalid_argument("fidelity_to_pure: dimension mismatch");
    }
    auto R = as_matrix(rho);
    Eigen::Map<const Eigen::VectorXcd> v(psi.amp.data(), psi.dim());
    return (v.adjoint() * R * v).value().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dimension != b.dimension) {
        throw std::invalid_argument("trace_distance: dimension mismatch");
    }
    Eigen::MatrixXcd diff = as_matrix(a) - as_matrix(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double mean_occupation(const DensityMatrix& rho) {
    double acc = 0.0;
    for (int n = 0; n < rho.dimension; ++n) acc += n * rho.at(n, n).real();
    return acc;
}

cxd mean_annihilation(const DensityMatrix& rho) {
    // Tr(a rho) = sum_n sqrt(n+1) rho(n+1, n)
    cxd acc{0.0, 0.0};
    for (int n = 0; n + 1 < rho.dimension; ++n) {
        acc += std::sqrt(n + 1.0) * rho.at(n + 1, n);
    }
    return acc;
}

}  // namespace cohsim
