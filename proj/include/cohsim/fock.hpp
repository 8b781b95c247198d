#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

// Truncated single-mode and two-mode Fock-space state algebra: state
// constructors, ladder operations, partial trace, Schmidt decomposition,
// entropy and related density-matrix observables.

namespace cohsim {

using cxd = std::complex<double>;

// A numerical invariant was violated (CLI maps this to exit code 3).
class invariant_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kNormTol = 1e-10;
inline constexpr double kDefaultTailTol = 1e-12;

using RowMatrixXcd =
    Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

// Pure state of one bosonic mode, amplitudes indexed by occupation number
// 0..n_trunc. Treated as an immutable value after construction.
struct FockVector {
    std::vector<cxd> amp;

    int n_trunc() const { return static_cast<int>(amp.size()) - 1; }
    int dim() const { return static_cast<int>(amp.size()); }
    double norm_sq() const;
    void normalize();
    double mean_occupation() const;
};

// Joint pure state of system (rows) and environment (columns), each axis
// truncated independently. Row-major: amp[ns * (n_trunc_e + 1) + ne].
struct TwoModeState {
    std::vector<cxd> amp;
    int n_trunc_s = 0;
    int n_trunc_e = 0;

    int rows() const { return n_trunc_s + 1; }
    int cols() const { return n_trunc_e + 1; }
    cxd& at(int ns, int ne) { return amp[static_cast<std::size_t>(ns) * cols() + ne]; }
    const cxd& at(int ns, int ne) const {
        return amp[static_cast<std::size_t>(ns) * cols() + ne];
    }
    double norm_sq() const;
    double mean_occupation_system() const;
    double mean_occupation_environment() const;
};

// Hermitian, unit-trace, positive-semidefinite operator on truncated Fock
// space. Row-major dim x dim.
struct DensityMatrix {
    std::vector<cxd> entries;
    int dimension = 0;

    cxd& at(int i, int j) {
        return entries[static_cast<std::size_t>(i) * dimension + j];
    }
    const cxd& at(int i, int j) const {
        return entries[static_cast<std::size_t>(i) * dimension + j];
    }
    double trace_real() const;
    // Throws invariant_error if Hermiticity (1e-10), unit trace (1e-8) or
    // positivity (eigenvalues >= -1e-8) fails.
    void validate(const std::string& context = {}) const;

    static DensityMatrix zero(int dimension);
};

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // non-increasing, non-negative
    Eigen::MatrixXcd left_vectors;     // column i = i-th system vector
    Eigen::MatrixXcd right_vectors;    // column i = i-th environment vector
    // Reconstruction: state(m, k) = sum_i coeff[i] * left(m,i) * right(k,i)
};

enum class Axis { system, environment };

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Smallest N whose Poisson occupation tail beyond N is < tail_tol for mean
// |lambda|^2.
int auto_truncation(cxd lambda, double tail_tol = kDefaultTailTol);

// Poisson tail mass beyond N for mean mu (helper shared with constructors).
double poisson_tail(double mu, int n);

// Coherent state, renormalized after truncation. Rejects truncations whose
// Poisson tail mass is >= tail_tol unless allow_truncation_loss is set.
FockVector coherent_state(cxd lambda, int n_trunc,
                          bool allow_truncation_loss = false,
                          double tail_tol = kDefaultTailTol);

// Even (symmetric) superposition of coherent states of opposite sign.
FockVector kitten_state(cxd lambda, int n_trunc,
                        bool allow_truncation_loss = false,
                        double tail_tol = kDefaultTailTol);

// Occupation-number basis state |n>.
FockVector fock_state(int n, int n_trunc);

// Lowering operator; output is intentionally unnormalized.
FockVector annihilate(const FockVector& state);

cxd inner_product(const FockVector& bra, const FockVector& ket);

DensityMatrix pure_density(const FockVector& state);

// Reduced state of one mode of a normalized joint pure state.
DensityMatrix partial_trace(const TwoModeState& state, Axis keep);

SchmidtDecomposition schmidt(const TwoModeState& state);

// Shannon-von Neumann entropy in bits over a probability-like vector.
// Values in [-1e-8, 0) clip to 0, more negative ones throw; values below
// 1e-12 contribute nothing.
double entropy_bits(const double* p, std::size_t n);

double von_neumann_entropy(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

// <psi| rho |psi> for a pure reference state.
double fidelity_to_pure(const DensityMatrix& rho, const FockVector& psi);

// (1/2) * trace norm of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

double mean_occupation(const DensityMatrix& rho);

// Tr(a rho), the mean field amplitude.
cxd mean_annihilation(const DensityMatrix& rho);

}  // namespace cohsim
