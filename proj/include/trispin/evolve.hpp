#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trispin/liouville.hpp"

namespace trispin {

// Output grid in dimensionless time T = omega t.
struct EvolutionGrid {
  std::vector<double> output_times;  // ascending, starting at >= 0
  double rtol = 1e-8;
  double atol = 1e-10;

  double t_max() const { return output_times.empty() ? 0.0 : output_times.back(); }
  void validate() const;

  // n_points + 1 equally spaced times 0, t_max/n_points, ..., t_max.
  static EvolutionGrid uniform(double t_max, std::size_t n_points);
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

// dopri5: Dormand-Prince 5(4), preserves the trace to roundoff.
// lawson: dopri5 with the effective-Hamiltonian diagonal as integrating
//   factor; the trace drifts at the level of the local error tolerance.
// krylov: exponential action on Krylov subspaces (time-independent generator).
enum class Integrator { dopri5, lawson, krylov };

// Called once per output time with the state at that time.
using SnapshotObserver = std::function<void(double t, const Matrix& rho)>;

void integrate(const Superoperator& gen, const DensityMatrix& rho0, const EvolutionGrid& grid,
               const SnapshotObserver& observer, Integrator method = Integrator::dopri5,
               IntegrationStats* stats = nullptr);

std::vector<DensityMatrix> integrate(const Superoperator& gen, const DensityMatrix& rho0,
                                     const EvolutionGrid& grid,
                                     Integrator method = Integrator::dopri5,
                                     IntegrationStats* stats = nullptr);

class SpectralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rho(t) = sum_i A_i eta_i exp(lambda_i t) from a dense eigendecomposition.
struct SpectralSolution {
  Vector eigenvalues;
  Matrix eigenvectors;   // columns eta_i
  Vector coefficients;   // A_i
  double condition{};    // 2-norm condition number of the eigenvector matrix

  DensityMatrix evaluate(double t) const;
};

// Four sites at most. Throws SpectralError when the eigenvector matrix is
// too ill-conditioned to trust the expansion.
SpectralSolution spectral_solve(const Superoperator& gen, const DensityMatrix& rho0,
                                double max_condition = 1e10);

class DegenerateSteadyState : public std::runtime_error {
 public:
  DegenerateSteadyState(const std::string& what, int multiplicity)
      : std::runtime_error(what), multiplicity_(multiplicity) {}
  // Lower bound on the null-space dimension.
  int multiplicity() const { return multiplicity_; }

 private:
  int multiplicity_;
};

struct SteadyStateOptions {
  double residual_tol = 1e-10;
  // Relative disagreement between two independently normalised null-vector
  // solves above which the kernel is reported as degenerate.
  double uniqueness_tol = 1e-8;
  // Site permutations commuting with the generator. When non-empty the
  // solve runs on the invariant subspace and is then checked on the full
  // space.
  std::vector<std::vector<int>> symmetries;
};

struct SteadyStateInfo {
  double residual{};        // max |L vec(rho)| on the full space
  double probe_mismatch{};  // uniqueness probe disagreement
  std::size_t reduced_dim{};
};

DensityMatrix steady_state(const Superoperator& gen, const SteadyStateOptions& options = {},
                           SteadyStateInfo* info = nullptr);

struct ConvergenceResult {
  bool converged{};
  double t_converged{};
};

// Converged when the trailing `window` successive differences are all below
// `tol` in max norm. t_converged is the earliest output time whose remaining
// path length (sum of later successive differences, an upper bound on the
// distance to the final snapshot) is below `tol`.
ConvergenceResult detect_convergence(const std::vector<Matrix>& series,
                                     const std::vector<double>& times, double tol = 1e-9,
                                     std::size_t window = 10);
ConvergenceResult detect_convergence(const std::vector<DensityMatrix>& series,
                                     const std::vector<double>& times, double tol = 1e-9,
                                     std::size_t window = 10);

// Streaming form of detect_convergence; keeps one snapshot and the scalar
// difference history.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(double tol = 1e-9, std::size_t window = 10)
      : tol_(tol), window_(window) {}
  void push(double t, const Matrix& rho);
  ConvergenceResult result() const;

 private:
  double tol_;
  std::size_t window_;
  std::optional<Matrix> last_;
  std::vector<double> times_;
  std::vector<double> diffs_;  // diffs_[k] = |rho_{k+1} - rho_k|_max
};

}  // namespace trispin
