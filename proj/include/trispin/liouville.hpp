#pragma once

#include <cstdint>
#include <vector>

#include "trispin/spin_ops.hpp"
#include "trispin/types.hpp"

namespace trispin {

// Square, power-of-two dimensional complex matrix. Physical validity is not
// enforced on construction; use check_state() for that.
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(Matrix m);

  const Matrix& matrix() const { return m_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  int n_sites() const { return log2_exact(dim()); }
  cplx trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

struct CptpTolerance {
  double trace = 1e-10;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};

struct CptpReport {
  double trace_error{};     // |tr(rho) - 1|
  double hermiticity{};     // max |rho - rho^dagger|
  double min_eigenvalue{};  // of the Hermitian part

  bool ok(const CptpTolerance& tol = {}) const {
    return trace_error < tol.trace && hermiticity < tol.hermiticity &&
           min_eigenvalue > tol.min_eigenvalue;
  }
};

CptpReport check_state(const DensityMatrix& rho);

// (1/2) sum |eig(a - b)|.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Column stacking: v[col * d + row] = m(row, col).
Vector vectorize(const Matrix& m);
Vector vectorize(const DensityMatrix& rho);
Matrix devectorize(const Vector& v);

enum class Representation { sparse, matrix_free };

// Generator of d rho/dt = -i[H, rho] + sum_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
// acting on column-stacked density matrices.
class Superoperator {
 public:
  Superoperator(ManyBodyOperator hamiltonian, std::vector<ManyBodyOperator> jumps);

  int n_sites() const { return h_.n_sites; }
  std::size_t hilbert_dim() const { return h_.dim(); }
  std::size_t dim() const { return hilbert_dim() * hilbert_dim(); }

  const ManyBodyOperator& hamiltonian() const { return h_; }
  const std::vector<ManyBodyOperator>& jumps() const { return jumps_; }

  const SparseMatrix& sparse() const { return sparse_; }
  // Refuses (std::length_error) above four sites.
  Matrix dense() const;

  struct KernelOptions {
    // Leave out -i g rho + i rho g^*, g the diagonal of the effective
    // Hamiltonian (integrating-factor steppers propagate it exactly).
    bool skip_diagonal = false;
    // Input is Hermitian: only -i A rho + (1/2) sum L rho L^+ is formed and
    // the result is that plus its adjoint.
    bool hermitian = false;
  };

  // Matrix-free action on the matrix form; `out` is resized as needed.
  void derivative(const Matrix& rho, Matrix& out) const { derivative(rho, out, KernelOptions{}); }
  void derivative(const Matrix& rho, Matrix& out, KernelOptions opts) const;

  // Diagonal of H - (i/2) sum L^+ L.
  const Vector& effective_diagonal() const { return heff_diag_; }
  void apply(const Vector& v, Vector& out) const;

 private:
  // Entries of an operator A sharing the same row ^ col pattern:
  // coef[x] = A(x, x ^ mask).
  struct MaskTerm {
    std::size_t mask{};
    std::vector<cplx> coef;           // dense, indexed by row
    std::vector<std::uint32_t> rows;  // rows with a nonzero coefficient
    std::vector<cplx> values;         // coef at `rows`
  };
  static std::vector<MaskTerm> split_by_mask(const SparseMatrix& a);

  ManyBodyOperator h_;
  std::vector<ManyBodyOperator> jumps_;
  std::vector<MaskTerm> h_eff_terms_;  // H - (i/2) sum L^+ L
  Vector heff_diag_;
  std::vector<std::vector<MaskTerm>> jump_terms_;
  SparseMatrix sparse_;
};

Superoperator build_liouvillian(const ManyBodyOperator& hamiltonian,
                                const std::vector<ManyBodyOperator>& jumps);
Superoperator build_liouvillian(const ManyBodyOperator& hamiltonian,
                                const std::vector<JumpOperator>& jumps);

// Throws std::invalid_argument on a length mismatch.
Vector apply_liouvillian(const Superoperator& op, const Vector& v,
                         Representation rep = Representation::matrix_free);

}  // namespace trispin
