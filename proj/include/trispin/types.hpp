#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace trispin {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;
using Triplet = Eigen::Triplet<cplx>;

inline constexpr cplx I{0.0, 1.0};

// Number of qubits n with 2^n == dim, or -1 when dim is not a power of two.
inline int log2_exact(std::size_t dim) {
  if (dim == 0 || (dim & (dim - 1)) != 0) return -1;
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return n;
}

}  // namespace trispin
