#include "trispin/liouville.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace trispin {

DensityMatrix::DensityMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw std::invalid_argument("density matrix must be square");
  if (log2_exact(static_cast<std::size_t>(m_.rows())) < 0)
    throw std::invalid_argument("density matrix dimension must be a power of two");
}

namespace {

// Smallest eigenvalue of a Hermitian matrix, solving each block of its
// exact-zero pattern separately. Symmetry sectors of the dynamics keep such
// blocks exactly zero along a trajectory.
double min_eigenvalue_blockwise(const Matrix& herm) {
  const Eigen::Index d = herm.rows();
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) parent[static_cast<std::size_t>(i)] = i;
  auto find = [&](Eigen::Index x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      auto& p = parent[static_cast<std::size_t>(x)];
      p = parent[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  };
  for (Eigen::Index c = 0; c < d; ++c)
    for (Eigen::Index r = c + 1; r < d; ++r)
      if (herm(r, c) != cplx{}) {
        const auto a = find(r);
        const auto b = find(c);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }
  std::vector<std::vector<Eigen::Index>> blocks(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) blocks[static_cast<std::size_t>(find(i))].push_back(i);

  double lo = std::numeric_limits<double>::infinity();
  Matrix sub;
  for (const auto& idx : blocks) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    if (k == 0) continue;
    if (k == 1) {
      lo = std::min(lo, herm(idx[0], idx[0]).real());
      continue;
    }
    sub.resize(k, k);
    for (Eigen::Index c = 0; c < k; ++c)
      for (Eigen::Index r = 0; r < k; ++r) sub(r, c) = herm(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    Eigen::SelfAdjointEigenSolver<Matrix> es(sub, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues().minCoeff());
  }
  return lo;
}

}  // namespace

CptpReport check_state(const DensityMatrix& rho) {
  const Matrix& m = rho.matrix();
  CptpReport r;
  r.trace_error = std::abs(m.trace() - 1.0);
  r.hermiticity = (m - m.adjoint()).cwiseAbs().maxCoeff();
  r.min_eigenvalue = min_eigenvalue_blockwise(0.5 * (m + m.adjoint()));
  return r;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const Matrix diff = a.matrix() - b.matrix();
  const Matrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Vector vectorize(const Matrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("vectorize: matrix must be square");
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Vector vectorize(const DensityMatrix& rho) { return vectorize(rho.matrix()); }

Matrix devectorize(const Vector& v) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (n * n != v.size()) throw std::invalid_argument("devectorize: length is not a perfect square");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

std::vector<Superoperator::MaskTerm> Superoperator::split_by_mask(const SparseMatrix& a) {
  const auto d = static_cast<std::size_t>(a.rows());
  std::vector<MaskTerm> terms;
  std::vector<std::ptrdiff_t> slot(d, -1);
  for (Eigen::Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.value() == cplx{}) continue;
      const auto row = static_cast<std::size_t>(it.row());
      const std::size_t mask = row ^ static_cast<std::size_t>(it.col());
      if (slot[mask] < 0) {
        slot[mask] = static_cast<std::ptrdiff_t>(terms.size());
        terms.push_back({mask, std::vector<cplx>(d), {}, {}});
      }
      terms[static_cast<std::size_t>(slot[mask])].coef[row] = it.value();
    }
  }
  for (auto& t : terms) {
    for (std::size_t row = 0; row < d; ++row) {
      if (t.coef[row] != cplx{}) {
        t.rows.push_back(static_cast<std::uint32_t>(row));
        t.values.push_back(t.coef[row]);
      }
    }
  }
  return terms;
}

Superoperator::Superoperator(ManyBodyOperator hamiltonian, std::vector<ManyBodyOperator> jumps)
    : h_(std::move(hamiltonian)), jumps_(std::move(jumps)) {
  const auto d = h_.matrix.rows();
  if (h_.matrix.cols() != d || log2_exact(static_cast<std::size_t>(d)) < 0)
    throw std::invalid_argument("Hamiltonian must be square with power-of-two dimension");
  for (const auto& l : jumps_)
    if (l.matrix.rows() != d || l.matrix.cols() != d)
      throw std::invalid_argument("jump operator dimension does not match the Hamiltonian");

  SparseMatrix decay(d, d);
  for (const auto& l : jumps_) {
    if (l.matrix.nonZeros() == 0) continue;
    decay += SparseMatrix(l.matrix.adjoint()) * l.matrix;
    jump_terms_.push_back(split_by_mask(l.matrix));
  }
  const SparseMatrix h_eff = h_.matrix - (0.5 * I) * decay;
  h_eff_terms_ = split_by_mask(h_eff);
  heff_diag_ = Vector(h_eff.diagonal());

  SparseMatrix id(d, d);
  id.setIdentity();
  const SparseMatrix h_t = h_.matrix.transpose();
  const SparseMatrix decay_t = decay.transpose();
  SparseMatrix l_hat = (-I) * (SparseMatrix(Eigen::kroneckerProduct(id, h_.matrix)) -
                               SparseMatrix(Eigen::kroneckerProduct(h_t, id)));
  l_hat -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(id, decay));
  l_hat -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(decay_t, id));
  for (const auto& l : jumps_) {
    if (l.matrix.nonZeros() == 0) continue;
    const SparseMatrix conj = l.matrix.conjugate();
    l_hat += SparseMatrix(Eigen::kroneckerProduct(conj, l.matrix));
  }
  l_hat.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx{}; });
  l_hat.makeCompressed();
  sparse_ = std::move(l_hat);
}

Matrix Superoperator::dense() const {
  if (n_sites() > 4) throw std::length_error("dense superoperator is limited to four sites");
  return Matrix(sparse_);
}

// out = -i A rho + i rho A^+ + sum_k L_k rho L_k^+ with A = H - (i/2) sum L^+ L.
// Every operator is stored as XOR-mask diagonals, so each term is a permuted,
// scaled copy of a column of rho.
void Superoperator::derivative(const Matrix& rho, Matrix& out, KernelOptions opts) const {
  const auto d = static_cast<std::size_t>(hilbert_dim());
  if (static_cast<std::size_t>(rho.rows()) != d || static_cast<std::size_t>(rho.cols()) != d)
    throw std::invalid_argument("derivative: state dimension does not match generator");
  out.resize(rho.rows(), rho.cols());

  const cplx* src = rho.data();
  cplx* dst = out.data();
  const cplx minus_i{0.0, -1.0};
  for (std::size_t b = 0; b < d; ++b) {
    cplx* o = dst + b * d;
    const cplx* col = src + b * d;
    std::fill(o, o + d, cplx{});
    for (const auto& t : h_eff_terms_) {
      if (opts.skip_diagonal && t.mask == 0) continue;
      const std::size_t m = t.mask;
      // -i A rho: o[a] += -i A(a, a^m) rho(a^m, b)
      const std::size_t nz = t.rows.size();
      for (std::size_t k = 0; k < nz; ++k) {
        const std::uint32_t r = t.rows[k];
        o[r] += minus_i * (t.values[k] * col[r ^ m]);
      }
      if (opts.hermitian) continue;
      // i rho A^+: o[a] += i conj(A(b, b^m)) rho(a, b^m)
      const cplx cb = t.coef[b];
      if (cb == cplx{}) continue;
      const cplx s = cplx{0.0, 1.0} * std::conj(cb);
      const cplx* other = src + (b ^ m) * d;
      for (std::size_t a = 0; a < d; ++a) o[a] += s * other[a];
    }
    // L rho L^+: o[a] += L(a, a^m) rho(a^m, b^n) conj(L(b, b^n))
    for (const auto& terms : jump_terms_) {
      for (const auto& right : terms) {
        const cplx cb = right.coef[b];
        if (cb == cplx{}) continue;
        const cplx rc = opts.hermitian ? 0.5 * std::conj(cb) : std::conj(cb);
        const cplx* other = src + (b ^ right.mask) * d;
        for (const auto& left : terms) {
          const std::size_t m = left.mask;
          const std::size_t nz = left.rows.size();
          for (std::size_t k = 0; k < nz; ++k) {
            const std::uint32_t r = left.rows[k];
            o[r] += (left.values[k] * rc) * other[r ^ m];
          }
        }
      }
    }
  }
  if (opts.hermitian) {
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t r = 0; r <= c; ++r) {
        const cplx v = dst[c * d + r] + std::conj(dst[r * d + c]);
        dst[c * d + r] = v;
        dst[r * d + c] = std::conj(v);
      }
    }
  }
}

void Superoperator::apply(const Vector& v, Vector& out) const {
  if (static_cast<std::size_t>(v.size()) != dim())
    throw std::invalid_argument("apply: vector length does not match generator");
  const auto d = static_cast<Eigen::Index>(hilbert_dim());
  Matrix res;
  derivative(Eigen::Map<const Matrix>(v.data(), d, d), res);
  out = Eigen::Map<const Vector>(res.data(), res.size());
}

Superoperator build_liouvillian(const ManyBodyOperator& hamiltonian,
                                const std::vector<ManyBodyOperator>& jumps) {
  return Superoperator(hamiltonian, jumps);
}

Superoperator build_liouvillian(const ManyBodyOperator& hamiltonian,
                                const std::vector<JumpOperator>& jumps) {
  std::vector<ManyBodyOperator> ops;
  ops.reserve(jumps.size());
  for (const auto& j : jumps) ops.push_back(j.op);
  return Superoperator(hamiltonian, std::move(ops));
}

Vector apply_liouvillian(const Superoperator& op, const Vector& v, Representation rep) {
  if (static_cast<std::size_t>(v.size()) != op.dim())
    throw std::invalid_argument("apply_liouvillian: vector length " + std::to_string(v.size()) +
                                " does not match generator dimension " + std::to_string(op.dim()));
  if (rep == Representation::sparse) return op.sparse() * v;
  Vector out;
  op.apply(v, out);
  return out;
}

}  // namespace trispin
