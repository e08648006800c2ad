#include "trispin/spin_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace trispin {

Anisotropy anisotropy_preset(std::string_view name) {
  if (name == "ising") return {1.0, 0.0};
  if (name == "xxx") return {0.0, 0.5};
  if (name == "xyz") return {0.5, 1.0};
  throw std::invalid_argument("unknown anisotropy preset '" + std::string(name) + "'");
}

void ModelParams::validate() const {
  if (!(omega > 0.0)) throw std::invalid_argument("omega must be positive");
  if (!(Gamma >= 0.0)) throw std::invalid_argument("Gamma must be non-negative");
  if (!(nbar >= 0.0)) throw std::invalid_argument("nbar must be non-negative");
  if (!(B1 >= 0.0) || !(B2 >= 0.0)) throw std::invalid_argument("field strengths must be non-negative");
  for (double v : {gamma, delta, J})
    if (!std::isfinite(v)) throw std::invalid_argument("coupling parameters must be finite");
}

namespace {

void check_sites(int site, int n_sites) {
  if (n_sites < 1 || n_sites > 14) throw std::invalid_argument("site count must be in [1, 14]");
  if (site < 1 || site > n_sites)
    throw std::out_of_range("site " + std::to_string(site) + " outside 1.." + std::to_string(n_sites));
}

double sz_value(std::size_t index, int site, int n_sites) {
  return is_down(index, site, n_sites) ? -0.5 : 0.5;
}

}  // namespace

ManyBodyOperator site_operator(SpinOp kind, int site, int n_sites) {
  check_sites(site, n_sites);
  const std::size_t dim = std::size_t{1} << n_sites;
  const std::size_t mask = std::size_t{1} << site_bit(site, n_sites);
  std::vector<Triplet> t;
  t.reserve(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    const bool down = (col & mask) != 0;
    const auto row_flip = static_cast<Eigen::Index>(col ^ mask);
    const auto c = static_cast<Eigen::Index>(col);
    switch (kind) {
      case SpinOp::Sz: t.emplace_back(c, c, down ? -0.5 : 0.5); break;
      case SpinOp::Sx: t.emplace_back(row_flip, c, 0.5); break;
      // Sy|up> = (i/2)|down>, Sy|down> = (-i/2)|up>
      case SpinOp::Sy: t.emplace_back(row_flip, c, down ? -0.5 * I : 0.5 * I); break;
      case SpinOp::Splus:
        if (down) t.emplace_back(row_flip, c, 1.0);
        break;
      case SpinOp::Sminus:
        if (!down) t.emplace_back(row_flip, c, 1.0);
        break;
    }
  }
  ManyBodyOperator op{n_sites, SparseMatrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
  op.matrix.setFromTriplets(t.begin(), t.end());
  return op;
}

ManyBodyOperator build_hamiltonian(const ModelParams& params, const LatticeSpec& lattice,
                                   const FieldAssignment& fields) {
  params.validate();
  const int n = lattice.n_sites();
  if (fields.h.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("field assignment does not match lattice site count");
  const std::size_t dim = std::size_t{1} << n;

  // (1+g)/2 J SxSx + (1-g)/2 J SySy flips both spins of an edge with amplitude
  // g J/4 when they are parallel and J/4 when antiparallel.
  const double parallel = params.gamma * params.J / 4.0;
  const double antiparallel = params.J / 4.0;

  std::vector<Triplet> t;
  t.reserve(dim * (lattice.edges().size() + 1));
  for (std::size_t col = 0; col < dim; ++col) {
    const auto c = static_cast<Eigen::Index>(col);
    double diag = 0.0;
    for (int s = 1; s <= n; ++s) diag += fields.h[static_cast<std::size_t>(s - 1)] * sz_value(col, s, n);
    for (const auto& e : lattice.edges()) {
      const double za = sz_value(col, e.a, n);
      const double zb = sz_value(col, e.b, n);
      diag += params.delta * params.J * za * zb;
      const double amp = (za == zb) ? parallel : antiparallel;
      if (amp != 0.0) {
        const std::size_t flip =
            col ^ (std::size_t{1} << site_bit(e.a, n)) ^ (std::size_t{1} << site_bit(e.b, n));
        t.emplace_back(static_cast<Eigen::Index>(flip), c, amp);
      }
    }
    if (diag != 0.0) t.emplace_back(c, c, diag);
  }
  ManyBodyOperator h{n, SparseMatrix(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))};
  h.matrix.setFromTriplets(t.begin(), t.end());
  return h;
}

std::vector<JumpOperator> build_lindblad_ops(const ModelParams& params, int n_sites) {
  params.validate();
  const double relax = std::sqrt(params.Gamma * (params.nbar + 1.0));
  const double excite = std::sqrt(params.Gamma * params.nbar);
  std::vector<JumpOperator> out;
  out.reserve(static_cast<std::size_t>(2 * n_sites));
  for (int k = 1; k <= n_sites; ++k) {
    auto op = site_operator(SpinOp::Sminus, k, n_sites);
    op.matrix *= relax;
    out.push_back({k, SpinOp::Sminus, relax, std::move(op)});
  }
  for (int k = 1; k <= n_sites; ++k) {
    auto op = site_operator(SpinOp::Splus, k, n_sites);
    op.matrix *= excite;
    op.matrix.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx{}; });
    out.push_back({k, SpinOp::Splus, excite, std::move(op)});
  }
  return out;
}

}  // namespace trispin
