#include "trispin/observables.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace trispin {

InitialState parse_initial_state(std::string_view name) {
  if (name == "separable") return InitialState::separable;
  if (name == "w_state" || name == "w") return InitialState::w_state;
  if (name == "max_entangled") return InitialState::max_entangled;
  throw std::invalid_argument("unknown initial state '" + std::string(name) + "'");
}

std::string_view to_string(InitialState kind) {
  switch (kind) {
    case InitialState::separable: return "separable";
    case InitialState::w_state: return "w_state";
    case InitialState::max_entangled: return "max_entangled";
  }
  return "?";
}

DensityMatrix initial_state(InitialState kind, int n_sites) {
  if (n_sites < 1 || n_sites > 14) throw std::invalid_argument("initial_state: site count must be in [1, 14]");
  const std::size_t d = std::size_t{1} << n_sites;
  Vector psi = Vector::Zero(static_cast<Eigen::Index>(d));
  switch (kind) {
    case InitialState::separable:
      psi[0] = 1.0;
      break;
    case InitialState::w_state: {
      const double amp = 1.0 / std::sqrt(static_cast<double>(n_sites));
      // One spin up on a down background.
      const std::size_t all_down = d - 1;
      for (int s = 1; s <= n_sites; ++s)
        psi[static_cast<Eigen::Index>(all_down ^ (std::size_t{1} << site_bit(s, n_sites)))] = amp;
      break;
    }
    case InitialState::max_entangled: {
      if (n_sites < 2) throw std::invalid_argument("initial_state: max_entangled needs two sites");
      const std::size_t all_down = d - 1;
      const double amp = 1.0 / std::sqrt(2.0);
      psi[static_cast<Eigen::Index>(all_down ^ (std::size_t{1} << site_bit(1, n_sites)))] = amp;
      psi[static_cast<Eigen::Index>(all_down ^ (std::size_t{1} << site_bit(2, n_sites)))] = amp;
      break;
    }
  }
  return DensityMatrix(psi * psi.adjoint());
}

DensityMatrix partial_trace(const DensityMatrix& rho, int first, int second) {
  const int n = rho.n_sites();
  if (first == second) throw std::invalid_argument("partial_trace: sites must differ");
  for (int s : {first, second})
    if (s < 1 || s > n)
      throw std::out_of_range("partial_trace: site " + std::to_string(s) + " outside 1.." + std::to_string(n));
  const std::size_t mi = std::size_t{1} << site_bit(first, n);
  const std::size_t mj = std::size_t{1} << site_bit(second, n);
  const std::size_t d = rho.dim();
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(4, 4);
  auto local = [&](std::size_t a) { return ((a & mi) ? 2 : 0) + ((a & mj) ? 1 : 0); };
  const std::size_t keep = mi | mj;
  for (std::size_t a = 0; a < d; ++a) {
    const std::size_t rest = a & ~keep;
    for (std::size_t y = 0; y < 4; ++y) {
      const std::size_t b = rest | ((y & 2) ? mi : 0) | ((y & 1) ? mj : 0);
      out(local(a), static_cast<Eigen::Index>(y)) += m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  }
  return DensityMatrix(out);
}

double concurrence(const DensityMatrix& rho2, double psd_tol) {
  if (rho2.dim() != 4) throw std::invalid_argument("concurrence: expected a 4x4 two-qubit state");
  // Evaluate on a canonical qubit order so C_ij and C_ji agree bitwise.
  static constexpr int swap_idx[4] = {0, 2, 1, 3};
  Matrix swapped(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) swapped(a, b) = rho2.matrix()(swap_idx[a], swap_idx[b]);
  auto less = [](const Matrix& x, const Matrix& y) {
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      const cplx u = x.data()[k];
      const cplx v = y.data()[k];
      if (u.real() != v.real()) return u.real() < v.real();
      if (u.imag() != v.imag()) return u.imag() < v.imag();
    }
    return false;
  };
  const Matrix& r = less(swapped, rho2.matrix()) ? swapped : rho2.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r + r.adjoint()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -psd_tol)
    throw std::invalid_argument("concurrence: state is not positive semidefinite");

  // sy (x) sy is real and anti-diagonal with signs (-1, 1, 1, -1).
  Matrix yy = Matrix::Zero(4, 4);
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  const Matrix flipped = yy * r.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> ces(r * flipped, false);
  std::array<double, 4> eps{};
  for (int k = 0; k < 4; ++k) eps[static_cast<std::size_t>(k)] = std::sqrt(std::max(0.0, ces.eigenvalues()[k].real()));
  std::sort(eps.begin(), eps.end(), std::greater<>());
  return std::max(0.0, eps[0] - eps[1] - eps[2] - eps[3]);
}

double tau2(const DensityMatrix& rho, int site) {
  const int n = rho.n_sites();
  if (site < 1 || site > n) throw std::out_of_range("tau2: site out of range");
  double sum = 0.0;
  for (int j = 1; j <= n; ++j) {
    if (j == site) continue;
    const double c = concurrence(partial_trace(rho, site, j));
    sum += c * c;
  }
  return sum;
}

double spin_z(const DensityMatrix& rho, int site) {
  const int n = rho.n_sites();
  if (site < 1 || site > n) throw std::out_of_range("spin_z: site out of range");
  cplx acc{};
  const Matrix& m = rho.matrix();
  for (std::size_t a = 0; a < rho.dim(); ++a)
    acc += (is_down(a, site, n) ? -0.5 : 0.5) * m(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a));
  if (std::abs(acc.imag()) > 1e-10) throw std::runtime_error("spin_z: expectation has an imaginary part");
  return acc.real();
}

std::vector<PairEntanglement> pair_entanglements(const DensityMatrix& rho, const LatticeSpec& lattice,
                                                 const std::vector<std::pair<int, int>>& pairs) {
  std::vector<PairEntanglement> out;
  out.reserve(pairs.size());
  for (auto [i, j] : pairs)
    out.push_back({i, j, concurrence(partial_trace(rho, i, j)), lattice.pair_class(i, j)});
  return out;
}

ObservableSet ObservableSet::all_pairs(const LatticeSpec& lattice, std::vector<int> tau2_sites) {
  ObservableSet s;
  s.pairs = lattice.all_pairs();
  s.tau2_sites = std::move(tau2_sites);
  return s;
}

ObservableRecord measure(const DensityMatrix& rho, const ObservableSet& set, double t) {
  const int n = rho.n_sites();
  std::map<std::pair<int, int>, double> cache;
  auto pair_c = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double c = concurrence(partial_trace(rho, key.first, key.second));
    cache.emplace(key, c);
    return c;
  };
  ObservableRecord rec;
  rec.t = t;
  for (auto [i, j] : set.pairs) rec.concurrences.push_back(pair_c(i, j));
  for (int s : set.tau2_sites) {
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
      if (j == s) continue;
      const double c = pair_c(s, j);
      sum += c * c;
    }
    rec.tau2.push_back(sum);
  }
  for (int s = 1; s <= n; ++s) rec.spin_z.push_back(spin_z(rho, s));
  return rec;
}

}  // namespace trispin
