#include "trispin/evolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

namespace trispin {

void EvolutionGrid::validate() const {
  if (output_times.empty()) throw std::invalid_argument("evolution grid has no output times");
  if (output_times.front() < 0.0) throw std::invalid_argument("output times must be non-negative");
  for (std::size_t k = 1; k < output_times.size(); ++k)
    if (!(output_times[k] > output_times[k - 1]))
      throw std::invalid_argument("output times must be strictly ascending");
  if (!(rtol > 0.0) || !(atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
}

EvolutionGrid EvolutionGrid::uniform(double t_max, std::size_t n_points) {
  if (!(t_max > 0.0) || n_points == 0) throw std::invalid_argument("uniform grid needs t_max > 0 and n_points > 0");
  EvolutionGrid g;
  g.output_times.resize(n_points + 1);
  for (std::size_t k = 0; k <= n_points; ++k)
    g.output_times[k] = t_max * static_cast<double>(k) / static_cast<double>(n_points);
  return g;
}

namespace {

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double rtol, double atol) {
  double sum = 0.0;
  const auto n = err.size();
  const cplx* e = err.data();
  const cplx* a = y0.data();
  const cplx* b = y1.data();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double sc = atol + rtol * std::sqrt(std::max(std::norm(a[k]), std::norm(b[k])));
    sum += std::norm(e[k]) / (sc * sc);
  }
  return std::sqrt(sum / static_cast<double>(n));
}

// Dormand-Prince 5(4) with Hairer's PI step-size controller. In integrating
// factor (Lawson) mode the diagonal of the effective Hamiltonian is
// propagated exactly, rho -> P rho P^+ with P = exp(-i c h g), and the RK
// stages only see the remaining couplings.
class Dopri5 {
 public:
  Dopri5(const Superoperator& gen, double rtol, double atol, bool integrating_factor,
         IntegrationStats& stats)
      : gen_(gen), rtol_(rtol), atol_(atol), lawson_(integrating_factor), stats_(stats) {}

  void run(Matrix& y, double t0, const std::vector<double>& times, const SnapshotObserver& observer) {
    double t = t0;
    hermitian_ = (y - y.adjoint()).cwiseAbs().maxCoeff() == 0.0;
    eval(y, k_[0]);
    double h = initial_step(y);
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t0) observer(times[next++], y);
    while (next < times.size()) {
      const double target = times[next];
      const double remaining = target - t;
      const bool clamp = h >= remaining * (1.0 - 1e-12);
      const double step = clamp ? remaining : h;
      if (!std::isfinite(step) || step < 1e-14 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow at T = " + std::to_string(t), t);

      const double err = attempt(y, step);
      if (err <= 1.0) {
        const double fac11 = std::pow(std::max(err, 1e-16), kExpo1);
        double fac = fac11 / std::pow(facold_, kBeta);
        fac = std::clamp(fac / kSafety, 1.0 / kFacMax, 1.0 / kFacMin);
        facold_ = std::max(err, 1e-4);
        ++stats_.accepted;
        std::swap(y, y_new_);
        std::swap(k_[0], f_new_);
        const double proposed = step / fac;
        t = clamp ? target : t + step;
        h = clamp ? std::max(h, proposed) : proposed;
        if (rejected_last_) h = std::min(h, step);
        rejected_last_ = false;
        if (clamp) observer(times[next++], y);
      } else {
        const double fac11 = std::pow(err, kExpo1);
        h = step / std::min(1.0 / kFacMin, fac11 / kSafety);
        rejected_last_ = true;
        ++stats_.rejected;
      }
    }
  }

 private:
  static constexpr double kBeta = 0.04;
  static constexpr double kExpo1 = 0.2 - kBeta * 0.75;
  static constexpr double kSafety = 0.9;
  static constexpr double kFacMin = 0.2;
  static constexpr double kFacMax = 10.0;

  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double e[7] = {71.0 / 57600,  0.0,          -71.0 / 16695, 71.0 / 1920,
                                  -17253.0 / 339200, 22.0 / 525, -1.0 / 40};

  void eval(const Matrix& y, Matrix& out) {
    gen_.derivative(y, out, {.skip_diagonal = lawson_, .hermitian = hermitian_});
    ++stats_.evaluations;
  }

  // x(a, b) *= (p_a conj(p_b))^sign with p = exp(-i tau g).
  void scale(Matrix& x, double tau, double sign) {
    const Vector& g = gen_.effective_diagonal();
    Vector p(g.size());
    for (Eigen::Index k = 0; k < g.size(); ++k) p[k] = std::exp(-sign * tau * I * g[k]);
    for (Eigen::Index col = 0; col < x.cols(); ++col) {
      const cplx right = std::exp(sign * tau * I * std::conj(g[col]));
      for (Eigen::Index row = 0; row < x.rows(); ++row) x(row, col) *= p[row] * right;
    }
  }

  double initial_step(const Matrix& y) {
    const double d0 = error_norm(y, y, y, rtol_, atol_);
    const double d1 = error_norm(k_[0], y, y, rtol_, atol_);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    Matrix y1 = y + h0 * k_[0];
    Matrix f1;
    gen_.derivative(y1, f1);
    ++stats_.evaluations;
    Matrix f0;
    gen_.derivative(y, f0);
    ++stats_.evaluations;
    const double d2 = error_norm(f1 - f0, y, y, rtol_, atol_) / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min(100.0 * h0, h1);
  }

  // One trial step from y; fills y_new_ and f_new_ (derivative at y_new_) and
  // returns the scaled error.
  double attempt(const Matrix& y, double h) {
    for (int i = 1; i <= 5; ++i) {
      tmp_ = y;
      for (int j = 0; j < i; ++j)
        if (a[i][j] != 0.0) tmp_ += (h * a[i][j]) * k_[static_cast<std::size_t>(j)];
      auto& k = k_[static_cast<std::size_t>(i)];
      if (lawson_) {
        scale(tmp_, c[i] * h, 1.0);
        eval(tmp_, k);
        scale(k, c[i] * h, -1.0);
      } else {
        eval(tmp_, k);
      }
    }
    y_new_ = y;
    for (int j = 0; j < 6; ++j)
      if (a[6][j] != 0.0) y_new_ += (h * a[6][j]) * k_[static_cast<std::size_t>(j)];
    if (lawson_) scale(y_new_, h, 1.0);
    eval(y_new_, f_new_);
    if (lawson_) {
      k_[6] = f_new_;
      scale(k_[6], h, -1.0);
    } else {
      k_[6] = f_new_;
    }
    tmp_ = Matrix::Zero(y.rows(), y.cols());
    for (int j = 0; j < 7; ++j)
      if (e[j] != 0.0) tmp_ += (h * e[j]) * k_[static_cast<std::size_t>(j)];
    if (lawson_) scale(tmp_, h, 1.0);
    return error_norm(tmp_, y, y_new_, rtol_, atol_);
  }

  const Superoperator& gen_;
  double rtol_;
  double atol_;
  bool lawson_;
  bool hermitian_ = false;
  IntegrationStats& stats_;
  double facold_ = 1e-4;
  bool rejected_last_ = false;
  std::array<Matrix, 7> k_;
  Matrix tmp_, y_new_, f_new_;
};

// Krylov approximation of exp(tau L) v with the local error estimate and
// step-size rule of Sidje's expv.
class KrylovStepper {
 public:
  KrylovStepper(const Superoperator& gen, double tol, IntegrationStats& stats, int m = 30)
      : gen_(gen), tol_(tol), stats_(stats), m_(m) {
    const auto& s = gen.sparse();
    RealVector colsum = RealVector::Zero(s.cols());
    for (Eigen::Index k = 0; k < s.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(s, k); it; ++it) colsum[k] += std::abs(it.value());
    anorm_ = std::max(colsum.maxCoeff(), 1e-300);
  }

  void run(Matrix& y, double t0, const std::vector<double>& times, const SnapshotObserver& observer) {
    const auto d = y.rows();
    Vector w = Eigen::Map<const Vector>(y.data(), y.size());
    std::size_t next = 0;
    while (next < times.size() && times[next] <= t0) observer(times[next++], y);
    double t = t0;
    double tau = -1.0;
    while (next < times.size()) {
      const double target = times[next];
      while (t < target) {
        const double beta = w.norm();
        if (beta == 0.0) {
          t = target;
          break;
        }
        if (tau <= 0.0) {
          const double xm = 1.0 / m_;
          const double fact = std::pow((m_ + 1.0) / std::exp(1.0), m_ + 1.0) *
                              std::sqrt(2.0 * M_PI * (m_ + 1.0));
          tau = (1.0 / anorm_) * std::pow((fact * tol_) / (4.0 * beta * anorm_), xm);
        }
        const double remaining = target - t;
        const bool clamp = tau >= remaining * (1.0 - 1e-12);
        double step = clamp ? remaining : tau;
        if (!std::isfinite(step) || step < 1e-14 * std::max(1.0, t))
          throw IntegrationError("Krylov step size underflow at T = " + std::to_string(t), t);
        double err_loc = 0.0;
        advance(w, beta, step, err_loc);
        t = clamp ? target : t + step;
        const double xm = 1.0 / m_;
        const double grow = 0.9 * step * std::pow(step * tol_ / std::max(err_loc, 1e-300), xm);
        tau = clamp ? std::max(tau, grow) : grow;
      }
      Matrix snap = Eigen::Map<const Matrix>(w.data(), d, d);
      observer(times[next++], snap);
      y = snap;
    }
  }

 private:
  // Advances w by `step` (shrinking it on rejection); returns the step used.
  void advance(Vector& w, double beta, double& step, double& err_loc) {
    const auto n = w.size();
    Matrix v(n, m_ + 1);
    Matrix h = Matrix::Zero(m_ + 2, m_ + 2);
    v.col(0) = w / beta;
    int mb = m_;
    bool happy = false;
    const double btol = 1e-12 * beta;
    Vector p;
    for (int j = 0; j < m_; ++j) {
      gen_.apply(v.col(j), p);
      ++stats_.evaluations;
      for (int i = 0; i <= j; ++i) {
        h(i, j) = v.col(i).dot(p);
        p -= h(i, j) * v.col(i);
      }
      const double s = p.norm();
      if (s < btol) {
        happy = true;
        mb = j + 1;
        break;
      }
      h(j + 1, j) = s;
      v.col(j + 1) = p / s;
    }
    double avnorm = 0.0;
    if (!happy) {
      h(m_ + 1, m_) = 1.0;
      gen_.apply(v.col(m_), p);
      ++stats_.evaluations;
      avnorm = p.norm();
    }
    const int mx = happy ? mb : m_ + 2;
    const double xm = 1.0 / m_;
    for (int attempt = 0;; ++attempt) {
      const Matrix f = (step * h.topLeftCorner(mx, mx)).exp();
      if (happy) {
        err_loc = btol;
      } else {
        const double phi1 = std::abs(beta * f(m_, 0));
        const double phi2 = std::abs(beta * f(m_ + 1, 0) * avnorm);
        if (phi1 > 10.0 * phi2) err_loc = phi2;
        else if (phi1 > phi2) err_loc = phi1 * phi2 / (phi1 - phi2);
        else err_loc = phi1;
      }
      if (err_loc <= 1.2 * step * tol_ || attempt > 20) {
        const int cols = std::min(mx, m_ + 1);
        w = beta * (v.leftCols(cols) * f.col(0).head(cols));
        ++stats_.accepted;
        return;
      }
      ++stats_.rejected;
      step = 0.9 * step * std::pow(step * tol_ / err_loc, xm);
    }
  }

  const Superoperator& gen_;
  double tol_;
  IntegrationStats& stats_;
  int m_;
  double anorm_{};
};

}  // namespace

void integrate(const Superoperator& gen, const DensityMatrix& rho0, const EvolutionGrid& grid,
               const SnapshotObserver& observer, Integrator method, IntegrationStats* stats) {
  grid.validate();
  if (rho0.dim() != gen.hilbert_dim())
    throw std::invalid_argument("integrate: initial state dimension does not match generator");
  IntegrationStats local;
  IntegrationStats& st = stats ? *stats : local;
  Matrix y = rho0.matrix();
  if (method == Integrator::dopri5 || method == Integrator::lawson) {
    Dopri5(gen, grid.rtol, grid.atol, method == Integrator::lawson, st)
        .run(y, 0.0, grid.output_times, observer);
  } else {
    KrylovStepper(gen, grid.atol, st).run(y, 0.0, grid.output_times, observer);
  }
}

std::vector<DensityMatrix> integrate(const Superoperator& gen, const DensityMatrix& rho0,
                                     const EvolutionGrid& grid, Integrator method,
                                     IntegrationStats* stats) {
  std::vector<DensityMatrix> out;
  out.reserve(grid.output_times.size());
  integrate(
      gen, rho0, grid, [&](double, const Matrix& rho) { out.emplace_back(rho); }, method, stats);
  return out;
}

DensityMatrix SpectralSolution::evaluate(double t) const {
  Vector weights(coefficients.size());
  for (Eigen::Index i = 0; i < coefficients.size(); ++i)
    weights[i] = coefficients[i] * std::exp(eigenvalues[i] * t);
  return DensityMatrix(devectorize(eigenvectors * weights));
}

SpectralSolution spectral_solve(const Superoperator& gen, const DensityMatrix& rho0,
                                double max_condition) {
  if (gen.n_sites() > 4) throw SpectralError("spectral solve is limited to four sites");
  if (rho0.dim() != gen.hilbert_dim())
    throw std::invalid_argument("spectral_solve: initial state dimension does not match generator");
  const Matrix l = gen.dense();
  Eigen::ComplexEigenSolver<Matrix> es(l, true);
  if (es.info() != Eigen::Success) throw SpectralError("eigendecomposition did not converge");

  SpectralSolution sol;
  sol.eigenvalues = es.eigenvalues();
  sol.eigenvectors = es.eigenvectors();
  Eigen::JacobiSVD<Matrix> svd(sol.eigenvectors);
  const auto& sv = svd.singularValues();
  sol.condition = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                          : std::numeric_limits<double>::infinity();
  if (!(sol.condition <= max_condition))
    throw SpectralError("eigenbasis is near-defective (condition number " +
                        std::to_string(sol.condition) + ")");
  sol.coefficients = sol.eigenvectors.partialPivLu().solve(vectorize(rho0));
  return sol;
}

namespace {

// Basis permutation induced by a site permutation: the bit of site s in a
// becomes the bit of site perm[s-1] in the image.
std::vector<std::size_t> basis_permutation(const std::vector<int>& perm, int n_sites) {
  const std::size_t d = std::size_t{1} << n_sites;
  std::vector<std::size_t> out(d, 0);
  for (std::size_t a = 0; a < d; ++a) {
    std::size_t image = 0;
    for (int s = 1; s <= n_sites; ++s)
      if (is_down(a, s, n_sites)) image |= std::size_t{1} << site_bit(perm[static_cast<std::size_t>(s - 1)], n_sites);
    out[a] = image;
  }
  return out;
}

struct OrbitPartition {
  std::vector<std::size_t> orbit_of;    // per Liouville index
  std::vector<std::size_t> rep;         // smallest member per orbit
  std::vector<std::vector<std::size_t>> members;
};

OrbitPartition pair_orbits(const std::vector<std::vector<std::size_t>>& group, std::size_t d) {
  const std::size_t n = d * d;
  OrbitPartition p;
  constexpr auto none = static_cast<std::size_t>(-1);
  p.orbit_of.assign(n, none);
  for (std::size_t x = 0; x < n; ++x) {
    if (p.orbit_of[x] != none) continue;
    const std::size_t id = p.rep.size();
    p.rep.push_back(x);
    p.members.emplace_back();
    const std::size_t row = x % d;
    const std::size_t col = x / d;
    for (const auto& g : group) {
      const std::size_t y = g[col] * d + g[row];
      if (p.orbit_of[y] == none) {
        p.orbit_of[y] = id;
        p.members.back().push_back(y);
      }
    }
  }
  return p;
}

void check_commutes(const Superoperator& gen, const std::vector<std::vector<std::size_t>>& group) {
  const std::size_t d = gen.hilbert_dim();
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> nd;
  Vector v(static_cast<Eigen::Index>(d * d));
  for (auto& x : v) x = cplx(nd(rng), nd(rng));
  const Vector lv = gen.sparse() * v;
  for (const auto& g : group) {
    Vector pv(v.size()), plv(v.size());
    for (std::size_t x = 0; x < d * d; ++x) {
      const std::size_t y = g[x / d] * d + g[x % d];
      pv[static_cast<Eigen::Index>(y)] = v[static_cast<Eigen::Index>(x)];
      plv[static_cast<Eigen::Index>(y)] = lv[static_cast<Eigen::Index>(x)];
    }
    const Vector lpv = gen.sparse() * pv;
    if ((lpv - plv).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + lv.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("steady_state: supplied site symmetry does not commute with the generator");
  }
}

// Solves the reduced bordered system with the row of `pinned` (a diagonal,
// single-member orbit) replaced by the trace constraint.
std::optional<Vector> bordered_solve(const SparseMatrix& reduced, const std::vector<double>& trace_row,
                                     std::size_t pinned) {
  const auto m = reduced.rows();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(reduced.nonZeros()) + trace_row.size());
  for (Eigen::Index k = 0; k < reduced.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(reduced, k); it; ++it)
      if (static_cast<std::size_t>(it.row()) != pinned) t.emplace_back(it.row(), it.col(), it.value());
  for (std::size_t o = 0; o < trace_row.size(); ++o)
    if (trace_row[o] != 0.0) t.emplace_back(static_cast<Eigen::Index>(pinned), static_cast<Eigen::Index>(o), trace_row[o]);
  SparseMatrix b(m, m);
  b.setFromTriplets(t.begin(), t.end());
  b.makeCompressed();
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(b);
  if (lu.info() != Eigen::Success) return std::nullopt;
  Vector rhs = Vector::Zero(m);
  rhs[static_cast<Eigen::Index>(pinned)] = 1.0;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) return std::nullopt;
  return x;
}

Matrix expand(const Vector& x, const OrbitPartition& orbits, std::size_t d) {
  Matrix rho(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t idx = 0; idx < d * d; ++idx)
    rho.data()[idx] = x[static_cast<Eigen::Index>(orbits.orbit_of[idx])];
  return rho;
}

int null_multiplicity(const Superoperator& gen) {
  if (gen.n_sites() > 4) return 2;
  Eigen::ComplexEigenSolver<Matrix> es(gen.dense(), false);
  int count = 0;
  for (const auto& ev : es.eigenvalues())
    if (std::abs(ev) < 1e-9) ++count;
  return std::max(count, 2);
}

}  // namespace

DensityMatrix steady_state(const Superoperator& gen, const SteadyStateOptions& options,
                           SteadyStateInfo* info) {
  const int n = gen.n_sites();
  const std::size_t d = gen.hilbert_dim();

  std::vector<std::vector<std::size_t>> group;
  for (const auto& perm : options.symmetries) {
    if (perm.size() != static_cast<std::size_t>(n))
      throw std::invalid_argument("steady_state: symmetry permutation has wrong length");
    group.push_back(basis_permutation(perm, n));
  }
  std::vector<std::size_t> identity(d);
  std::iota(identity.begin(), identity.end(), 0);
  if (std::find(group.begin(), group.end(), identity) == group.end()) group.push_back(identity);
  if (group.size() > 1) check_commutes(gen, group);

  const OrbitPartition orbits = pair_orbits(group, d);
  const std::size_t m = orbits.rep.size();

  // Column O of the reduced generator is L applied to the orbit indicator,
  // read off at each orbit representative.
  const SparseMatrix& l = gen.sparse();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(l.nonZeros()) / std::max<std::size_t>(1, group.size()) + m);
  Vector acc = Vector::Zero(static_cast<Eigen::Index>(d * d));
  std::vector<Eigen::Index> touched;
  for (std::size_t o = 0; o < m; ++o) {
    touched.clear();
    for (std::size_t x : orbits.members[o]) {
      for (SparseMatrix::InnerIterator it(l, static_cast<Eigen::Index>(x)); it; ++it) {
        if (acc[it.row()] == cplx{}) touched.push_back(it.row());
        acc[it.row()] += it.value();
      }
    }
    for (auto r : touched) {
      const auto ur = static_cast<std::size_t>(r);
      if (acc[r] != cplx{} && orbits.rep[orbits.orbit_of[ur]] == ur)
        t.emplace_back(static_cast<Eigen::Index>(orbits.orbit_of[ur]), static_cast<Eigen::Index>(o), acc[r]);
      acc[r] = cplx{};
    }
  }
  SparseMatrix reduced(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  reduced.setFromTriplets(t.begin(), t.end());

  std::vector<double> trace_row(m, 0.0);
  for (std::size_t a = 0; a < d; ++a) trace_row[orbits.orbit_of[a * d + a]] += 1.0;

  // Pin the all-up population, then probe again pinning the all-down one.
  const auto first = bordered_solve(reduced, trace_row, orbits.orbit_of[0]);
  const auto second = bordered_solve(reduced, trace_row, orbits.orbit_of[d * d - 1]);
  if (!first || !second)
    throw DegenerateSteadyState("steady state: bordered system is singular (degenerate kernel)",
                                null_multiplicity(gen));

  auto finish = [&](const Vector& x) {
    Matrix rho = expand(x, orbits, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return Matrix(rho / rho.trace());
  };
  const Matrix rho = finish(*first);
  const Matrix probe = finish(*second);
  const double mismatch = (rho - probe).cwiseAbs().maxCoeff();
  const Vector r = l * vectorize(rho);
  const double residual = r.cwiseAbs().maxCoeff();
  if (info) {
    info->residual = residual;
    info->probe_mismatch = mismatch;
    info->reduced_dim = m;
  }
  if (!(mismatch <= options.uniqueness_tol))
    throw DegenerateSteadyState("steady state: independent null-vector probes disagree by " +
                                    std::to_string(mismatch),
                                null_multiplicity(gen));
  if (!(residual <= options.residual_tol))
    throw std::runtime_error("steady state: residual " + std::to_string(residual) +
                             " above tolerance");
  return DensityMatrix(rho);
}

namespace {
double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }
}  // namespace

void ConvergenceTracker::push(double t, const Matrix& rho) {
  if (last_) diffs_.push_back(max_diff(rho, *last_));
  times_.push_back(t);
  last_ = rho;
}

ConvergenceResult ConvergenceTracker::result() const {
  ConvergenceResult res;
  if (times_.size() < 2) return res;
  const std::size_t w = std::min(window_, diffs_.size());
  res.converged = std::all_of(diffs_.end() - static_cast<std::ptrdiff_t>(w), diffs_.end(),
                              [&](double x) { return x < tol_; });
  if (!res.converged) return res;
  double tail = 0.0;
  std::size_t k = times_.size() - 1;
  while (k > 0 && tail + diffs_[k - 1] < tol_) tail += diffs_[--k];
  res.t_converged = times_[k];
  return res;
}

ConvergenceResult detect_convergence(const std::vector<Matrix>& series, const std::vector<double>& times,
                                     double tol, std::size_t window) {
  if (series.size() < 2) throw std::invalid_argument("detect_convergence needs at least two snapshots");
  if (series.size() != times.size())
    throw std::invalid_argument("detect_convergence: series and times differ in length");
  ConvergenceTracker tracker(tol, window);
  for (std::size_t k = 0; k < series.size(); ++k) tracker.push(times[k], series[k]);
  return tracker.result();
}

ConvergenceResult detect_convergence(const std::vector<DensityMatrix>& series,
                                     const std::vector<double>& times, double tol, std::size_t window) {
  std::vector<Matrix> m;
  m.reserve(series.size());
  for (const auto& s : series) m.push_back(s.matrix());
  return detect_convergence(m, times, tol, window);
}

}  // namespace trispin
