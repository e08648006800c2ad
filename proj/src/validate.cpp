#include <cmath>
#include <random>

#include "trispin/runner.hpp"

namespace trispin {

namespace {

OracleCheck check(std::string name, double measured, double tol) {
  return {std::move(name), measured, tol, measured < tol};
}

Superoperator single_spin(double gamma_rate, double nbar) {
  ModelParams p;
  p.Gamma = gamma_rate;
  p.nbar = nbar;
  ManyBodyOperator h{1, SparseMatrix(2, 2)};
  return build_liouvillian(h, build_lindblad_ops(p, 1));
}

double sz1(const Matrix& rho) { return 0.5 * (rho(0, 0).real() - rho(1, 1).real()); }

double max_entry(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

std::vector<OracleCheck> validate() {
  std::vector<OracleCheck> out;
  const double gamma_rate = 0.05;

  // Two-level relaxation towards -1/(2(2n+1)) at rate Gamma(2n+1).
  for (double nbar : {0.0, 0.05}) {
    const auto gen = single_spin(gamma_rate, nbar);
    const auto grid = EvolutionGrid::uniform(100.0, 200);
    const double s_inf = -0.5 / (2.0 * nbar + 1.0);
    double err = 0.0;
    integrate(gen, initial_state(InitialState::separable, 1), grid, [&](double t, const Matrix& rho) {
      const double exact = s_inf + std::exp(-gamma_rate * (2.0 * nbar + 1.0) * t) * (0.5 - s_inf);
      err = std::max(err, std::abs(sz1(rho) - exact));
    });
    out.push_back(check("single-spin <Sz>(t), nbar=" + format_shortest(nbar), err, 1e-8));
  }
  for (double nbar : {0.0, 0.01, 0.05, 0.1}) {
    const auto ss = steady_state(single_spin(gamma_rate, nbar));
    out.push_back(check("single-spin steady <Sz>, nbar=" + format_shortest(nbar),
                        std::abs(sz1(ss.matrix()) + 0.5 / (2.0 * nbar + 1.0)), 1e-9));
  }

  // Werner states p |Phi+><Phi+| + (1-p) I/4 against max(0, (3p-1)/2).
  {
    Vector phi = Vector::Zero(4);
    phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
    const Matrix bell = phi * phi.adjoint();
    double err = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double p = k / 20.0;
      const Matrix w = p * bell + (1.0 - p) * Matrix::Identity(4, 4) / 4.0;
      err = std::max(err, std::abs(concurrence(DensityMatrix(w)) - std::max(0.0, (3.0 * p - 1.0) / 2.0)));
    }
    out.push_back(check("Werner-state concurrence", err, 1e-10));
  }

  // Integrator, spectral expansion and steady-state solver on random small systems.
  {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const char* lattices[] = {"chain2", "triangle3"};
    double traj_err = 0.0;
    double ss_err = 0.0;
    CptpSummary cptp;
    for (int draw = 0; draw < 20; ++draw) {
      const auto lattice = lattice_preset(lattices[draw % 2]);
      ModelParams p;
      p.gamma = unit(rng);
      p.delta = 2.0 * unit(rng) - 0.5;
      p.nbar = 0.1 * unit(rng);
      const auto fields = assign_fields(lattice, unit(rng), unit(rng));
      const auto gen = build_liouvillian(build_hamiltonian(p, lattice, fields), build_lindblad_ops(p, lattice.n_sites()));
      const auto kind = draw % 3 == 0 ? InitialState::separable
                        : draw % 3 == 1 ? InitialState::w_state
                                        : InitialState::max_entangled;
      const auto rho0 = initial_state(kind, lattice.n_sites());
      const auto sol = spectral_solve(gen, rho0);
      const auto grid = EvolutionGrid::uniform(90.0, 9);
      integrate(gen, rho0, grid, [&](double t, const Matrix& rho) {
        cptp.add(check_state(DensityMatrix(rho)));
        traj_err = std::max(traj_err, max_entry(rho - sol.evaluate(t).matrix()));
      });
      ss_err = std::max(ss_err, max_entry(steady_state(gen).matrix() - sol.evaluate(1e4).matrix()));
    }
    out.push_back(check("integrator vs spectral, 20 draws", traj_err, 1e-8));
    out.push_back(check("steady_state vs spectral at T=1e4", ss_err, 1e-8));
    out.push_back(check("CPTP along random trajectories (trace)", cptp.max_trace_error, 1e-10));
    out.push_back(check("CPTP along random trajectories (hermiticity)", cptp.max_hermiticity, 1e-10));
    out.push_back(check("CPTP along random trajectories (-min eigenvalue)", -cptp.min_eigenvalue, 1e-8));
  }

  // Border orbit of the seven-site patch: homogeneous field, all-up start.
  {
    const auto lattice = build_triangular7();
    ModelParams p;
    p.gamma = 0.5;
    p.delta = 1.0;
    p.nbar = 0.01;
    const auto fields = assign_fields(lattice, 1.0, 1.0);
    const auto gen = build_liouvillian(build_hamiltonian(p, lattice, fields), build_lindblad_ops(p, 7));
    double spread = 0.0;
    integrate(gen, initial_state(InitialState::separable, 7), EvolutionGrid::uniform(20.0, 40),
              [&](double, const Matrix& rho) {
                const DensityMatrix r(rho);
                double lo = 1.0;
                double hi = -1.0;
                for (int s : lattice.ring_order()) {
                  const double v = spin_z(r, s);
                  lo = std::min(lo, v);
                  hi = std::max(hi, v);
                }
                spread = std::max(spread, hi - lo);
              });
    out.push_back(check("border <Sz> orbit, seven sites", spread, 1e-9));
  }
  return out;
}

}  // namespace trispin
