#include <doctest.h>

#include "oracles.hpp"
#include "trispin/observables.hpp"

using namespace trispin;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

Matrix bell_projector() {
  Vector psi = Vector::Zero(4);
  psi[1] = psi[2] = 1.0 / std::sqrt(2.0);  // |ud> + |du>
  return psi * psi.adjoint();
}

// Reference partial trace through an explicit site permutation and reshape.
Matrix reduce(const Matrix& rho, int n, int i, int j) {
  const std::size_t d = std::size_t{1} << n;
  Matrix out = Matrix::Zero(4, 4);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      auto bit = [n](std::size_t x, int s) { return (x >> (n - s)) & 1U; };
      bool same_rest = true;
      for (int s = 1; s <= n; ++s)
        if (s != i && s != j && bit(a, s) != bit(b, s)) same_rest = false;
      if (!same_rest) continue;
      const auto r = static_cast<Eigen::Index>(2 * bit(a, i) + bit(a, j));
      const auto c = static_cast<Eigen::Index>(2 * bit(b, i) + bit(b, j));
      out(r, c) += rho(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    }
  return out;
}

}  // namespace

TEST_SUITE("observables") {
  TEST_CASE("initial states") {
    const auto s = initial_state(InitialState::separable, 7);
    for (int k = 1; k <= 7; ++k) CHECK(spin_z(s, k) == 0.5);
    const auto w = initial_state(InitialState::w_state, 7);
    for (int k = 1; k <= 7; ++k) CHECK(spin_z(w, k) == doctest::Approx(-5.0 / 14.0).epsilon(1e-14));
    const auto m = initial_state(InitialState::max_entangled, 7);
    CHECK(max_diff(partial_trace(m, 1, 2).matrix(), bell_projector()) < 1e-15);
    CHECK(concurrence(partial_trace(m, 1, 2)) == doctest::Approx(1.0).epsilon(1e-12));
    const auto lat = build_triangular7();
    for (auto [i, j] : lat.all_pairs())
      if (!(i == 1 && j == 2)) CHECK(concurrence(partial_trace(m, i, j)) < 1e-12);
    for (auto kind : {InitialState::separable, InitialState::w_state, InitialState::max_entangled}) {
      const auto r = initial_state(kind, 4);
      CHECK(std::abs(r.trace() - 1.0) < 1e-15);
      CHECK(max_diff(r.matrix() * r.matrix(), r.matrix()) < 1e-15);
    }
    CHECK_THROWS_AS(parse_initial_state("ghz"), std::invalid_argument);
    CHECK(parse_initial_state("w") == InitialState::w_state);
    CHECK_THROWS_AS(initial_state(InitialState::max_entangled, 1), std::invalid_argument);
  }

  TEST_CASE("partial trace of a product state factorises") {
    std::mt19937_64 rng(3);
    std::vector<Matrix> locals;
    Matrix prod = Matrix::Identity(1, 1);
    for (int s = 0; s < 4; ++s) {
      locals.push_back(oracle::random_density(2, rng));
      prod = oracle::kron(prod, locals.back());
    }
    const DensityMatrix rho(prod);
    CHECK(max_diff(partial_trace(rho, 2, 4).matrix(), oracle::kron(locals[1], locals[3])) < 1e-15);
    CHECK(max_diff(partial_trace(rho, 4, 2).matrix(), oracle::kron(locals[3], locals[1])) < 1e-15);
    CHECK(concurrence(partial_trace(rho, 1, 3)) < 1e-12);
  }

  TEST_CASE("partial trace on random states") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 3 + trial % 3;
      const DensityMatrix rho(oracle::random_density(1 << n, rng));
      const int a = 1 + trial % n;
      const int b = a % n + 1;
      const int i = trial % 2 ? a : b;
      const int j = trial % 2 ? b : a;
      const auto red = partial_trace(rho, i, j);
      CHECK(max_diff(red.matrix(), reduce(rho.matrix(), n, i, j)) < 1e-14);
      CHECK(std::abs(red.trace() - 1.0) < 1e-12);
      CHECK(check_state(red).min_eigenvalue > -1e-10);
    }
    const auto rho = initial_state(InitialState::separable, 3);
    CHECK_THROWS_AS(partial_trace(rho, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, 1, 4), std::out_of_range);
  }

  TEST_CASE("concurrence: Bell, product and Werner states") {
    CHECK(concurrence(DensityMatrix(bell_projector())) == doctest::Approx(1.0).epsilon(1e-12));
    Vector phi = Vector::Zero(4);
    phi[0] = phi[3] = 1.0 / std::sqrt(2.0);
    const Matrix phi_plus = phi * phi.adjoint();
    const Matrix werner = 0.5 * phi_plus + 0.5 * Matrix::Identity(4, 4) / 4.0;
    CHECK(concurrence(DensityMatrix(werner)) == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(oracle::concurrence_rmatrix(werner) == doctest::Approx(0.25).epsilon(1e-10));
    for (int k = 0; k <= 10; ++k) {
      const double p = k / 10.0;
      const Matrix w = p * phi_plus + (1 - p) * Matrix::Identity(4, 4) / 4.0;
      CHECK(concurrence(DensityMatrix(w)) == doctest::Approx(std::max(0.0, (3 * p - 1) / 2)).epsilon(1e-12));
    }
    CHECK(concurrence(DensityMatrix(Matrix::Identity(4, 4) / 4.0)) == 0.0);
  }

  TEST_CASE("concurrence agrees with the R-matrix route on random states") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix rho = oracle::random_density(4, rng, 1 + trial % 4);
      CHECK(concurrence(DensityMatrix(rho)) == doctest::Approx(oracle::concurrence_rmatrix(rho)).epsilon(1e-7));
    }
  }

  TEST_CASE("concurrence invariances") {
    std::mt19937_64 rng(29);
    // Full-rank states: at rank-deficient states the measure is only
    // square-root continuous, so roundoff of 1e-16 moves it by ~1e-8.
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix rho = oracle::random_density(4, rng);
      const Matrix u = oracle::kron(oracle::random_unitary2(rng), oracle::random_unitary2(rng));
      const double c = concurrence(DensityMatrix(rho));
      CHECK(std::abs(concurrence(DensityMatrix(u * rho * u.adjoint())) - c) < 1e-9);
    }
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho(oracle::random_density(16, rng, 2));
      CHECK(concurrence(partial_trace(rho, 1, 3)) == concurrence(partial_trace(rho, 3, 1)));
    }
  }

  TEST_CASE("concurrence rejects invalid input") {
    Matrix neg = Matrix::Zero(4, 4);
    neg(0, 0) = 1.2;
    neg(3, 3) = -0.2;
    CHECK_THROWS_AS(concurrence(DensityMatrix(neg)), std::invalid_argument);
    CHECK_THROWS_AS(concurrence(DensityMatrix(Matrix::Identity(8, 8) / 8.0)), std::invalid_argument);
  }

  TEST_CASE("tau2") {
    CHECK(tau2(initial_state(InitialState::max_entangled, 7), 1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(tau2(initial_state(InitialState::separable, 7), 4) == 0.0);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const DensityMatrix rho(oracle::random_density(16, rng, 1));
      for (int s = 1; s <= 4; ++s) {
        const double t = tau2(rho, s);
        double mx = 0.0;
        for (int j = 1; j <= 4; ++j)
          if (j != s) mx = std::max(mx, std::pow(concurrence(partial_trace(rho, s, j)), 2));
        CHECK(t >= mx);
        CHECK(t <= 3.0);
      }
    }
  }

  TEST_CASE("spin expectation") {
    Matrix down = Matrix::Zero(8, 8);
    down(7, 7) = 1.0;
    for (int s = 1; s <= 3; ++s) CHECK(spin_z(DensityMatrix(down), s) == -0.5);
    std::mt19937_64 rng(37);
    const Matrix rho = oracle::random_density(8, rng);
    for (int s = 1; s <= 3; ++s) {
      const double ref = (rho * oracle::embed(oracle::sz(), s, 3)).trace().real();
      CHECK(spin_z(DensityMatrix(rho), s) == doctest::Approx(ref).epsilon(1e-13));
    }
    Matrix imag = Matrix::Zero(2, 2);
    imag(0, 0) = cplx(1.0, 1e-6);
    CHECK_THROWS_AS(spin_z(DensityMatrix(imag), 1), std::runtime_error);
  }

  TEST_CASE("measure combines the configured observables") {
    const auto rho = initial_state(InitialState::max_entangled, 7);
    const auto rec = measure(rho, ObservableSet{}, 3.5);
    CHECK(rec.t == 3.5);
    REQUIRE(rec.concurrences.size() == 4);
    CHECK(rec.concurrences[0] == doctest::Approx(1.0));
    CHECK(rec.tau2.size() == 2);
    CHECK(rec.tau2[0] == doctest::Approx(1.0));
    CHECK(rec.tau2[1] == 0.0);
    CHECK(rec.spin_z.size() == 7);
    const auto all = ObservableSet::all_pairs(build_triangular7());
    CHECK(all.pairs.size() == 21);
  }

  TEST_CASE("pair entanglement labels") {
    const auto lat = build_triangular7();
    const auto rho = initial_state(InitialState::max_entangled, 7);
    const auto pe = pair_entanglements(rho, lat, {{1, 2}, {1, 7}});
    REQUIRE(pe.size() == 2);
    CHECK(pe[0].pair_class == PairClass::nn);
    CHECK(pe[0].value == doctest::Approx(1.0));
    CHECK(pe[1].pair_class == PairClass::nnnn);
    CHECK(pe[1].value == 0.0);
  }
}
