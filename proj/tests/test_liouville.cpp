#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "oracles.hpp"
#include "trispin/liouville.hpp"

using namespace trispin;

namespace {

double max_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

struct Model {
  LatticeSpec lattice;
  ModelParams params;
  FieldAssignment fields;
  Superoperator gen;
  oracle::Mat h;
  std::vector<oracle::Mat> ls;
};

Model make(const char* lattice_name, const char* preset, double nbar, double b1, double b2) {
  auto lat = lattice_preset(lattice_name);
  ModelParams p;
  const auto a = anisotropy_preset(preset);
  p.gamma = a.gamma;
  p.delta = a.delta;
  p.nbar = nbar;
  auto f = assign_fields(lat, b1, b2);
  auto gen = build_liouvillian(build_hamiltonian(p, lat, f), build_lindblad_ops(p, lat.n_sites()));
  std::vector<oracle::Bond> bonds;
  for (auto e : lat.edges()) bonds.push_back({e.a, e.b});
  const int n = lat.n_sites();
  auto h = oracle::hamiltonian(bonds, n, p.gamma, p.delta, p.J, f.h);
  auto ls = oracle::jumps(n, p.Gamma, p.nbar);
  return {std::move(lat), p, std::move(f), std::move(gen), std::move(h), std::move(ls)};
}

}  // namespace

TEST_SUITE("liouville") {
  TEST_CASE("column-stacking convention") {
    Matrix m(2, 2);
    m << 1, 2, 3, 4;
    const Vector v = vectorize(m);
    CHECK(v[0] == cplx(1));
    CHECK(v[1] == cplx(3));
    CHECK(v[2] == cplx(2));
    CHECK(v[3] == cplx(4));
    CHECK(max_diff(devectorize(v), m) == 0.0);
  }

  TEST_CASE("single-spin amplitude damping generator") {
    ModelParams p;
    p.Gamma = 0.3;
    const auto gen = build_liouvillian(ManyBodyOperator{1, SparseMatrix(2, 2)}, build_lindblad_ops(p, 1));
    // vec = (rho_uu, rho_du, rho_ud, rho_dd)
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = -0.3;
    expect(1, 1) = -0.15;
    expect(2, 2) = -0.15;
    expect(3, 0) = 0.3;
    CHECK(max_diff(gen.dense(), expect) < 1e-16);
  }

  TEST_CASE("dense generator matches the Kronecker formula") {
    for (const char* preset : {"ising", "xxx", "xyz"}) {
      const auto m = make("star4", preset, 0.03, 0.4, 1.3);
      CHECK(max_diff(m.gen.dense(), oracle::liouvillian(m.h, m.ls)) < 1e-15);
    }
  }

  TEST_CASE("matrix-free kernel matches the matrix form of the master equation") {
    std::mt19937_64 rng(7);
    const auto m = make("triangular7", "xyz", 0.05, 0.1, 1.0);
    const Matrix rho = oracle::random_density(128, rng);
    Matrix out;
    m.gen.derivative(rho, out);
    const Matrix ref = oracle::lindblad_rhs(m.h, m.ls, rho);
    CHECK(max_diff(out, ref) < 1e-14);

    Matrix herm;
    m.gen.derivative(rho, herm, {false, true});
    CHECK(max_diff(herm, ref) < 1e-14);

    const Vector v = vectorize(rho);
    CHECK((apply_liouvillian(m.gen, v, Representation::sparse) - vectorize(ref)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((apply_liouvillian(m.gen, v, Representation::matrix_free) - vectorize(ref)).cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("non-Hermitian input through the general kernel") {
    std::mt19937_64 rng(9);
    const auto m = make("star4", "ising", 0.1, 1.0, 0.1);
    std::normal_distribution<double> nd;
    Matrix x(16, 16);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = cplx(nd(rng), nd(rng));
    Matrix out;
    m.gen.derivative(x, out);
    CHECK(max_diff(out, oracle::lindblad_rhs(m.h, m.ls, x)) < 1e-14);
  }

  TEST_CASE("generator is trace preserving and Hermiticity preserving") {
    const auto m = make("star4", "xyz", 0.07, 1.0, 0.1);
    const Matrix l = m.gen.dense();
    const Vector id = vectorize(Matrix(Matrix::Identity(16, 16)));
    CHECK((id.adjoint() * l).cwiseAbs().maxCoeff() < 1e-15);
    std::mt19937_64 rng(3);
    const Matrix rho = oracle::random_density(16, rng);
    const Matrix d = devectorize(l * vectorize(rho));
    CHECK(max_diff(d, d.adjoint()) < 1e-16);
  }

  TEST_CASE("dense path is gated to four sites") {
    const auto m = make("triangular7", "ising", 0.0, 1.0, 1.0);
    CHECK_THROWS_AS(m.gen.dense(), std::length_error);
    CHECK_THROWS_AS(apply_liouvillian(m.gen, Vector::Zero(10)), std::invalid_argument);
  }

  TEST_CASE("state checks") {
    std::mt19937_64 rng(5);
    const DensityMatrix rho(oracle::random_density(8, rng));
    const auto r = check_state(rho);
    CHECK(r.ok());
    CHECK(r.trace_error < 1e-14);
    CHECK(r.min_eigenvalue > 0.0);

    Matrix bad = rho.matrix();
    bad(0, 1) += 1e-6;
    CHECK(check_state(DensityMatrix(bad)).hermiticity == doctest::Approx(1e-6));
    CHECK_FALSE(check_state(DensityMatrix(bad)).ok());

    Matrix neg = Matrix::Zero(4, 4);
    neg(0, 0) = 1.1;
    neg(3, 3) = -0.1;
    CHECK(check_state(DensityMatrix(neg)).min_eigenvalue == doctest::Approx(-0.1));

    CHECK_THROWS_AS(DensityMatrix(Matrix::Zero(3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(Matrix::Zero(2, 4)), std::invalid_argument);
  }

  TEST_CASE("block-wise minimum eigenvalue agrees with a full eigensolve") {
    std::mt19937_64 rng(11);
    Matrix m = Matrix::Zero(16, 16);
    // Two interleaved blocks plus an isolated diagonal entry.
    const Matrix a = oracle::random_density(7, rng);
    const Matrix b = oracle::random_density(8, rng, 3) - 0.02 * Matrix::Identity(8, 8);
    const int ia[7] = {0, 2, 4, 6, 8, 10, 12};
    const int ib[8] = {1, 3, 5, 7, 9, 11, 13, 14};
    for (int r = 0; r < 7; ++r)
      for (int c = 0; c < 7; ++c) m(ia[r], ia[c]) = a(r, c);
    for (int r = 0; r < 8; ++r)
      for (int c = 0; c < 8; ++c) m(ib[r], ib[c]) = b(r, c);
    m(15, 15) = 0.3;
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    CHECK(check_state(DensityMatrix(m)).min_eigenvalue == doctest::Approx(es.eigenvalues().minCoeff()).epsilon(1e-12));
  }

  TEST_CASE("trace distance") {
    Matrix up = Matrix::Zero(2, 2);
    up(0, 0) = 1;
    Matrix down = Matrix::Zero(2, 2);
    down(1, 1) = 1;
    CHECK(trace_distance(DensityMatrix(up), DensityMatrix(down)) == doctest::Approx(1.0));
    CHECK(trace_distance(DensityMatrix(up), DensityMatrix(up)) == 0.0);
    CHECK_THROWS_AS(trace_distance(DensityMatrix(up), DensityMatrix(Matrix::Identity(4, 4))), std::invalid_argument);
  }

  TEST_CASE("a sign-flipped dissipator is caught by the state checks") {
    const auto m = make("chain2", "xyz", 0.05, 1.0, 1.0);
    const auto d = m.h.rows();
    const oracle::Mat id = oracle::Mat::Identity(d, d);
    oracle::Mat flipped = oracle::cplx(0, -1) * (oracle::kron(id, m.h) - oracle::kron(m.h.transpose(), id));
    for (const auto& L : m.ls) {
      const oracle::Mat LdL = L.adjoint() * L;
      flipped += -oracle::kron(L.conjugate(), L) - 0.5 * oracle::kron(id, LdL) - 0.5 * oracle::kron(LdL.transpose(), id);
    }
    Matrix rho0 = Matrix::Zero(4, 4);
    rho0(0, 0) = 1;
    const Matrix good = devectorize((m.gen.dense() * 20.0).exp() * vectorize(rho0));
    const Matrix bad = devectorize((flipped * 20.0).exp() * vectorize(rho0));
    CHECK(check_state(DensityMatrix(good)).ok());
    CHECK_FALSE(check_state(DensityMatrix(bad)).ok());
    CHECK(check_state(DensityMatrix(bad)).trace_error > 0.1);
  }
}
