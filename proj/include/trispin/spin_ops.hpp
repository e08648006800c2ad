#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "trispin/lattice.hpp"
#include "trispin/types.hpp"

namespace trispin {

enum class SpinOp { Sx, Sy, Sz, Splus, Sminus };

struct Anisotropy {
  double gamma{};
  double delta{};
};

// "ising" (1, 0), "xxx" (0, 0.5), "xyz" (0.5, 1).
Anisotropy anisotropy_preset(std::string_view name);

// All energies and rates in units of omega; hbar = k_B = 1.
struct ModelParams {
  double gamma = 1.0;
  double delta = 0.0;
  double J = 0.05;
  double omega = 1.0;
  double Gamma = 0.05;
  double nbar = 0.0;
  double B1 = 1.0;
  double B2 = 1.0;

  void validate() const;
};

// Operator on the 2^n dimensional many-body space. Basis index bit (n - site)
// holds the state of `site`; bit value 0 is spin up, so site 1 is the most
// significant bit and |up up ... up> is index 0.
struct ManyBodyOperator {
  int n_sites{};
  SparseMatrix matrix;

  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
  Matrix dense() const { return Matrix(matrix); }
};

inline int site_bit(int site, int n_sites) { return n_sites - site; }
inline bool is_down(std::size_t index, int site, int n_sites) {
  return ((index >> site_bit(site, n_sites)) & 1U) != 0;
}

ManyBodyOperator site_operator(SpinOp kind, int site, int n_sites);

// XYZ exchange on every lattice edge plus the site-resolved z field.
ManyBodyOperator build_hamiltonian(const ModelParams& params, const LatticeSpec& lattice,
                                   const FieldAssignment& fields);

struct JumpOperator {
  int site{};
  SpinOp kind{};       // Sminus (thermal relaxation) or Splus (thermal excitation)
  double coefficient{}; // prefactor multiplying the bare spin operator
  ManyBodyOperator op;
};

// Thermal jump set: sqrt(Gamma (nbar+1)) S^-_k for k = 1..n, then
// sqrt(Gamma nbar) S^+_k for k = 1..n. Zero-coefficient entries are kept.
std::vector<JumpOperator> build_lindblad_ops(const ModelParams& params, int n_sites);

}  // namespace trispin
