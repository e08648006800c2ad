#pragma once

#include <string_view>
#include <utility>
#include <vector>

#include "trispin/lattice.hpp"
#include "trispin/liouville.hpp"

namespace trispin {

enum class InitialState { separable, w_state, max_entangled };

// Accepts "separable", "w_state" (or "w") and "max_entangled".
InitialState parse_initial_state(std::string_view name);
std::string_view to_string(InitialState kind);

// |up...up>, the one-excitation W state, or a 1-2 Bell pair times |down...down>.
DensityMatrix initial_state(InitialState kind, int n_sites);

// Reduced state of (first, second); `first` is the more significant qubit of
// the 4x4 result.
DensityMatrix partial_trace(const DensityMatrix& rho, int first, int second);

// Wootters concurrence from the square roots of the eigenvalues of
// rho * (sy sy) rho^* (sy sy). Rejects states with an eigenvalue below
// -psd_tol.
double concurrence(const DensityMatrix& rho2, double psd_tol = 1e-8);

// Sum of squared concurrences between `site` and every other site.
double tau2(const DensityMatrix& rho, int site);

double spin_z(const DensityMatrix& rho, int site);

struct PairEntanglement {
  int i{};
  int j{};
  double value{};
  PairClass pair_class{};
};

std::vector<PairEntanglement> pair_entanglements(const DensityMatrix& rho, const LatticeSpec& lattice,
                                                 const std::vector<std::pair<int, int>>& pairs);

struct ObservableSet {
  std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 4}, {1, 5}, {1, 7}};
  std::vector<int> tau2_sites{1, 4};

  // All pairs of the lattice in lexicographic order.
  static ObservableSet all_pairs(const LatticeSpec& lattice, std::vector<int> tau2_sites = {1, 4});
};

struct ObservableRecord {
  double t{};
  std::vector<double> concurrences;  // one per ObservableSet::pairs entry
  std::vector<double> tau2;          // one per ObservableSet::tau2_sites entry
  std::vector<double> spin_z;        // sites 1..n
};

// Evaluates the set on one state, reusing pair concurrences between the
// pair list and the tau2 sums.
ObservableRecord measure(const DensityMatrix& rho, const ObservableSet& set, double t = 0.0);

}  // namespace trispin
