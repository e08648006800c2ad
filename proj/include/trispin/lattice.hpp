#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace trispin {

// Distance class of a site pair. Sites are labelled 1..n throughout.
enum class PairClass { nn, nnn, nnnn };

std::string_view to_string(PairClass c);

struct Edge {
  int a{};
  int b{};
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class LatticeSpec {
 public:
  // Pair classes of non-adjacent pairs come from graph distance (2 -> nnn,
  // anything further -> nnnn) unless `pair_classes` is given explicitly as a
  // row-major n*n table.
  LatticeSpec(std::string name, int n_sites, std::vector<Edge> edges, int center = 0,
              std::vector<int> ring_order = {}, std::vector<PairClass> pair_classes = {});

  const std::string& name() const { return name_; }
  int n_sites() const { return n_sites_; }
  const std::vector<Edge>& edges() const { return edges_; }
  int center() const { return center_; }
  const std::vector<int>& ring_order() const { return ring_order_; }

  bool has_edge(int i, int j) const;
  std::vector<int> neighbors(int site) const;
  int degree(int site) const;
  PairClass pair_class(int i, int j) const;

  // All unordered pairs (i < j) in lexicographic order.
  std::vector<std::pair<int, int>> all_pairs() const;

  // Site permutations (perm[i-1] = image of site i) mapping the edge set onto
  // itself. Brute force over n!, intended for n <= 8.
  std::vector<std::vector<int>> automorphisms() const;

  void check_site(int site) const;

 private:
  std::string name_;
  int n_sites_;
  std::vector<Edge> edges_;
  int center_;
  std::vector<int> ring_order_;
  std::vector<char> adjacency_;
  std::vector<PairClass> classes_;
};

// Fixed seven-site triangular patch: centre 4, border ring 1-2-5-7-6-3.
LatticeSpec build_triangular7();

// Looks up a named preset: "triangular7", or the small test patches
// "chain2", "triangle3" and "star4" (triangle around centre 4).
LatticeSpec lattice_preset(std::string_view name);

struct FieldAssignment {
  std::vector<double> h;  // per-site z field, index site-1, units of omega
};

// Border sites get b1, the centre gets b2. A lattice without a centre gets b1
// everywhere.
FieldAssignment assign_fields(const LatticeSpec& lattice, double b1, double b2);

// Subset of automorphisms that also leave the field pattern unchanged.
std::vector<std::vector<int>> field_symmetries(const LatticeSpec& lattice,
                                               const FieldAssignment& fields);

}  // namespace trispin
