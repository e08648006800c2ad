#include "trispin/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace trispin {

std::string_view to_string(PairClass c) {
  switch (c) {
    case PairClass::nn: return "nn";
    case PairClass::nnn: return "nnn";
    case PairClass::nnnn: return "nnnn";
  }
  return "?";
}

LatticeSpec::LatticeSpec(std::string name, int n_sites, std::vector<Edge> edges, int center,
                         std::vector<int> ring_order, std::vector<PairClass> pair_classes)
    : name_(std::move(name)),
      n_sites_(n_sites),
      center_(center),
      ring_order_(std::move(ring_order)) {
  if (n_sites < 2 || n_sites > 12)
    throw std::invalid_argument("lattice: site count must be in [2, 12]");
  if (center < 0 || center > n_sites) throw std::invalid_argument("lattice: centre out of range");
  for (int s : ring_order_) check_site(s);

  adjacency_.assign(static_cast<std::size_t>(n_sites * n_sites), 0);
  for (auto e : edges) {
    check_site(e.a);
    check_site(e.b);
    if (e.a == e.b) throw std::invalid_argument("lattice: self loop on site " + std::to_string(e.a));
    if (e.a > e.b) std::swap(e.a, e.b);
    auto& slot = adjacency_[static_cast<std::size_t>((e.a - 1) * n_sites + (e.b - 1))];
    if (slot) throw std::invalid_argument("lattice: duplicate edge");
    slot = 1;
    adjacency_[static_cast<std::size_t>((e.b - 1) * n_sites + (e.a - 1))] = 1;
    edges_.push_back(e);
  }
  std::sort(edges_.begin(), edges_.end());

  if (!pair_classes.empty()) {
    if (pair_classes.size() != static_cast<std::size_t>(n_sites * n_sites))
      throw std::invalid_argument("lattice: pair class table has wrong size");
    classes_ = std::move(pair_classes);
    for (int i = 1; i <= n_sites; ++i)
      for (int j = 1; j <= n_sites; ++j)
        if (i != j && classes_[static_cast<std::size_t>((i - 1) * n_sites + (j - 1))] !=
                          classes_[static_cast<std::size_t>((j - 1) * n_sites + (i - 1))])
          throw std::invalid_argument("lattice: pair class table is not symmetric");
    return;
  }

  classes_.assign(static_cast<std::size_t>(n_sites * n_sites), PairClass::nnnn);
  for (int src = 1; src <= n_sites; ++src) {
    std::vector<int> dist(static_cast<std::size_t>(n_sites), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(src - 1)] = 0;
    q.push(src);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : neighbors(u)) {
        if (dist[static_cast<std::size_t>(v - 1)] < 0) {
          dist[static_cast<std::size_t>(v - 1)] = dist[static_cast<std::size_t>(u - 1)] + 1;
          q.push(v);
        }
      }
    }
    for (int dst = 1; dst <= n_sites; ++dst) {
      int d = dist[static_cast<std::size_t>(dst - 1)];
      auto& c = classes_[static_cast<std::size_t>((src - 1) * n_sites + (dst - 1))];
      c = d == 1 ? PairClass::nn : d == 2 ? PairClass::nnn : PairClass::nnnn;
    }
  }
}

void LatticeSpec::check_site(int site) const {
  if (site < 1 || site > n_sites_)
    throw std::out_of_range("site " + std::to_string(site) + " outside 1.." +
                            std::to_string(n_sites_));
}

bool LatticeSpec::has_edge(int i, int j) const {
  check_site(i);
  check_site(j);
  return adjacency_[static_cast<std::size_t>((i - 1) * n_sites_ + (j - 1))] != 0;
}

std::vector<int> LatticeSpec::neighbors(int site) const {
  check_site(site);
  std::vector<int> out;
  for (int j = 1; j <= n_sites_; ++j)
    if (adjacency_[static_cast<std::size_t>((site - 1) * n_sites_ + (j - 1))]) out.push_back(j);
  return out;
}

int LatticeSpec::degree(int site) const { return static_cast<int>(neighbors(site).size()); }

PairClass LatticeSpec::pair_class(int i, int j) const {
  check_site(i);
  check_site(j);
  if (i == j) throw std::invalid_argument("pair_class: sites must differ");
  return classes_[static_cast<std::size_t>((i - 1) * n_sites_ + (j - 1))];
}

std::vector<std::pair<int, int>> LatticeSpec::all_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= n_sites_; ++i)
    for (int j = i + 1; j <= n_sites_; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<std::vector<int>> LatticeSpec::automorphisms() const {
  std::vector<int> perm(static_cast<std::size_t>(n_sites_));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    bool ok = std::all_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
      return has_edge(perm[static_cast<std::size_t>(e.a - 1)], perm[static_cast<std::size_t>(e.b - 1)]);
    });
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

LatticeSpec build_triangular7() {
  const std::vector<int> ring{1, 2, 5, 7, 6, 3};
  constexpr int center = 4;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k < ring.size(); ++k) edges.push_back({ring[k], ring[(k + 1) % ring.size()]});
  for (int b : ring) edges.push_back({center, b});

  // Border pairs are classified by ring separation; the centre is nn to all.
  constexpr int n = 7;
  std::vector<PairClass> classes(n * n, PairClass::nn);
  auto pos = [&](int s) {
    return static_cast<int>(std::find(ring.begin(), ring.end(), s) - ring.begin());
  };
  for (int i : ring) {
    for (int j : ring) {
      if (i == j) continue;
      int d = std::abs(pos(i) - pos(j));
      d = std::min(d, 6 - d);
      classes[static_cast<std::size_t>((i - 1) * n + (j - 1))] =
          d == 1 ? PairClass::nn : d == 2 ? PairClass::nnn : PairClass::nnnn;
    }
  }
  return LatticeSpec("triangular7", n, std::move(edges), center, ring, std::move(classes));
}

LatticeSpec lattice_preset(std::string_view name) {
  if (name == "triangular7") return build_triangular7();
  if (name == "chain2") return LatticeSpec("chain2", 2, {{1, 2}});
  if (name == "triangle3") return LatticeSpec("triangle3", 3, {{1, 2}, {2, 3}, {1, 3}}, 0, {1, 2, 3});
  // Border triangle 1-2-3 around centre 4.
  if (name == "star4")
    return LatticeSpec("star4", 4, {{1, 2}, {2, 3}, {1, 3}, {1, 4}, {2, 4}, {3, 4}}, 4, {1, 2, 3});
  throw std::invalid_argument("unknown lattice preset '" + std::string(name) + "'");
}

FieldAssignment assign_fields(const LatticeSpec& lattice, double b1, double b2) {
  if (b1 < 0.0 || b2 < 0.0) throw std::invalid_argument("field strengths must be non-negative");
  FieldAssignment f;
  f.h.assign(static_cast<std::size_t>(lattice.n_sites()), b1);
  if (lattice.center() > 0) f.h[static_cast<std::size_t>(lattice.center() - 1)] = b2;
  return f;
}

std::vector<std::vector<int>> field_symmetries(const LatticeSpec& lattice,
                                               const FieldAssignment& fields) {
  if (fields.h.size() != static_cast<std::size_t>(lattice.n_sites()))
    throw std::invalid_argument("field_symmetries: field vector does not match lattice");
  std::vector<std::vector<int>> out;
  for (auto& p : lattice.automorphisms()) {
    bool ok = true;
    for (std::size_t i = 0; i < p.size() && ok; ++i)
      ok = fields.h[i] == fields.h[static_cast<std::size_t>(p[i] - 1)];
    if (ok) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace trispin
