#include "trispin/runner.hpp"

#include <map>

namespace trispin {

namespace {

const std::vector<double> kNbarTo01{0.0, 0.001, 0.005, 0.01, 0.05, 0.1};
const std::vector<double> kNbarTo005{0.0, 0.001, 0.005, 0.01, 0.05};
const std::vector<double> kNbarTo001{0.0, 0.001, 0.005, 0.01};
const std::vector<FieldPair> kAllFields{{1.0, 1.0}, {1.0, 0.1}, {0.1, 1.0}};

struct Entry {
  const char* preset;
  std::vector<FieldPair> fields;
  std::vector<double> nbar;
  std::vector<InitialState> states;
  std::vector<std::string> focus;
  const char* description;
};

using S = InitialState;

const std::map<std::string, Entry, std::less<>>& table() {
  static const std::map<std::string, Entry, std::less<>> t{
      {"fig2", {"ising", kAllFields, kNbarTo01, {S::max_entangled}, {"C_1_2"}, "Ising C12 from the Bell-pair state"}},
      {"fig3", {"ising", kAllFields, kNbarTo005, {S::max_entangled}, {"C_1_4"}, "Ising C14 from the Bell-pair state"}},
      {"fig4", {"ising", kAllFields, kNbarTo005, {S::max_entangled}, {"C_1_5", "C_1_7"}, "Ising C15 from the Bell-pair state"}},
      {"fig5", {"ising", kAllFields, kNbarTo01, {S::max_entangled}, {"tau2_1"}, "Ising tau2 of site 1 from the Bell-pair state"}},
      {"fig6", {"ising", kAllFields, kNbarTo01, {S::max_entangled}, {"tau2_4"}, "Ising tau2 of site 4 from the Bell-pair state"}},
      {"fig7", {"ising", kAllFields, kNbarTo01, {S::separable}, {"C_1_2"}, "Ising C12 from the all-up state"}},
      {"fig8", {"ising", kAllFields, kNbarTo005, {S::separable}, {"C_1_4", "C_1_5"}, "Ising C14 and C15 from the all-up state"}},
      {"fig9", {"xyz", kAllFields, kNbarTo005, {S::max_entangled}, {"C_1_2"}, "XYZ C12 from the Bell-pair state"}},
      {"fig10", {"xyz", kAllFields, kNbarTo01, {S::max_entangled}, {"C_1_4"}, "XYZ C14 from the Bell-pair state"}},
      {"fig11", {"xyz", kAllFields, kNbarTo01, {S::max_entangled}, {"C_1_5"}, "XYZ C15 from the Bell-pair state"}},
      {"fig12", {"xyz", kAllFields, kNbarTo005, {S::max_entangled}, {"C_1_7"}, "XYZ C17 from the Bell-pair state"}},
      {"fig13", {"xyz", kAllFields, kNbarTo005, {S::max_entangled}, {"tau2_1"}, "XYZ tau2 of site 1 from the Bell-pair state"}},
      {"fig14", {"xyz", kAllFields, kNbarTo01, {S::max_entangled}, {"tau2_4"}, "XYZ tau2 of site 4 from the Bell-pair state"}},
      {"fig15", {"xyz", kAllFields, kNbarTo005, {S::separable, S::max_entangled}, {"C_1_2"}, "XYZ C12 from both initial states"}},
      {"fig16", {"xxx", kAllFields, {0.0, 0.01}, {S::max_entangled}, {"C_1_2", "C_1_4"}, "XXX C12 and C14; the panels are a subset of this grid"}},
      {"fig17", {"ising", {{1.0, 1.0}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "Ising spin relaxation, B1=1, B2=1"}},
      {"fig18", {"ising", {{1.0, 0.1}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "Ising spin relaxation, B1=1, B2=0.1"}},
      {"fig19", {"ising", {{0.1, 1.0}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "Ising spin relaxation, B1=0.1, B2=1"}},
      {"fig20", {"xyz", {{1.0, 1.0}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "XYZ spin relaxation, B1=1, B2=1"}},
      {"fig21", {"xyz", {{1.0, 0.1}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "XYZ spin relaxation, B1=1, B2=0.1"}},
      {"fig22", {"xyz", {{0.1, 1.0}}, kNbarTo001, {S::max_entangled, S::separable}, {"Sz_1", "Sz_4"}, "XYZ spin relaxation, B1=0.1, B2=1"}},
      {"fig23", {"xxx", kAllFields, {0.0, 0.01}, {S::max_entangled}, {"Sz_1", "Sz_4"}, "XXX spin relaxation; the panels are a subset of this grid"}},
  };
  return t;
}

}  // namespace

std::vector<std::string> recipe_names() {
  std::vector<std::string> names;
  for (int k = 2; k <= 23; ++k) names.push_back("fig" + std::to_string(k));
  return names;
}

Recipe recipe(std::string_view name) {
  const auto& t = table();
  const auto it = t.find(name);
  if (it == t.end()) throw std::invalid_argument("unknown recipe '" + std::string(name) + "' (expected fig2 .. fig23)");
  const Entry& e = it->second;
  Recipe r;
  r.name = it->first;
  r.description = e.description;
  r.focus = e.focus;
  r.config.name = it->first;
  r.config.anisotropies = {anisotropy_choice(e.preset)};
  r.config.fields = e.fields;
  r.config.nbar = e.nbar;
  r.config.initial_states = e.states;
  r.config.output.dir = std::string("out/") + it->first;
  return r;
}

}  // namespace trispin
