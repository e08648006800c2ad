#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trispin/evolve.hpp"
#include "trispin/lattice.hpp"
#include "trispin/observables.hpp"
#include "trispin/spin_ops.hpp"

namespace trispin {

struct FieldPair {
  double b1{};
  double b2{};
  bool operator==(const FieldPair&) const = default;
};

// Named preset or explicit (gamma, delta); `name` is "custom" for the latter.
struct AnisotropyChoice {
  std::string name;
  Anisotropy value;
  bool operator==(const AnisotropyChoice& o) const {
    return name == o.name && value.gamma == o.value.gamma && value.delta == o.value.delta;
  }
};

AnisotropyChoice anisotropy_choice(std::string_view preset);

enum class Backend { rk_adaptive, spectral, steady_only };

Backend parse_backend(std::string_view name);
std::string_view to_string(Backend b);
Integrator parse_integrator(std::string_view name);
std::string_view to_string(Integrator m);

struct OutputConfig {
  std::filesystem::path dir = "out";
  bool csv = true;
  bool json = true;
  bool operator==(const OutputConfig&) const = default;
};

// Edge-list lattice from the config file; active when `sites` > 0.
struct CustomLattice {
  int sites = 0;
  std::vector<std::pair<int, int>> edges;
  int center = 0;  // 0: no centre, every site gets B1
  bool operator==(const CustomLattice&) const = default;
};

struct RunConfig {
  std::string name = "run";
  std::string lattice = "triangular7";  // preset name, or "custom"
  CustomLattice custom_lattice;
  // Energies and rates in units of omega; omega itself fixes the time unit
  // T = omega t and does not enter the dimensionless generator.
  double J = 0.05;
  double omega = 1.0;
  double Gamma = 0.05;
  std::vector<AnisotropyChoice> anisotropies{anisotropy_choice("ising")};
  std::vector<FieldPair> fields{{1.0, 1.0}, {1.0, 0.1}, {0.1, 1.0}};
  std::vector<double> nbar{0.0, 0.001, 0.005, 0.01, 0.05, 0.1};
  std::vector<InitialState> initial_states{InitialState::max_entangled};
  double t_max = 1000.0;
  std::size_t points = 2000;
  double rtol = 1e-8;
  double atol = 1e-10;
  Backend backend = Backend::rk_adaptive;
  Integrator integrator = Integrator::dopri5;
  std::vector<std::pair<int, int>> pairs{{1, 2}, {1, 4}, {1, 5}, {1, 7}};
  std::vector<int> tau2_sites{1, 4};
  bool all_pairs = false;
  double convergence_tol = 1e-9;
  std::size_t convergence_window = 10;
  OutputConfig output;
  int threads = 1;

  LatticeSpec lattice_spec() const;
  EvolutionGrid grid() const;
  ObservableSet observable_set(const LatticeSpec& lattice) const;
  std::size_t point_count() const;

  bool operator==(const RunConfig&) const = default;
};

// Error in a config document; line is 1-based, 0 when not attributable.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line);
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  std::string message_;
  int line_;
};

// YAML document; every key is optional and unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical YAML form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

// Range and consistency checks; throws ConfigError with line 0.
void validate_config(const RunConfig& cfg);

// "paper range" for 0 <= nbar <= 0.1, otherwise "extrapolated".
std::string_view nbar_range_label(double nbar);

// Shortest decimal text that reads back to the same double.
std::string format_shortest(double v);

}  // namespace trispin
