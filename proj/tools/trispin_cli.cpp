#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

#include "trispin/runner.hpp"

using namespace trispin;

namespace {

struct Overrides {
  std::string config_path;
  std::string out;
  std::string backend;
  int threads = 0;
  std::vector<std::string> presets;
  std::vector<double> b1;
  std::vector<double> b2;
  std::vector<double> nbar;
  std::vector<std::string> initial;
  double t_max = 0.0;
  std::size_t points = 0;
  bool all_pairs = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--backend", o.backend, "rk-adaptive | spectral | steady-only");
  cmd->add_option("--threads", o.threads, "Worker threads for sweep points")->check(CLI::PositiveNumber);
}

void add_axes(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config_path, "YAML run config")->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.presets, "Anisotropy preset(s): ising, xyz, xxx");
  cmd->add_option("--b1", o.b1, "Border field(s); paired with --b2");
  cmd->add_option("--b2", o.b2, "Centre field(s); paired with --b1");
  cmd->add_option("--nbar", o.nbar, "Mean thermal occupation(s)");
  cmd->add_option("--initial", o.initial, "Initial state(s): separable, w_state, max_entangled");
  cmd->add_option("--t-max", o.t_max, "Final dimensionless time");
  cmd->add_option("--points", o.points, "Number of output intervals");
  cmd->add_flag("--all-pairs", o.all_pairs, "Report all pair concurrences");
}

RunConfig apply(RunConfig cfg, const Overrides& o) {
  if (!o.presets.empty()) {
    cfg.anisotropies.clear();
    for (const auto& p : o.presets) cfg.anisotropies.push_back(anisotropy_choice(p));
  }
  if (!o.b1.empty() || !o.b2.empty()) {
    if (o.b1.size() != o.b2.size()) throw std::invalid_argument("--b1 and --b2 must be given the same number of times");
    cfg.fields.clear();
    for (std::size_t k = 0; k < o.b1.size(); ++k) cfg.fields.push_back({o.b1[k], o.b2[k]});
  }
  if (!o.nbar.empty()) cfg.nbar = o.nbar;
  if (!o.initial.empty()) {
    cfg.initial_states.clear();
    for (const auto& s : o.initial) cfg.initial_states.push_back(parse_initial_state(s));
  }
  if (o.t_max > 0.0) cfg.t_max = o.t_max;
  if (o.points > 0) cfg.points = o.points;
  if (o.all_pairs) cfg.all_pairs = true;
  if (!o.out.empty()) cfg.output.dir = o.out;
  if (!o.backend.empty()) cfg.backend = parse_backend(o.backend);
  if (o.threads > 0) cfg.threads = o.threads;
  return cfg;
}

int execute(const RunConfig& cfg) {
  validate_config(cfg);
  for (double nb : cfg.nbar)
    if (nbar_range_label(nb) != "paper range")
      std::fprintf(stderr, "note: nbar=%s is outside 0..0.1 (extrapolated)\n", format_shortest(nb).c_str());
  std::fprintf(stderr, "%s: %zu point(s), backend %s, %d thread(s)\n", cfg.name.c_str(), cfg.point_count(),
               std::string(to_string(cfg.backend)).c_str(), cfg.threads);
  const auto start = std::chrono::steady_clock::now();
  auto result = run_sweep(cfg, cfg.threads, [&](const PointResult& p, std::size_t done, std::size_t total) {
    const double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::fprintf(stderr, "[%zu/%zu %.0fs] %s %s%s\n", done, total, el, p.point.key().c_str(),
                 p.ok() ? "ok" : "FAILED", p.error.empty() ? "" : (": " + p.error).c_str());
  });
  if (cfg.output.csv)
    for (const auto& f : emit(result, EmitFormat::csv, cfg.output.dir)) std::cout << f.string() << "\n";
  if (cfg.output.json)
    for (const auto& f : emit(result, EmitFormat::json, cfg.output.dir)) std::cout << f.string() << "\n";
  return result.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative spin dynamics on a seven-site triangular patch"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(code_version()));

  Overrides run_o, sweep_o, steady_o, recipe_o, validate_o;
  auto* run = app.add_subcommand("run", "Evolve a single parameter point");
  add_axes(run, run_o);
  add_common(run, run_o);
  auto* sweep = app.add_subcommand("sweep", "Evolve the full parameter grid");
  add_axes(sweep, sweep_o);
  add_common(sweep, sweep_o);
  auto* steady = app.add_subcommand("steady", "Steady states only over the grid");
  add_axes(steady, steady_o);
  add_common(steady, steady_o);
  auto* val = app.add_subcommand("validate", "Run the oracle suite");
  std::string recipe_name;
  bool list = false, print_config = false;
  auto* rec = app.add_subcommand("recipe", "Run a named figure grid (fig2 .. fig23)");
  rec->add_option("name", recipe_name, "Recipe name");
  rec->add_flag("--list", list, "List recipes");
  rec->add_flag("--print-config", print_config, "Print the recipe config instead of running it");
  add_common(rec, recipe_o);
  rec->add_option("--t-max", recipe_o.t_max, "Final dimensionless time");
  rec->add_option("--points", recipe_o.points, "Number of output intervals");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*val) {
      bool ok = true;
      for (const auto& c : validate()) {
        std::printf("%s  %-52s measured %.3e  tol %.1e\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.measured,
                    c.tolerance);
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
    if (*rec) {
      if (list || recipe_name.empty()) {
        for (const auto& n : recipe_names()) std::printf("%-6s %s\n", n.c_str(), recipe(n).description.c_str());
        return 0;
      }
      auto r = recipe(recipe_name);
      auto cfg = apply(r.config, recipe_o);
      if (print_config) {
        std::cout << serialize_config(cfg);
        return 0;
      }
      std::fprintf(stderr, "%s: %s (plotted columns:", r.name.c_str(), r.description.c_str());
      for (const auto& f : r.focus) std::fprintf(stderr, " %s", f.c_str());
      std::fprintf(stderr, ")\n");
      return execute(cfg);
    }
    const Overrides& o = *run ? run_o : *sweep ? sweep_o : steady_o;
    RunConfig cfg = o.config_path.empty() ? parse_config("") : load_config(o.config_path);
    cfg = apply(cfg, o);
    if (*steady) cfg.backend = Backend::steady_only;
    if (*run && cfg.point_count() != 1) {
      if (o.config_path.empty() && o.presets.empty() && o.b1.empty() && o.nbar.empty() && o.initial.empty()) {
        // Bare `run`: first point of the default grid.
        cfg.fields.resize(1);
        cfg.nbar.resize(1);
      } else {
        std::fprintf(stderr, "error: run expects a single point but the axes give %zu; use sweep\n",
                     cfg.point_count());
        return 2;
      }
    }
    return execute(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
