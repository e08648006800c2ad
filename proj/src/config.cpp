#include "trispin/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace trispin {

AnisotropyChoice anisotropy_choice(std::string_view preset) {
  return {std::string(preset), anisotropy_preset(preset)};
}

Backend parse_backend(std::string_view name) {
  if (name == "rk-adaptive") return Backend::rk_adaptive;
  if (name == "spectral") return Backend::spectral;
  if (name == "steady-only") return Backend::steady_only;
  throw std::invalid_argument("unknown backend '" + std::string(name) +
                              "' (expected rk-adaptive, spectral or steady-only)");
}

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::rk_adaptive: return "rk-adaptive";
    case Backend::spectral: return "spectral";
    case Backend::steady_only: return "steady-only";
  }
  return "?";
}

Integrator parse_integrator(std::string_view name) {
  if (name == "dopri5") return Integrator::dopri5;
  if (name == "lawson") return Integrator::lawson;
  if (name == "krylov") return Integrator::krylov;
  throw std::invalid_argument("unknown integrator '" + std::string(name) +
                              "' (expected dopri5, lawson or krylov)");
}

std::string_view to_string(Integrator m) {
  switch (m) {
    case Integrator::dopri5: return "dopri5";
    case Integrator::lawson: return "lawson";
    case Integrator::krylov: return "krylov";
  }
  return "?";
}

LatticeSpec RunConfig::lattice_spec() const {
  if (custom_lattice.sites == 0) return lattice_preset(lattice);
  std::vector<Edge> edges;
  for (auto [a, b] : custom_lattice.edges) edges.push_back({a, b});
  return LatticeSpec("custom", custom_lattice.sites, std::move(edges), custom_lattice.center);
}

EvolutionGrid RunConfig::grid() const {
  auto g = EvolutionGrid::uniform(t_max, points);
  g.rtol = rtol;
  g.atol = atol;
  return g;
}

ObservableSet RunConfig::observable_set(const LatticeSpec& lattice) const {
  if (all_pairs) return ObservableSet::all_pairs(lattice, tau2_sites);
  ObservableSet s;
  s.pairs = pairs;
  s.tau2_sites = tau2_sites;
  return s;
}

std::size_t RunConfig::point_count() const {
  return anisotropies.size() * fields.size() * nbar.size() * initial_states.size();
}

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
      message_(message),
      line_(line) {}

std::string_view nbar_range_label(double nbar) {
  return (nbar >= 0.0 && nbar <= 0.1) ? "paper range" : "extrapolated";
}

std::string format_shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_shortest: conversion failed");
  return std::string(buf, end);
}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

template <class T>
T scalar(const YAML::Node& n, const std::string& what) {
  if (!n.IsScalar()) fail(n, what + " must be a scalar");
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    fail(n, "cannot read " + what + " from '" + n.Scalar() + "'");
  }
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
  if (!map.IsMap()) fail(map, where + " must be a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
  }
}

template <class T, class F>
std::vector<T> list_of(const YAML::Node& n, const std::string& what, F&& item) {
  std::vector<T> out;
  if (n.IsScalar()) {
    out.push_back(item(n));
    return out;
  }
  if (!n.IsSequence()) fail(n, what + " must be a list");
  for (const auto& e : n) out.push_back(item(e));
  if (out.empty()) fail(n, what + " must not be empty");
  return out;
}

std::pair<int, int> site_pair(const YAML::Node& n, const std::string& what) {
  if (!n.IsSequence() || n.size() != 2) fail(n, what + " entries must be [i, j]");
  return {scalar<int>(n[0], what), scalar<int>(n[1], what)};
}

constexpr int kMaxCustomSites = 8;

void require(bool ok, const YAML::Node& n, const std::string& msg) {
  if (!ok) fail(n, msg);
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
  }
  RunConfig cfg;
  if (root.IsNull()) {
    validate_config(cfg);
    return cfg;
  }
  check_keys(root,
             {"name", "lattice", "model", "anisotropy", "fields", "nbar", "initial_states", "grid",
              "backend", "integrator", "observables", "convergence", "output", "threads"},
             "config");

  if (auto n = root["name"]) cfg.name = scalar<std::string>(n, "name");
  if (auto n = root["lattice"]) {
    if (n.IsMap()) {
      check_keys(n, {"sites", "edges", "center"}, "lattice");
      cfg.lattice = "custom";
      if (!n["sites"]) fail(n, "custom lattice needs 'sites'");
      cfg.custom_lattice.sites = scalar<int>(n["sites"], "sites");
      require(cfg.custom_lattice.sites >= 2 && cfg.custom_lattice.sites <= kMaxCustomSites, n["sites"],
              "custom lattice sites must be in 2.." + std::to_string(kMaxCustomSites));
      if (auto e = n["edges"]) {
        if (!e.IsSequence()) fail(e, "edges must be a list of [i, j]");
        for (const auto& x : e) cfg.custom_lattice.edges.push_back(site_pair(x, "edges"));
      }
      if (auto c = n["center"]) cfg.custom_lattice.center = scalar<int>(c, "center");
    } else {
      cfg.lattice = scalar<std::string>(n, "lattice");
      require(cfg.lattice != "custom", n, "lattice 'custom' needs a sites/edges mapping");
    }
    try {
      (void)cfg.lattice_spec();
    } catch (const std::logic_error& e) {
      fail(n, e.what());
    }
  }
  if (auto m = root["model"]) {
    check_keys(m, {"J", "omega", "Gamma"}, "model");
    if (auto n = m["J"]) cfg.J = scalar<double>(n, "J");
    if (auto n = m["omega"]) {
      cfg.omega = scalar<double>(n, "omega");
      require(cfg.omega > 0.0, n, "omega must be positive");
    }
    if (auto n = m["Gamma"]) {
      cfg.Gamma = scalar<double>(n, "Gamma");
      require(cfg.Gamma >= 0.0, n, "Gamma must be non-negative");
    }
  }
  if (auto a = root["anisotropy"]) {
    cfg.anisotropies = list_of<AnisotropyChoice>(a, "anisotropy", [](const YAML::Node& e) {
      if (e.IsScalar()) {
        const auto name = e.as<std::string>();
        try {
          return anisotropy_choice(name);
        } catch (const std::invalid_argument& err) {
          fail(e, err.what());
        }
      }
      check_keys(e, {"gamma", "delta"}, "anisotropy entry");
      if (!e["gamma"] || !e["delta"]) fail(e, "explicit anisotropy needs both gamma and delta");
      return AnisotropyChoice{"custom", {scalar<double>(e["gamma"], "gamma"), scalar<double>(e["delta"], "delta")}};
    });
  }
  if (auto f = root["fields"]) {
    if (!f.IsSequence() || f.size() == 0) fail(f, "fields must be a non-empty list of [B1, B2]");
    cfg.fields.clear();
    for (const auto& e : f) {
      if (!e.IsSequence() || e.size() != 2) fail(e, "fields entries must be [B1, B2]");
      FieldPair p{scalar<double>(e[0], "B1"), scalar<double>(e[1], "B2")};
      require(p.b1 >= 0.0 && p.b2 >= 0.0, e, "field strengths must be non-negative");
      cfg.fields.push_back(p);
    }
  }
  if (auto n = root["nbar"]) {
    cfg.nbar = list_of<double>(n, "nbar", [](const YAML::Node& e) {
      const double v = scalar<double>(e, "nbar");
      require(v >= 0.0, e, "nbar must be non-negative");
      return v;
    });
  }
  if (auto n = root["initial_states"]) {
    cfg.initial_states = list_of<InitialState>(n, "initial_states", [](const YAML::Node& e) {
      try {
        return parse_initial_state(scalar<std::string>(e, "initial state"));
      } catch (const std::invalid_argument& err) {
        fail(e, err.what());
      }
    });
  }
  if (auto g = root["grid"]) {
    check_keys(g, {"t_max", "points", "rtol", "atol"}, "grid");
    if (auto n = g["t_max"]) {
      cfg.t_max = scalar<double>(n, "t_max");
      require(cfg.t_max > 0.0, n, "t_max must be positive");
    }
    if (auto n = g["points"]) {
      const long v = scalar<long>(n, "points");
      require(v >= 1, n, "points must be at least 1");
      cfg.points = static_cast<std::size_t>(v);
    }
    if (auto n = g["rtol"]) {
      cfg.rtol = scalar<double>(n, "rtol");
      require(cfg.rtol > 0.0, n, "rtol must be positive");
    }
    if (auto n = g["atol"]) {
      cfg.atol = scalar<double>(n, "atol");
      require(cfg.atol > 0.0, n, "atol must be positive");
    }
  }
  if (auto n = root["backend"]) {
    try {
      cfg.backend = parse_backend(scalar<std::string>(n, "backend"));
    } catch (const std::invalid_argument& e) {
      fail(n, e.what());
    }
  }
  if (auto n = root["integrator"]) {
    try {
      cfg.integrator = parse_integrator(scalar<std::string>(n, "integrator"));
    } catch (const std::invalid_argument& e) {
      fail(n, e.what());
    }
  }
  const int n_sites = cfg.lattice_spec().n_sites();
  auto site_in_range = [n_sites](const YAML::Node& e, int s) {
    require(s >= 1 && s <= n_sites, e, "site " + std::to_string(s) + " is not on the lattice (1.." + std::to_string(n_sites) + ")");
  };
  if (auto o = root["observables"]) {
    check_keys(o, {"pairs", "tau2_sites", "all_pairs"}, "observables");
    if (auto n = o["pairs"]) {
      if (!n.IsSequence()) fail(n, "pairs must be a list of [i, j]");
      cfg.pairs.clear();
      for (const auto& e : n) {
        auto p = site_pair(e, "pairs");
        require(p.first != p.second, e, "pair sites must differ");
        site_in_range(e, p.first);
        site_in_range(e, p.second);
        cfg.pairs.push_back(p);
      }
    }
    if (auto n = o["tau2_sites"]) {
      if (!n.IsSequence()) fail(n, "tau2_sites must be a list");
      cfg.tau2_sites.clear();
      for (const auto& e : n) {
        cfg.tau2_sites.push_back(scalar<int>(e, "tau2 site"));
        site_in_range(e, cfg.tau2_sites.back());
      }
    }
    if (auto n = o["all_pairs"]) cfg.all_pairs = scalar<bool>(n, "all_pairs");
  }
  if (auto c = root["convergence"]) {
    check_keys(c, {"tol", "window"}, "convergence");
    if (auto n = c["tol"]) {
      cfg.convergence_tol = scalar<double>(n, "convergence tol");
      require(cfg.convergence_tol > 0.0, n, "convergence tol must be positive");
    }
    if (auto n = c["window"]) {
      const long v = scalar<long>(n, "convergence window");
      require(v >= 1, n, "convergence window must be at least 1");
      cfg.convergence_window = static_cast<std::size_t>(v);
    }
  }
  if (auto o = root["output"]) {
    check_keys(o, {"dir", "csv", "json"}, "output");
    if (auto n = o["dir"]) cfg.output.dir = scalar<std::string>(n, "output dir");
    if (auto n = o["csv"]) cfg.output.csv = scalar<bool>(n, "csv");
    if (auto n = o["json"]) cfg.output.json = scalar<bool>(n, "json");
  }
  if (auto n = root["threads"]) {
    cfg.threads = scalar<int>(n, "threads");
    require(cfg.threads >= 1, n, "threads must be at least 1");
  }

  // Site ranges depend on the lattice, so they are checked last and
  // attributed to the observables block.
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    const auto o = root["observables"];
    throw ConfigError(e.message(), o ? line_of(o) : 0);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string(), 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const RunConfig& cfg) {
  const auto lattice = cfg.lattice_spec();
  const int n = lattice.n_sites();
  auto in_range = [n](int s) { return s >= 1 && s <= n; };
  for (auto [i, j] : cfg.pairs)
    if (!in_range(i) || !in_range(j) || i == j)
      throw ConfigError("pair (" + std::to_string(i) + "," + std::to_string(j) + ") is not valid on " +
                            cfg.lattice,
                        0);
  for (int s : cfg.tau2_sites)
    if (!in_range(s)) throw ConfigError("tau2 site " + std::to_string(s) + " is not on " + cfg.lattice, 0);
  if (cfg.backend == Backend::spectral && n > 4)
    throw ConfigError("spectral backend is limited to four sites", 0);
  if (cfg.anisotropies.empty() || cfg.fields.empty() || cfg.nbar.empty() || cfg.initial_states.empty())
    throw ConfigError("sweep axes must not be empty", 0);
}

std::string serialize_config(const RunConfig& cfg) {
  auto num = [](double v) { return format_shortest(v); };
  std::ostringstream o;
  o << "name: " << YAML::Dump(YAML::Node(cfg.name)) << "\n";
  if (cfg.custom_lattice.sites > 0) {
    o << "lattice:\n  sites: " << cfg.custom_lattice.sites << "\n  edges: [";
    const auto& e = cfg.custom_lattice.edges;
    for (std::size_t k = 0; k < e.size(); ++k) o << (k ? ", " : "") << "[" << e[k].first << ", " << e[k].second << "]";
    o << "]\n  center: " << cfg.custom_lattice.center << "\n";
  } else {
    o << "lattice: " << cfg.lattice << "\n";
  }
  o << "model:\n  J: " << num(cfg.J) << "\n  omega: " << num(cfg.omega) << "\n  Gamma: " << num(cfg.Gamma) << "\n";
  o << "anisotropy:\n";
  for (const auto& a : cfg.anisotropies) {
    if (a.name == "custom")
      o << "  - {gamma: " << num(a.value.gamma) << ", delta: " << num(a.value.delta) << "}\n";
    else
      o << "  - " << a.name << "\n";
  }
  o << "fields:\n";
  for (const auto& f : cfg.fields) o << "  - [" << num(f.b1) << ", " << num(f.b2) << "]\n";
  o << "nbar: [";
  for (std::size_t k = 0; k < cfg.nbar.size(); ++k) o << (k ? ", " : "") << num(cfg.nbar[k]);
  o << "]\n";
  o << "initial_states: [";
  for (std::size_t k = 0; k < cfg.initial_states.size(); ++k) o << (k ? ", " : "") << to_string(cfg.initial_states[k]);
  o << "]\n";
  o << "grid:\n  t_max: " << num(cfg.t_max) << "\n  points: " << cfg.points << "\n  rtol: " << num(cfg.rtol)
    << "\n  atol: " << num(cfg.atol) << "\n";
  o << "backend: " << to_string(cfg.backend) << "\n";
  o << "integrator: " << to_string(cfg.integrator) << "\n";
  o << "observables:\n  pairs: [";
  for (std::size_t k = 0; k < cfg.pairs.size(); ++k)
    o << (k ? ", " : "") << "[" << cfg.pairs[k].first << ", " << cfg.pairs[k].second << "]";
  o << "]\n  tau2_sites: [";
  for (std::size_t k = 0; k < cfg.tau2_sites.size(); ++k) o << (k ? ", " : "") << cfg.tau2_sites[k];
  o << "]\n  all_pairs: " << (cfg.all_pairs ? "true" : "false") << "\n";
  o << "convergence:\n  tol: " << num(cfg.convergence_tol) << "\n  window: " << cfg.convergence_window << "\n";
  o << "output:\n  dir: " << YAML::Dump(YAML::Node(cfg.output.dir.string())) << "\n  csv: "
    << (cfg.output.csv ? "true" : "false") << "\n  json: " << (cfg.output.json ? "true" : "false") << "\n";
  o << "threads: " << cfg.threads << "\n";
  return o.str();
}

}  // namespace trispin
