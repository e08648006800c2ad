#include "trispin/runner.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#ifndef TRISPIN_VERSION
#define TRISPIN_VERSION "0.0.0"
#endif

namespace trispin {

std::string_view code_version() { return TRISPIN_VERSION; }

namespace {

std::string key_number(double v) {
  std::string s = format_shortest(v);
  for (char& c : s)
    if (c == '+') c = 'p';
  return s;
}

constexpr double kReportFloor = 1e-10;

}  // namespace

std::string SweepPoint::key() const {
  std::string a = anisotropy.name;
  if (a == "custom") a = "g" + key_number(anisotropy.value.gamma) + "_d" + key_number(anisotropy.value.delta);
  return a + "_B1-" + key_number(field.b1) + "_B2-" + key_number(field.b2) + "_nbar-" + key_number(nbar) + "_" +
         std::string(to_string(initial));
}

std::string SweepPoint::describe() const {
  return anisotropy.name + " (gamma=" + format_shortest(anisotropy.value.gamma) +
         ", delta=" + format_shortest(anisotropy.value.delta) + "), B1=" + format_shortest(field.b1) +
         ", B2=" + format_shortest(field.b2) + ", nbar=" + format_shortest(nbar) + ", " +
         std::string(to_string(initial));
}

ModelParams SweepPoint::params(const RunConfig& cfg) const {
  ModelParams p;
  p.gamma = anisotropy.value.gamma;
  p.delta = anisotropy.value.delta;
  p.J = cfg.J;
  p.omega = cfg.omega;
  p.Gamma = cfg.Gamma;
  p.nbar = nbar;
  p.B1 = field.b1;
  p.B2 = field.b2;
  return p;
}

std::vector<SweepPoint> sweep_points(const RunConfig& cfg) {
  std::vector<SweepPoint> out;
  out.reserve(cfg.point_count());
  for (const auto& a : cfg.anisotropies)
    for (const auto& f : cfg.fields)
      for (double nb : cfg.nbar)
        for (auto s : cfg.initial_states) out.push_back({a, f, nb, s});
  return out;
}

void CptpSummary::add(const CptpReport& r, const CptpTolerance& tol) {
  if (snapshots == 0) min_eigenvalue = r.min_eigenvalue;
  ++snapshots;
  max_trace_error = std::max(max_trace_error, r.trace_error);
  max_hermiticity = std::max(max_hermiticity, r.hermiticity);
  min_eigenvalue = std::min(min_eigenvalue, r.min_eigenvalue);
  ok = ok && r.ok(tol);
}

PointError::PointError(const SweepPoint& point, const std::string& what)
    : std::runtime_error("[" + point.describe() + "] " + what), point_(point) {}

namespace {

ObservableRecord floor_concurrences(ObservableRecord r) {
  for (double& c : r.concurrences)
    if (c < kReportFloor) c = 0.0;
  return r;
}

}  // namespace

PointResult run_point(const RunConfig& cfg, const SweepPoint& point) {
  PointResult res;
  res.point = point;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto lattice = cfg.lattice_spec();
    const int n = lattice.n_sites();
    const auto params = point.params(cfg);
    const auto fields = assign_fields(lattice, point.field.b1, point.field.b2);
    const auto gen = build_liouvillian(build_hamiltonian(params, lattice, fields), build_lindblad_ops(params, n));
    const auto set = cfg.observable_set(lattice);
    const auto grid = cfg.grid();

    ConvergenceTracker tracker(cfg.convergence_tol, cfg.convergence_window);
    std::optional<Matrix> last;
    auto observe = [&](double t, const Matrix& m) {
      DensityMatrix rho(m);
      res.cptp.add(check_state(rho));
      res.series.push_back(measure(rho, set, t));
      tracker.push(t, m);
      last = m;
    };

    if (cfg.backend != Backend::steady_only) {
      const auto rho0 = initial_state(point.initial, n);
      bool done = false;
      if (cfg.backend == Backend::spectral) {
        try {
          const auto sol = spectral_solve(gen, rho0);
          for (double t : grid.output_times) observe(t, sol.evaluate(t).matrix());
          res.backend_used = "spectral";
          done = true;
        } catch (const SpectralError& e) {
          res.steady.note = std::string("spectral refused (") + e.what() + "); integrator used";
          res.series.clear();
          res.cptp = {};
          tracker = ConvergenceTracker(cfg.convergence_tol, cfg.convergence_window);
        }
      }
      if (!done) {
        integrate(gen, rho0, grid, observe, cfg.integrator);
        res.backend_used = std::string("rk-adaptive/") + std::string(to_string(cfg.integrator));
      }
      res.steady.convergence = tracker.result();
    } else {
      res.backend_used = "steady-only";
    }

    SteadyStateOptions opts;
    opts.symmetries = field_symmetries(lattice, fields);
    try {
      SteadyStateInfo info;
      const auto ss = steady_state(gen, opts, &info);
      res.steady.from_solver = true;
      res.steady.residual = info.residual;
      res.steady.observables = floor_concurrences(measure(ss, set, grid.t_max()));
      if (last) res.steady.trajectory_distance = trace_distance(ss, DensityMatrix(*last));
      if (cfg.backend == Backend::steady_only) {
        res.cptp.add(check_state(ss));
        res.final_state = ss.matrix();
      }
    } catch (const DegenerateSteadyState& e) {
      if (!last) throw;
      res.steady.note += (res.steady.note.empty() ? "" : "; ") + std::string(e.what()) +
                         "; final snapshot reported";
      res.steady.observables = floor_concurrences(measure(DensityMatrix(*last), set, grid.t_max()));
    }
    if (last) res.final_state = std::move(*last);
  } catch (const PointError&) {
    throw;
  } catch (const std::exception& e) {
    throw PointError(point, e.what());
  }
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

bool SweepResult::ok() const {
  return std::all_of(points.begin(), points.end(), [](const PointResult& p) { return p.ok(); });
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : serialize_config(cfg)) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string> csv_columns(const ObservableSet& set, int n_sites) {
  std::vector<std::string> cols{"T"};
  for (auto [i, j] : set.pairs) cols.push_back("C_" + std::to_string(i) + "_" + std::to_string(j));
  for (int s : set.tau2_sites) cols.push_back("tau2_" + std::to_string(s));
  for (int s = 1; s <= n_sites; ++s) cols.push_back("Sz_" + std::to_string(s));
  return cols;
}

std::string format_number(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

SweepResult run_sweep(const RunConfig& cfg, int threads, const ProgressCallback& progress) {
  validate_config(cfg);
  SweepResult out;
  out.config = cfg;
  out.config_hash = config_hash(cfg);
  out.version = std::string(code_version());
  const auto lattice = cfg.lattice_spec();
  out.columns = csv_columns(cfg.observable_set(lattice), lattice.n_sites());

  const auto pts = sweep_points(cfg);
  out.points.resize(pts.size());
  std::atomic<std::size_t> next{0};
  std::size_t done = 0;
  std::mutex mu;
  auto worker = [&] {
    for (std::size_t k = next++; k < pts.size(); k = next++) {
      PointResult r;
      try {
        r = run_point(cfg, pts[k]);
      } catch (const std::exception& e) {
        r = PointResult{};
        r.point = pts[k];
        r.error = e.what();
      }
      std::lock_guard lock(mu);
      out.points[k] = std::move(r);
      ++done;
      if (progress) progress(out.points[k], done, pts.size());
    }
  };
  const int n_workers = std::max(1, std::min<int>(threads, static_cast<int>(pts.size())));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

namespace {

std::vector<double> record_values(const ObservableRecord& r) {
  std::vector<double> v{r.t};
  v.insert(v.end(), r.concurrences.begin(), r.concurrences.end());
  v.insert(v.end(), r.tau2.begin(), r.tau2.end());
  v.insert(v.end(), r.spin_z.begin(), r.spin_z.end());
  return v;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

void write_row(std::ostream& o, const std::vector<std::string>& cells) {
  for (std::size_t k = 0; k < cells.size(); ++k) o << (k ? "," : "") << cells[k];
  o << "\n";
}

std::vector<std::string> summary_columns(const std::vector<std::string>& obs) {
  std::vector<std::string> c{"key", "anisotropy", "gamma", "delta", "B1", "B2", "nbar", "nbar_range",
                             "initial_state", "backend", "converged", "t_converged", "steady_source",
                             "cptp_ok", "max_trace_error", "max_hermiticity", "min_eigenvalue",
                             "trajectory_distance"};
  c.insert(c.end(), obs.begin() + 1, obs.end());
  c.push_back("error");
  return c;
}

std::string csv_text(std::string s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += (ch == '"') ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

nlohmann::ordered_json point_json(const PointResult& p, const std::vector<std::string>& columns) {
  nlohmann::ordered_json j;
  j["key"] = p.point.key();
  j["anisotropy"] = p.point.anisotropy.name;
  j["gamma"] = p.point.anisotropy.value.gamma;
  j["delta"] = p.point.anisotropy.value.delta;
  j["B1"] = p.point.field.b1;
  j["B2"] = p.point.field.b2;
  j["nbar"] = p.point.nbar;
  j["nbar_range"] = nbar_range_label(p.point.nbar);
  j["initial_state"] = to_string(p.point.initial);
  j["backend"] = p.backend_used;
  j["cptp"] = {{"ok", p.cptp.ok},
               {"snapshots", p.cptp.snapshots},
               {"max_trace_error", p.cptp.max_trace_error},
               {"max_hermiticity", p.cptp.max_hermiticity},
               {"min_eigenvalue", p.cptp.min_eigenvalue}};
  nlohmann::ordered_json steady;
  steady["source"] = p.steady.from_solver ? "steady_state" : "final_snapshot";
  steady["converged"] = p.steady.convergence.converged;
  steady["t_converged"] = p.steady.convergence.t_converged;
  steady["residual"] = p.steady.residual;
  steady["trajectory_distance"] =
      p.steady.trajectory_distance ? nlohmann::ordered_json(*p.steady.trajectory_distance) : nlohmann::ordered_json();
  const auto sv = record_values(p.steady.observables);
  for (std::size_t k = 1; k < columns.size() && k < sv.size(); ++k) steady[columns[k]] = sv[k];
  steady["note"] = p.steady.note;
  j["steady"] = steady;
  j["error"] = p.error;
  return j;
}

}  // namespace

std::vector<std::filesystem::path> emit(const SweepResult& result, EmitFormat format,
                                        const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  if (format == EmitFormat::csv) {
    for (const auto& p : result.points) {
      if (p.series.empty()) continue;
      const auto path = dir / (p.point.key() + ".csv");
      auto f = open_out(path);
      write_row(f, result.columns);
      for (const auto& r : p.series) {
        std::vector<std::string> cells;
        for (double v : record_values(r)) cells.push_back(format_number(v));
        write_row(f, cells);
      }
      written.push_back(path);
    }
    const auto path = dir / "steady_summary.csv";
    auto f = open_out(path);
    write_row(f, summary_columns(result.columns));
    for (const auto& p : result.points) {
      const auto& pt = p.point;
      std::vector<std::string> cells{pt.key(),
                                     pt.anisotropy.name,
                                     format_number(pt.anisotropy.value.gamma),
                                     format_number(pt.anisotropy.value.delta),
                                     format_number(pt.field.b1),
                                     format_number(pt.field.b2),
                                     format_number(pt.nbar),
                                     std::string(nbar_range_label(pt.nbar)),
                                     std::string(to_string(pt.initial)),
                                     p.backend_used,
                                     p.steady.convergence.converged ? "true" : "false",
                                     format_number(p.steady.convergence.t_converged),
                                     p.steady.from_solver ? "steady_state" : "final_snapshot",
                                     p.cptp.ok ? "true" : "false",
                                     format_number(p.cptp.max_trace_error),
                                     format_number(p.cptp.max_hermiticity),
                                     format_number(p.cptp.min_eigenvalue),
                                     p.steady.trajectory_distance ? format_number(*p.steady.trajectory_distance) : ""};
      const auto sv = record_values(p.steady.observables);
      for (std::size_t k = 1; k < result.columns.size(); ++k)
        cells.push_back(k < sv.size() && p.error.empty() ? format_number(sv[k]) : "");
      cells.push_back(csv_text(p.error));
      write_row(f, cells);
    }
    written.push_back(path);
    return written;
  }

  for (const auto& p : result.points) {
    if (p.series.empty()) continue;
    const auto path = dir / (p.point.key() + ".json");
    auto j = point_json(p, result.columns);
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : p.series) rows.push_back(record_values(r));
    j["columns"] = result.columns;
    j["series"] = std::move(rows);
    auto f = open_out(path);
    f << j.dump(1) << "\n";
    written.push_back(path);
  }
  nlohmann::ordered_json summary;
  summary["config_hash"] = result.config_hash;
  summary["version"] = result.version;
  summary["name"] = result.config.name;
  summary["columns"] = result.columns;
  auto pts = nlohmann::ordered_json::array();
  for (const auto& p : result.points) pts.push_back(point_json(p, result.columns));
  summary["points"] = std::move(pts);
  const auto path = dir / "steady_summary.json";
  auto f = open_out(path);
  f << summary.dump(1) << "\n";
  written.push_back(path);
  return written;
}

}  // namespace trispin
