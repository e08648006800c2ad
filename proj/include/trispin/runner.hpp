#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trispin/config.hpp"

namespace trispin {

std::string_view code_version();

// One tuple of the sweep's Cartesian product.
struct SweepPoint {
  AnisotropyChoice anisotropy;
  FieldPair field;
  double nbar{};
  InitialState initial{};

  // File-name safe identifier, unique within a sweep.
  std::string key() const;
  std::string describe() const;
  ModelParams params(const RunConfig& cfg) const;
};

// Anisotropy-major, then fields, nbar and initial state, in config order.
std::vector<SweepPoint> sweep_points(const RunConfig& cfg);

struct CptpSummary {
  std::size_t snapshots = 0;
  double max_trace_error = 0.0;
  double max_hermiticity = 0.0;
  double min_eigenvalue = 0.0;
  bool ok = true;

  void add(const CptpReport& r, const CptpTolerance& tol = {});
};

struct SteadySummary {
  ObservableRecord observables;  // concurrences below 1e-10 reported as 0
  bool from_solver = false;      // false: final snapshot stands in
  double residual = 0.0;
  std::optional<double> trajectory_distance;  // trace distance to the last snapshot
  ConvergenceResult convergence;
  std::string note;
};

struct PointResult {
  SweepPoint point;
  std::vector<ObservableRecord> series;
  SteadySummary steady;
  CptpSummary cptp;
  std::string backend_used;
  std::string error;  // empty on success
  Matrix final_state;      // last snapshot (or the steady state for steady-only); not emitted
  double wall_seconds{};   // not emitted

  bool ok() const { return error.empty() && cptp.ok; }
};

// Solver failure annotated with the parameter tuple.
class PointError : public std::runtime_error {
 public:
  PointError(const SweepPoint& point, const std::string& what);
  const SweepPoint& point() const { return point_; }

 private:
  SweepPoint point_;
};

// Evolves and measures one tuple. Deterministic given the config. Throws
// PointError on solver failure.
PointResult run_point(const RunConfig& cfg, const SweepPoint& point);

struct SweepResult {
  RunConfig config;
  std::string config_hash;
  std::string version;
  std::vector<std::string> columns;  // CSV header
  std::vector<PointResult> points;   // sweep_points() order

  bool ok() const;
};

using ProgressCallback = std::function<void(const PointResult&, std::size_t done, std::size_t total)>;

// Runs every tuple on `threads` workers; failures are recorded per point and
// the sweep continues. The result does not depend on the thread count.
SweepResult run_sweep(const RunConfig& cfg, int threads = 1, const ProgressCallback& progress = {});

// 16 hex digits of FNV-1a over the canonical config text.
std::string config_hash(const RunConfig& cfg);

// "T", one C_i_j per pair, tau2_i per site, Sz_1..Sz_n.
std::vector<std::string> csv_columns(const ObservableSet& set, int n_sites);

// Scientific notation with 12 significant digits.
std::string format_number(double v);

enum class EmitFormat { csv, json };

// Per-point trajectory files (<key>.csv / <key>.json) and steady_summary.csv /
// steady_summary.json. Returns the written paths.
std::vector<std::filesystem::path> emit(const SweepResult& result, EmitFormat format,
                                        const std::filesystem::path& dir);

struct Recipe {
  std::string name;
  std::string description;
  std::vector<std::string> focus;  // columns the figure plots
  RunConfig config;
};

// "fig2" ... "fig23".
std::vector<std::string> recipe_names();
Recipe recipe(std::string_view name);

struct OracleCheck {
  std::string name;
  double measured{};
  double tolerance{};
  bool passed{};
};

// Analytic and cross-backend oracles on small systems.
std::vector<OracleCheck> validate();

}  // namespace trispin
