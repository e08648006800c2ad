#include <doctest.h>

#include <filesystem>
#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "trispin/runner.hpp"

using namespace trispin;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("trispin_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

RunConfig small_config() {
  return parse_config(R"(
lattice: star4
anisotropy: [xyz]
fields: [[1, 1], [0.1, 1]]
nbar: [0, 0.05]
initial_states: [separable, max_entangled]
grid: {t_max: 20, points: 10}
observables:
  pairs: [[1, 2], [1, 4]]
  tau2_sites: [4]
)");
}

int error_line(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

}  // namespace

TEST_SUITE("runner") {
  TEST_CASE("empty config gives the defaults") {
    const auto cfg = parse_config("");
    CHECK(cfg.J == 0.05);
    CHECK(cfg.Gamma == 0.05);
    CHECK(cfg.omega == 1.0);
    CHECK(cfg.nbar == std::vector<double>{0, 0.001, 0.005, 0.01, 0.05, 0.1});
    CHECK(cfg.fields == std::vector<FieldPair>{{1, 1}, {1, 0.1}, {0.1, 1}});
    CHECK(cfg.t_max == 1000.0);
    CHECK(cfg.points == 2000);
    CHECK(cfg.rtol == 1e-8);
    CHECK(cfg.atol == 1e-10);
    CHECK(cfg.backend == Backend::rk_adaptive);
    CHECK(cfg.grid().output_times.size() == 2001);
  }

  TEST_CASE("explicit nbar list and anisotropy forms") {
    const auto cfg = parse_config(R"(
nbar: [0, 0.001, 0.005, 0.01, 0.05, 0.1]
anisotropy: [ising, {gamma: 0.25, delta: -1}]
)");
    CHECK(cfg.nbar.size() == 6);
    REQUIRE(cfg.anisotropies.size() == 2);
    CHECK(cfg.anisotropies[1].name == "custom");
    CHECK(cfg.anisotropies[1].value.delta == -1.0);
  }

  TEST_CASE("serialisation round trip") {
    const char* doc = R"(
name: roundtrip
lattice: star4
model: {J: 0.07, Gamma: 0.02}
anisotropy: [xxx, {gamma: 0.3, delta: 0.1}]
fields: [[0.3, 0.7]]
nbar: [0.2, 0.015]
initial_states: [w_state]
grid: {t_max: 12.5, points: 25, rtol: 1e-9}
backend: spectral
integrator: lawson
observables: {pairs: [[1, 3]], tau2_sites: [2], all_pairs: true}
convergence: {tol: 1e-8, window: 4}
output: {dir: "some dir/out", csv: false}
threads: 3
)";
    const auto cfg = parse_config(doc);
    const auto text = serialize_config(cfg);
    CHECK(parse_config(text) == cfg);
    CHECK(serialize_config(parse_config(text)) == text);
    CHECK(serialize_config(parse_config("")) == serialize_config(RunConfig{}));
  }

  TEST_CASE("diagnostics carry the offending line") {
    CHECK(error_line("nbar: [0]\nmodel:\n  J: 0.05\n  Jz: 1\n") == 4);
    CHECK(error_line("nbar: [0, -0.1]\n") == 1);
    CHECK(error_line("name: x\n\nfields:\n  - [1, 1]\n  - [1, -2]\n") == 5);
    CHECK(error_line("grid:\n  t_max: 0\n") == 2);
    CHECK(error_line("backend: gpu\n") == 1);
    CHECK(error_line("bogus: 1\n") == 1);
    CHECK(error_line("model:\n  Gamma: abc\n") == 2);
    CHECK(error_line("nbar: [0\n") > 0);
    CHECK(error_line("observables:\n  pairs: [[1, 9]]\n") == 2);
    CHECK(error_line("lattice: star4\nobservables:\n  pairs:\n    - [1, 2]\n    - [1, 7]\n") == 5);
    CHECK_THROWS_AS(parse_config("backend: spectral\n"), ConfigError);  // seven sites
  }

  TEST_CASE("custom edge-list lattice") {
    const auto cfg = parse_config(R"(
lattice:
  sites: 3
  edges: [[1, 2], [2, 3], [3, 1]]
nbar: [0.02]
fields: [[0.4, 0.9]]
anisotropy: [xyz]
grid: {t_max: 10, points: 5}
observables: {pairs: [[1, 2], [2, 3]], tau2_sites: [1]}
)");
    CHECK(cfg.lattice == "custom");
    CHECK(cfg.lattice_spec().n_sites() == 3);
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    auto preset = cfg;
    preset.lattice = "triangle3";
    preset.custom_lattice = {};
    const auto a = run_point(cfg, sweep_points(cfg)[0]);
    const auto b = run_point(preset, sweep_points(preset)[0]);
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t k = 0; k < a.series.size(); ++k) {
      CHECK(a.series[k].concurrences == b.series[k].concurrences);
      CHECK(a.series[k].spin_z == b.series[k].spin_z);
    }

    CHECK(error_line("lattice:\n  sites: 3\n  edges: [[1, 4]]\n") == 2);
    CHECK(error_line("lattice:\n  sites: 30\n") == 2);
    CHECK(error_line("lattice:\n  sites: 3\n  egdes: []\n") == 3);
    CHECK(error_line("lattice: custom\n") == 1);
    CHECK(error_line("lattice:\n  sites: 3\nobservables:\n  pairs: [[1, 4]]\n") == 4);
  }

  TEST_CASE("nbar range labels") {
    CHECK(nbar_range_label(0.0) == "paper range");
    CHECK(nbar_range_label(0.1) == "paper range");
    CHECK(nbar_range_label(0.2) == "extrapolated");
  }

  TEST_CASE("sweep points are the Cartesian product") {
    auto cfg = parse_config("nbar: [0, 0.001, 0.005, 0.01, 0.05, 0.1]\n");
    CHECK(sweep_points(cfg).size() == 18);
    CHECK(cfg.point_count() == 18);
    const auto pts = sweep_points(small_config());
    CHECK(pts.size() == 8);
    std::set<std::string> keys;
    for (const auto& p : pts) keys.insert(p.key());
    CHECK(keys.size() == 8);
  }

  TEST_CASE("CSV schema and number format") {
    const auto lat = build_triangular7();
    const auto cols = csv_columns(ObservableSet{}, 7);
    std::string header;
    for (std::size_t k = 0; k < cols.size(); ++k) header += (k ? "," : "") + cols[k];
    CHECK(header == "T,C_1_2,C_1_4,C_1_5,C_1_7,tau2_1,tau2_4,Sz_1,Sz_2,Sz_3,Sz_4,Sz_5,Sz_6,Sz_7");
    CHECK(format_number(0.1) == "1.00000000000e-01");
    CHECK(format_number(-1.0 / 3.0) == "-3.33333333333e-01");
    CHECK(format_number(0.0) == "0.00000000000e+00");
  }

  TEST_CASE("single point through every backend") {
    auto cfg = small_config();
    const auto pt = sweep_points(cfg)[3];
    const auto rk = run_point(cfg, pt);
    CHECK(rk.ok());
    CHECK(rk.series.size() == 11);
    CHECK(rk.cptp.snapshots == 11);
    CHECK(rk.steady.from_solver);
    cfg.backend = Backend::spectral;
    const auto sp = run_point(cfg, pt);
    CHECK(sp.backend_used == "spectral");
    for (std::size_t k = 0; k < rk.series.size(); ++k)
      for (std::size_t s = 0; s < 4; ++s) CHECK(std::abs(rk.series[k].spin_z[s] - sp.series[k].spin_z[s]) < 1e-8);
    cfg.backend = Backend::steady_only;
    const auto st = run_point(cfg, pt);
    CHECK(st.series.empty());
    CHECK(st.steady.observables.spin_z == rk.steady.observables.spin_z);
  }

  TEST_CASE("solver failures are annotated and recorded") {
    auto cfg = small_config();
    cfg.Gamma = 0.0;
    cfg.backend = Backend::steady_only;
    cfg.nbar = {0.0};
    cfg.fields = {{1, 1}};
    cfg.initial_states = {InitialState::separable};
    const auto pt = sweep_points(cfg)[0];
    try {
      (void)run_point(cfg, pt);
      FAIL("expected PointError");
    } catch (const PointError& e) {
      CHECK(std::string(e.what()).find("B2=1") != std::string::npos);
    }
    const auto res = run_sweep(cfg);
    REQUIRE(res.points.size() == 1);
    CHECK_FALSE(res.points[0].error.empty());
    CHECK_FALSE(res.ok());
  }

  TEST_CASE("sweep output is deterministic and independent of threading") {
    const auto cfg = small_config();
    const auto serial = run_sweep(cfg, 1);
    const auto parallel = run_sweep(cfg, 3);
    CHECK(serial.ok());
    const auto d1 = scratch("serial");
    const auto d2 = scratch("parallel");
    const auto f1 = emit(serial, EmitFormat::csv, d1);
    const auto f2 = emit(parallel, EmitFormat::csv, d2);
    REQUIRE(f1.size() == 9);
    REQUIRE(f2.size() == 9);
    for (std::size_t k = 0; k < f1.size(); ++k) {
      CHECK(f1[k].filename() == f2[k].filename());
      CHECK(slurp(f1[k]) == slurp(f2[k]));
    }
    const auto j1 = emit(serial, EmitFormat::json, d1);
    const auto j2 = emit(run_sweep(cfg, 1), EmitFormat::json, d2);
    for (std::size_t k = 0; k < j1.size(); ++k) CHECK(slurp(j1[k]) == slurp(j2[k]));

    // One summary row per point plus the header.
    const auto summary = slurp(d1 / "steady_summary.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 9);
    const auto traj = slurp(f1[0]);
    CHECK(traj.substr(0, traj.find('\n')) == "T,C_1_2,C_1_4,tau2_4,Sz_1,Sz_2,Sz_3,Sz_4");
    CHECK(serial.config_hash.size() == 16);
    CHECK(serial.config_hash == config_hash(cfg));
    std::filesystem::remove_all(d1);
    std::filesystem::remove_all(d2);
  }

  TEST_CASE("unwritable output path") {
    const auto cfg = small_config();
    SweepResult r;
    r.config = cfg;
    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "x";
    CHECK_THROWS(emit(r, EmitFormat::csv, blocker / "sub"));
    std::filesystem::remove_all(blocker);
  }

  TEST_CASE("figure recipes") {
    const auto names = recipe_names();
    CHECK(names.size() == 22);
    CHECK(names.front() == "fig2");
    CHECK(names.back() == "fig23");
    for (const auto& n : names) {
      const auto r = recipe(n);
      CHECK_NOTHROW(validate_config(r.config));
      CHECK_FALSE(r.focus.empty());
    }
    const auto fig2 = recipe("fig2");
    CHECK(fig2.config.anisotropies[0].name == "ising");
    CHECK(fig2.config.point_count() == 18);
    CHECK(fig2.config.initial_states == std::vector<InitialState>{InitialState::max_entangled});
    CHECK(fig2.focus == std::vector<std::string>{"C_1_2"});
    CHECK(recipe("fig15").config.initial_states.size() == 2);
    CHECK(recipe("fig12").config.nbar.back() == 0.05);
    CHECK(recipe("fig19").config.fields == std::vector<FieldPair>{{0.1, 1}});
    CHECK_THROWS_AS(recipe("fig1"), std::invalid_argument);
  }

  TEST_CASE("oracle suite passes") {
    for (const auto& c : validate()) {
      INFO(c.name << " measured " << c.measured);
      CHECK(c.passed);
    }
  }
}
