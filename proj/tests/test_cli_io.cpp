#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pmlab/cli.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/io.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"

using namespace pmlab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void spit(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  out << bytes;
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
  size_t pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path("tmp_cli_io") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Trajectory tiny_transport_run(Scenario& s) {
  s = builtin_scenario("transport");
  s.solver.t_end = 0.2;
  s.solver.output_times = linspace_times(0.0, 0.2, 2);
  FrameProvider frames(s.coeffs, s.grid);
  return run(frames, s.rho0(), s.solver);
}

}  // namespace

TEST_CASE("scenario text round-trips for every built-in") {
  for (const std::string& name : builtin_scenario_names()) {
    Scenario s = builtin_scenario(name);
    Scenario back = parse_scenario(write_scenario(s), "roundtrip");
    CHECK(back == s);
  }
}

TEST_CASE("scenario parse failures name the origin and the offense") {
  std::string base = write_scenario(builtin_scenario("transport"));

  auto expect_fail = [&](const std::string& text, const std::string& needle) {
    try {
      parse_scenario(text, "probe.ini");
      FAIL_CHECK("expected ParseError for: " << needle);
    } catch (const ParseError& e) {
      std::string msg = e.what();
      CHECK(msg.find("probe.ini") != std::string::npos);
      CHECK(msg.find(needle) != std::string::npos);
    }
  };

  expect_fail(base + "\n[extra]\nz = 1\n", "unknown section");
  expect_fail(replace_once(base, "[solver]\n", "[solver]\nwhimsy = 1\n"), "unknown key");
  expect_fail(replace_once(base, "\nk = 80\n", "\nk = 80\nk = 81\n"), "duplicate key");
  expect_fail(replace_once(base, "family = constant\nc = 1\n", "family = warp\nc = 1\n"),
              "unknown coefficient family");
  expect_fail(replace_once(base, "family = constant\nc = 1\n",
                           "family = tabulated\nxs = 0,2,1\nvs = 1,1,1\n"),
              "strictly increasing");
  expect_fail(replace_once(base, "outputs = 20", "outputs = 20\noutput_times = 0,0.1"),
              "not both");
  expect_fail(replace_once(base, "outputs = 20", "output_times = 0,0.5,0.25"),
              "strictly increasing");
  expect_fail(replace_once(base, "outputs = 20", "output_times = 0,2"), "lie in");
  expect_fail(replace_once(base, "k = 80", "k = 0.5"), "k must exceed 1");
  expect_fail(replace_once(base, "k = 80", "k = banana"), "expected a number");

  // the cap section cannot be dropped
  size_t cap_pos = base.find("[cap]");
  size_t drift_pos = base.find("[drift]");
  REQUIRE(cap_pos != std::string::npos);
  REQUIRE(drift_pos > cap_pos);
  std::string no_cap = base.substr(0, cap_pos) + base.substr(drift_pos);
  expect_fail(no_cap, "missing required section [cap]");

  CHECK_THROWS_AS(load_scenario("no-such-builtin-or-file"), ParseError);
}

TEST_CASE("fingerprints: hash vectors and config sensitivity") {
  // published FNV-1a 64-bit test vectors
  CHECK(fnv1a("") == 14695981039346656037ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);

  Scenario s = builtin_scenario("transport");
  std::string h1 = config_hash(s, s.solver);
  CHECK(h1 == config_hash(s, s.solver));
  CHECK(h1.rfind("fnv1a:", 0) == 0);

  SolverConfig other = s.solver;
  other.k = 12.0;
  CHECK(config_hash(s, other) != h1);

  Scenario finer = s;
  finer.grid = Grid(1, 320, -3.0, 3.0);
  CHECK(config_hash(finer, s.solver) != h1);
}

TEST_CASE("binary field snapshots restore bit-for-bit") {
  fs::path dir = fresh_dir("bin");
  Grid g(1, 97, -2.5, 3.5);
  ScalarField u = make_field(g, 0.37, [](double x) { return std::sin(3.0 * x) + x / 7.0; });

  std::string path = (dir / "field.bin").string();
  write_field_bin(path, u);
  ScalarField back = read_field_bin(path);
  CHECK(back.grid.dim == g.dim);
  CHECK(back.grid.n_cells == g.n_cells);
  CHECK(back.grid.x_lo == g.x_lo);
  CHECK(back.grid.x_hi == g.x_hi);
  CHECK(back.time == u.time);
  for (int i = 0; i < g.n_cells; ++i) CHECK(back[i] == u[i]);

  std::string bytes = slurp(path);
  spit((dir / "short.bin").string(), bytes.substr(0, 30));
  CHECK_THROWS_AS(read_field_bin((dir / "short.bin").string()), IoError);

  std::string wrong = bytes;
  wrong[0] = 'Q';
  spit((dir / "magic.bin").string(), wrong);
  CHECK_THROWS_AS(read_field_bin((dir / "magic.bin").string()), IoError);

  spit((dir / "trail.bin").string(), bytes + "x");
  CHECK_THROWS_AS(read_field_bin((dir / "trail.bin").string()), IoError);

  CHECK_THROWS_AS(read_field_bin((dir / "absent.bin").string()), IoError);
}

TEST_CASE("csv writer: exact floats and shape validation") {
  fs::path dir = fresh_dir("csv");
  std::string path = (dir / "cols.csv").string();
  write_csv(path, {"a", "b"}, {{1.0 / 3.0, 2e-300}, {1.0, 2.0}});

  std::string text = slurp(path);
  CHECK(text.rfind("a,b\n", 0) == 0);
  size_t line2 = text.find('\n') + 1;
  size_t comma = text.find(',', line2);
  double a0 = std::stod(text.substr(line2, comma - line2));
  CHECK(a0 == 1.0 / 3.0);  // 17 significant digits round-trip exactly

  CHECK_THROWS_AS(write_csv(path, {"a"}, {{1.0}, {2.0}}), ValidationError);
  CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{1.0, 2.0}, {3.0}}), ValidationError);
  CHECK_THROWS_AS(write_csv("no_such_dir_xyz/f.csv", {"a"}, {{1.0}}), IoError);
}

TEST_CASE("run directories round-trip and are byte-deterministic") {
  Scenario s;
  Trajectory traj = tiny_transport_run(s);

  fs::path dir1 = fresh_dir("run1");
  fs::path dir2 = fresh_dir("run2");
  Manifest m = write_run(s, traj, dir1.string());
  write_run(s, traj, dir2.string());

  CHECK(m.kind == "run");
  CHECK(m.schema_version == 1);
  CHECK(m.scenario_id == "transport");
  CHECK(m.config_hash == config_hash(s, traj.config));
  CHECK(m.entries.size() >= 4);
  nlohmann::json j = nlohmann::json::parse(m.json_text);
  CHECK(j.at("schema_version").get<int>() == 1);
  CHECK(j.at("config_hash").get<std::string>() == m.config_hash);

  for (const char* f : {"scenario.ini", "ledger.csv", "manifest.json"})
    CHECK(fs::exists(dir1 / f));

  // identical inputs produce identical bytes
  for (const fs::directory_entry& e : fs::directory_iterator(dir1)) {
    std::string name = e.path().filename().string();
    CHECK(slurp((dir1 / name).string()) == slurp((dir2 / name).string()));
  }

  LoadedRun lr = load_run(dir1.string());
  CHECK(lr.scenario == s);
  CHECK(lr.traj.config == traj.config);
  CHECK(lr.traj.initial_mass == traj.initial_mass);
  REQUIRE(lr.traj.snapshots.size() == traj.snapshots.size());
  for (size_t i = 0; i < traj.snapshots.size(); ++i) {
    const SolverState& a = traj.snapshots[i];
    const SolverState& b = lr.traj.snapshots[i];
    CHECK(a.t == b.t);
    CHECK(a.steps == b.steps);
    for (int c = 0; c < a.density.size(); ++c) {
      CHECK(a.density[c] == b.density[c]);
      CHECK(a.saturation[c] == b.saturation[c]);
      CHECK(a.pressure[c] == b.pressure[c]);
    }
  }
  REQUIRE(lr.traj.ledger.size() == traj.ledger.size());
  CHECK(lr.traj.ledger.back().mass == traj.ledger.back().mass);
  CHECK(lr.traj.ledger.back().step == traj.ledger.back().step);

  CHECK_THROWS_AS(load_run("tmp_cli_io/no_such_run"), IoError);
}

TEST_CASE("command driver exit codes") {
  fs::path dir = fresh_dir("cmd");
  CHECK(run_command({"--help"}) == 0);
  CHECK(run_command({"frobnicate"}) == 2);
  CHECK(run_command({"simulate", "no-such-scenario"}) == 2);
  CHECK(run_command({"simulate", "transport", "--k", "0.5"}) == 2);
  CHECK(run_command({"sweep", "fig1", "--ks", "40"}) == 2);
  CHECK(run_command({"sweep", "fig1", "--ks", "40,20"}) == 2);
  CHECK(run_command({"diagnose", "tmp_cli_io/no_such_run"}) == 1);

  std::string out = (dir / "ok").string();
  CHECK(run_command({"simulate", "transport", "--t-end", "0.2", "--outputs", "2",
                     "--out", out}) == 0);
  CHECK(fs::exists(dir / "ok" / "manifest.json"));
  CHECK(run_command({"diagnose", out, "--complementarity"}) == 0);
}
