#include "pmlab/io.hpp"

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <json.hpp>

#include "pmlab/errors.hpp"
#include "pmlab/pressure_diagnostics.hpp"

namespace pmlab {
namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void put_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double d) {
  std::uint64_t v = std::bit_cast<std::uint64_t>(d);
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ByteReader {
  const std::string& buf;
  std::size_t pos = 0;
  const std::string& path;

  std::uint32_t u32() {
    if (pos + 4 > buf.size()) throw IoError("truncated snapshot file " + path);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return v;
  }
  double f64() {
    if (pos + 8 > buf.size()) throw IoError("truncated snapshot file " + path);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos++])) << (8 * i);
    return std::bit_cast<double>(v);
  }
};

ordered_json config_to_json(const SolverConfig& c) {
  ordered_json j;
  j["k"] = c.k;
  j["cfl_safety"] = c.cfl_safety;
  j["t_end"] = c.t_end;
  j["output_times"] = c.output_times;
  if (c.regularization_n)
    j["regularization_n"] = *c.regularization_n;
  else
    j["regularization_n"] = nullptr;
  j["max_steps"] = c.max_steps;
  j["v_cap"] = c.v_cap;
  return j;
}

SolverConfig config_from_json(const ordered_json& j, const std::string& where) {
  SolverConfig c;
  try {
    c.k = j.at("k").get<double>();
    c.cfl_safety = j.at("cfl_safety").get<double>();
    c.t_end = j.at("t_end").get<double>();
    c.output_times = j.at("output_times").get<std::vector<double>>();
    if (!j.at("regularization_n").is_null())
      c.regularization_n = j.at("regularization_n").get<long>();
    c.max_steps = j.at("max_steps").get<long>();
    c.v_cap = j.at("v_cap").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(where + ": malformed config block: " + e.what());
  }
  return c;
}

}  // namespace

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_hash(const Scenario& scenario, const SolverConfig& config) {
  std::string payload = write_scenario(scenario) + "\n" + config_to_json(config).dump();
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a:%016llx",
                static_cast<unsigned long long>(fnv1a(payload)));
  return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw ValidationError("csv: header and column counts disagree");
  std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw ValidationError("csv: ragged columns");

  std::string text;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (j) text += ",";
    text += header[j];
  }
  text += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (j) text += ",";
      text += fmt(columns[j][i]);
    }
    text += "\n";
  }
  write_text(path, text);
}

void write_field_bin(const std::string& path, const ScalarField& u) {
  std::string buf;
  buf.reserve(32 + 8 * u.values.size());
  buf += "PMLB";
  put_u32(buf, 1u);
  put_u32(buf, static_cast<std::uint32_t>(u.grid.dim));
  put_u32(buf, static_cast<std::uint32_t>(u.grid.n_cells));
  put_f64(buf, u.grid.x_lo);
  put_f64(buf, u.grid.x_hi);
  put_f64(buf, u.time);
  for (double v : u.values) put_f64(buf, v);
  write_text(path, buf);
}

ScalarField read_field_bin(const std::string& path) {
  std::string buf = read_text(path);
  if (buf.size() < 4 || buf.compare(0, 4, "PMLB") != 0)
    throw IoError("bad magic in snapshot file " + path);
  ByteReader r{buf, 4, path};
  std::uint32_t version = r.u32();
  if (version != 1) throw IoError("unsupported snapshot version in " + path);
  int dim = static_cast<int>(r.u32());
  int n = static_cast<int>(r.u32());
  double x_lo = r.f64();
  double x_hi = r.f64();
  double t = r.f64();
  Grid g(dim, n, x_lo, x_hi);
  ScalarField u(g, t);
  for (int i = 0; i < n; ++i) u[i] = r.f64();
  if (r.pos != buf.size()) throw IoError("trailing bytes in snapshot file " + path);
  return u;
}

Manifest write_manifest(const std::string& dir, const std::string& kind,
                        const std::string& scenario_id, const std::string& hash,
                        std::vector<ManifestEntry> entries, const std::string& extra_json) {
  ordered_json j;
  j["schema_version"] = 1;
  j["kind"] = kind;
  j["scenario_id"] = scenario_id;
  j["config_hash"] = hash;
  ordered_json extra = ordered_json::parse(extra_json, nullptr, false);
  if (extra.is_discarded() || !extra.is_object())
    throw ValidationError("manifest extra block must be a JSON object");
  for (auto& [key, value] : extra.items()) j[key] = value;
  ordered_json arts = ordered_json::array();
  for (const ManifestEntry& e : entries) arts.push_back({{"file", e.file}, {"kind", e.kind}});
  j["artifacts"] = std::move(arts);

  Manifest m;
  m.kind = kind;
  m.scenario_id = scenario_id;
  m.config_hash = hash;
  m.entries = std::move(entries);
  m.json_text = j.dump(2) + "\n";
  write_text(dir + "/manifest.json", m.json_text);
  return m;
}

Manifest write_run(const Scenario& scenario, const Trajectory& traj, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);

  write_text(dir + "/scenario.ini", write_scenario(scenario));
  std::vector<ManifestEntry> entries;
  entries.push_back({"scenario.ini", "scenario"});

  {
    std::vector<std::vector<double>> cols(6);
    for (const LedgerRow& r : traj.ledger) {
      cols[0].push_back(static_cast<double>(r.step));
      cols[1].push_back(r.t);
      cols[2].push_back(r.dt);
      cols[3].push_back(r.mass);
      cols[4].push_back(r.source_integral);
      cols[5].push_back(r.clamped_mass);
    }
    write_csv(dir + "/ledger.csv",
              {"step", "t", "dt", "mass", "source_integral", "clamped_mass"}, cols);
    entries.push_back({"ledger.csv", "ledger"});
  }

  char name[48];
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    const SolverState& s = traj.snapshots[i];
    const Grid& g = s.density.grid;
    std::vector<std::vector<double>> cols(4);
    for (int c = 0; c < g.n_cells; ++c) {
      cols[0].push_back(g.center(c));
      cols[1].push_back(s.density[c]);
      cols[2].push_back(s.saturation[c]);
      cols[3].push_back(s.pressure[c]);
    }
    std::snprintf(name, sizeof name, "profile_%04lu.csv", static_cast<unsigned long>(i));
    write_csv(dir + "/" + name, {"x", "rho", "v", "p"}, cols);
    entries.push_back({name, "profile"});

    std::snprintf(name, sizeof name, "snapshot_%04lu.bin", static_cast<unsigned long>(i));
    write_field_bin(dir + "/" + name, s.density);
    entries.push_back({name, "snapshot"});
  }

  ordered_json extra;
  extra["config"] = config_to_json(traj.config);
  extra["initial_mass"] = traj.initial_mass;
  extra["clamped_mass_total"] = traj.clamped_mass_total;
  extra["cap_events"] = traj.cap_events;
  ordered_json times = ordered_json::array();
  ordered_json steps = ordered_json::array();
  for (const SolverState& s : traj.snapshots) {
    times.push_back(s.t);
    steps.push_back(s.steps);
  }
  extra["snapshot_times"] = std::move(times);
  extra["snapshot_steps"] = std::move(steps);

  return write_manifest(dir, "run", scenario.id, config_hash(scenario, traj.config),
                        std::move(entries), extra.dump());
}

Manifest write_sweep(const KSweepResult& sweep, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir);

  write_text(dir + "/scenario.ini", write_scenario(sweep.scenario));
  std::vector<ManifestEntry> entries;
  entries.push_back({"scenario.ini", "scenario"});

  for (std::size_t i = 0; i < sweep.trajectories.size(); ++i) {
    std::string sub = "k_" + std::to_string(i);
    write_run(sweep.scenario, sweep.trajectories[i], dir + "/" + sub);
    entries.push_back({sub, "member"});
  }

  {
    std::vector<std::vector<double>> cols(4);
    for (std::size_t a = 0; a < sweep.ks.size(); ++a)
      for (std::size_t b = a + 1; b < sweep.ks.size(); ++b) {
        cols[0].push_back(sweep.ks[a]);
        cols[1].push_back(sweep.ks[b]);
        cols[2].push_back(sweep.d_rho[a][b]);
        cols[3].push_back(sweep.d_p[a][b]);
      }
    write_csv(dir + "/distances.csv", {"k_i", "k_j", "d_rho", "d_p"}, cols);
    entries.push_back({"distances.csv", "distances"});
  }

  {
    std::vector<std::vector<double>> cols(4);
    for (std::size_t a = 0; a < sweep.comp_residuals.size(); ++a)
      for (std::size_t s = 0; s < sweep.comp_residuals[a].size(); ++s) {
        cols[0].push_back(sweep.ks[a]);
        cols[1].push_back(sweep.trajectories[a].snapshots[s].t);
        cols[2].push_back(sweep.comp_residuals[a][s].residual);
        cols[3].push_back(sweep.comp_residuals[a][s].overshoot);
      }
    write_csv(dir + "/residuals.csv", {"k", "t", "residual", "overshoot"}, cols);
    entries.push_back({"residuals.csv", "residuals"});
  }

  write_text(dir + "/report.json", to_json(sweep) + "\n");
  entries.push_back({"report.json", "report"});

  ordered_json extra;
  extra["ks"] = sweep.ks;
  extra["suite_tau"] = sweep.suite_tau;
  return write_manifest(dir, "sweep", sweep.scenario.id,
                        config_hash(sweep.scenario, sweep.scenario.solver), std::move(entries),
                        extra.dump());
}

LoadedRun load_run(const std::string& dir) {
  std::string mtext = read_text(dir + "/manifest.json");
  ordered_json j = ordered_json::parse(mtext, nullptr, false);
  if (j.is_discarded()) throw IoError("corrupt manifest.json in " + dir);
  if (!j.contains("kind") || j["kind"] != "run")
    throw IoError(dir + " does not hold a run manifest");

  LoadedRun out;
  out.scenario = parse_scenario(read_text(dir + "/scenario.ini"), dir + "/scenario.ini");
  out.traj.config = config_from_json(j.at("config"), dir);
  try {
    out.traj.initial_mass = j.at("initial_mass").get<double>();
    out.traj.clamped_mass_total = j.at("clamped_mass_total").get<double>();
    out.traj.cap_events = j.at("cap_events").get<long>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(dir + ": malformed manifest: " + e.what());
  }

  std::vector<long> steps;
  if (j.contains("snapshot_steps"))
    steps = j["snapshot_steps"].get<std::vector<long>>();

  FrameProvider frames(out.scenario.coeffs, out.scenario.grid);
  double k = out.traj.config.k;
  double v_cap = out.traj.config.v_cap;
  std::size_t snap_index = 0;
  for (const auto& art : j.at("artifacts")) {
    if (art.at("kind") != "snapshot") continue;
    ScalarField rho = read_field_bin(dir + "/" + art.at("file").get<std::string>());
    const CoefficientFrame& frame = frames.at(rho.time);
    SolverState st;
    st.t = rho.time;
    st.steps = snap_index < steps.size() ? steps[snap_index] : 0;
    st.saturation = ScalarField(rho.grid, rho.time);
    for (int i = 0; i < rho.size(); ++i) {
      double v = rho[i] / frame.cap[i];
      if (v < 0.0) v = 0.0;
      if (v > v_cap) v = v_cap;
      st.saturation[i] = v;
    }
    st.pressure = pressure_of(rho, frame.cap, k);
    st.density = std::move(rho);
    out.traj.snapshots.push_back(std::move(st));
    ++snap_index;
  }

  std::string ledger_text = read_text(dir + "/ledger.csv");
  std::istringstream in(ledger_text);
  std::string line;
  bool first = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (first) {
      first = false;
      continue;  // header
    }
    if (line.empty()) continue;
    double vals[6];
    int field = 0;
    std::istringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',') && field < 6) {
      try {
        vals[field++] = std::stod(item);
      } catch (...) {
        throw IoError(dir + "/ledger.csv:" + std::to_string(line_no) + ": bad number");
      }
    }
    if (field != 6)
      throw IoError(dir + "/ledger.csv:" + std::to_string(line_no) + ": expected 6 fields");
    out.traj.ledger.push_back({static_cast<long>(vals[0]), vals[1], vals[2], vals[3], vals[4],
                               vals[5]});
  }
  return out;
}

}  // namespace pmlab
