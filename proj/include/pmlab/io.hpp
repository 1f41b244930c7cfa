#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmlab/grid.hpp"
#include "pmlab/limit_study.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Artifact bookkeeping. Every writer returns the manifest it stored alongside
// the payload files; json_text holds the exact bytes of manifest.json so
// callers can verify byte-level determinism.
struct ManifestEntry {
  std::string file;
  std::string kind;

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  int schema_version = 1;
  std::string kind;  // "run" or "sweep"
  std::string scenario_id;
  std::string config_hash;
  std::vector<ManifestEntry> entries;
  std::string json_text;
};

// FNV-1a over the raw bytes; the stable fingerprint used in manifests.
std::uint64_t fnv1a(const std::string& bytes);
std::string config_hash(const Scenario& scenario, const SolverConfig& config);

// Column-oriented CSV with a fixed 17-significant-digit float format; all
// columns must share one length. Overwrites. IoError when unwritable.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

// Exact binary snapshot of one field (magic "PMLB", version 1, little-endian
// doubles); the reader restores grid, time, and values bit-for-bit.
void write_field_bin(const std::string& path, const ScalarField& u);
ScalarField read_field_bin(const std::string& path);

// Run directory: scenario.ini, ledger.csv, per-snapshot profile_XXXX.csv
// (x, rho, v, p) and snapshot_XXXX.bin (density), plus manifest.json.
Manifest write_run(const Scenario& scenario, const Trajectory& traj, const std::string& dir);

// Sweep directory: scenario.ini, k_<i>/ run directories, distances.csv,
// residuals.csv, report.json, manifest.json.
Manifest write_sweep(const KSweepResult& sweep, const std::string& dir);

// Assemble and store manifest.json; extra_json (an object) is merged in.
// An empty entry list is valid and produces a manifest with zero entries.
Manifest write_manifest(const std::string& dir, const std::string& kind,
                        const std::string& scenario_id, const std::string& hash,
                        std::vector<ManifestEntry> entries,
                        const std::string& extra_json = "{}");

// Rehydrate a run directory written by write_run. Saturation and pressure are
// rebuilt from the stored densities and coefficients; the result matches the
// original trajectory bit-for-bit on accepted runs.
struct LoadedRun {
  Scenario scenario;
  Trajectory traj;
};
LoadedRun load_run(const std::string& dir);

}  // namespace pmlab
