#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/pressure_diagnostics.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// A family of runs differing only in the exponent k, on one grid with one
// set of output times, plus the aggregate statistics used by the limit
// checks. Distance matrices are symmetric with zero diagonal.
struct KSweepResult {
  Scenario scenario;
  std::vector<double> ks;
  std::vector<Trajectory> trajectories;
  std::vector<std::vector<double>> d_rho;  // L1 space-time density distances
  std::vector<std::vector<double>> d_p;    // same for pressures
  // per k, per snapshot
  std::vector<std::vector<ComplementarityResidual>> comp_residuals;
  std::vector<DiagnosticsReport> suites;  // integral estimates per k
  double suite_tau = 0.0;                 // time cutoff used by the suites
};

// Runs the solver once per exponent (concurrently) and aggregates. ks must be
// sorted ascending (ties allowed) with at least two entries.
KSweepResult k_sweep(const Scenario& scenario, const std::vector<double>& ks);
KSweepResult k_sweep(const Scenario& scenario, const std::vector<double>& ks,
                     const SolverConfig& base);

struct IdentificationRow {
  double t = 0.0;
  double plus_mismatch = 0.0;  // max |rho - cap|/cap over the pressurized phase
  double zero_mismatch = 0.0;  // max |rho - rho_ext|/(rho_ext + 1e-12) elsewhere
  int plus_cells = 0;
  int zero_cells = 0;
};

struct IdentificationReport {
  double theta = 1e-3;
  double k_proxy = 0.0;  // largest swept exponent, standing in for the limit
  std::vector<IdentificationRow> rows;
  double max_plus = 0.0;
  double max_zero = 0.0;
};

// Splits each snapshot of the largest-k run into the pressurized phase
// {p > theta*sup p} and its complement (both eroded by 3 cells), then checks
// the limit dictionary: density = cap on the former, density = the
// characteristic-formula external density on the latter. Requires a
// congested scenario (NotCongestedError otherwise).
IdentificationReport identify_density(const KSweepResult& sweep, double theta);

// Fraction of cells whose saturation sits strictly inside (theta, 1-theta),
// a 3-cell band around the support edges excluded; denominator = all cells.
double mushy_fraction(const ScalarField& saturation, double theta);

// Max of mushy_fraction over snapshots. The initial snapshot must be a clean
// patch: saturation <= theta or within [1-theta, 1] cellwise (NotAPatchError),
// and the coefficients must be congested at every snapshot time.
double patch_test(const Trajectory& traj, double theta, FrameProvider& frames);

struct FrontRow {
  double t = 0.0;
  double position = 0.0;   // theta-level crossing of the pressure
  double nu = 1.0;         // outward normal sign: +1 right edge, -1 left edge
  double measured = 0.0;   // outward speed, centered difference of positions
  double predicted = 0.0;  // velocity law from in-front gradient and outside density
  double rel_err = 0.0;
};

struct FrontReport {
  double theta = 1e-3;
  std::vector<FrontRow> rows;
  double max_rel_err = 0.0;
};

// Tracks the free boundary of each snapshot (single interval required,
// MultipleFrontsError otherwise) and compares the measured front speed with
// the velocity law. rho_external(x, t) supplies the density just outside;
// DegenerateDenominatorError when cap - rho_external falls under 5% of cap.
FrontReport front_velocity_check(const Trajectory& traj,
                                 const std::function<double(double, double)>& rho_external,
                                 FrameProvider& frames, double t_min = 0.2);

// Runs the ordered pair in lockstep and returns the worst violation
// max(rho_lo - rho_hi)+ over all cells and snapshots. The initial fields
// must satisfy rho0_lo <= rho0_hi cellwise (ValidationError).
double ordered_pair_test(const Scenario& scenario, const ScalarField& rho0_lo,
                         const ScalarField& rho0_hi);

std::string to_json(const KSweepResult& sweep);
std::string to_json(const IdentificationReport& rep);
std::string to_json(const FrontReport& rep);

}  // namespace pmlab
