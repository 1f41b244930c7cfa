#pragma once

#include <optional>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"

namespace pmlab {

struct SolverConfig {
  double k = 2.0;  // polytropic exponent, > 1
  double cfl_safety = 0.4;
  double t_end = 1.0;
  std::vector<double> output_times;  // sorted; snapshots are taken exactly here
  std::optional<long> regularization_n;  // Off by default; floor = cap/n
  long max_steps = 20'000'000;
  double v_cap = 3.0;  // saturation is clipped here before exponentiation

  bool operator==(const SolverConfig&) const = default;
};

// Density plus the derived fields the diagnostics work with. saturation is
// density/cap and pressure = k/(k-1) * saturation^(k-1), both at `t`.
struct SolverState {
  ScalarField density, saturation, pressure;
  double t = 0.0;
  long steps = 0;
};

struct LedgerRow {
  long step = 0;
  double t = 0, dt = 0, mass = 0, source_integral = 0, clamped_mass = 0;
};

struct Trajectory {
  SolverConfig config;
  std::vector<SolverState> snapshots;
  std::vector<LedgerRow> ledger;
  double initial_mass = 0.0;
  double clamped_mass_total = 0.0;
  long cap_events = 0;  // saturation hit v_cap; must stay 0 in accepted runs
};

// Stability bound for one explicit step. Diffusivity D = k*cap*v^(k-1); the
// denominator floor (1e-8) only matters when everything else vanishes.
double cfl_dt(const SolverState& state, const CoefficientFrame& frame,
              const SolverConfig& config);

// One forward-Euler step of dt (<= cfl_dt, else CflViolationError), face
// fluxes cap*d(v^k)/dx plus upwinded density*drift, zero-flux boundaries.
// frame must be sampled at state.t. The returned state's saturation and
// pressure are rebuilt against the same frame; run() refreshes them against
// the advanced time before anything observes them.
SolverState step(const SolverState& state, const CoefficientFrame& frame,
                 const SolverConfig& config, double dt);

SolverState make_state(const ScalarField& rho0, const CoefficientFrame& frame,
                       const SolverConfig& config);

// Lift the initial data onto the floor cap/n (Appendix-style regularization).
ScalarField regularize_initial(const ScalarField& rho0, const ScalarField& cap0, long n);

Trajectory run(FrameProvider& frames, const ScalarField& rho0, const SolverConfig& config);

// Two runs advanced in lockstep with a shared dt so the scheme's
// monotonicity applies verbatim; returns the worst ordering violation
// max(lo - hi)+ over snapshots together with the hi run's sup norm.
struct OrderedPairResult {
  double violation = 0.0;
  double hi_linf = 0.0;
};
OrderedPairResult run_ordered_pair(FrameProvider& frames, const ScalarField& rho0_lo,
                                   const ScalarField& rho0_hi, const SolverConfig& config);

std::vector<double> linspace_times(double t0, double t1, int n_intervals);

}  // namespace pmlab
