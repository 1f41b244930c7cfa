#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/report.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Constitutive pressure law p = k/(k-1) * (rho/cap)^(k-1), cellwise.
ScalarField pressure_of(const ScalarField& rho, const ScalarField& cap, double k);

// w = (1/cap) * div(cap * grad p): the dissipation term of the pressure
// equation and the quantity the semi-convexity lower bounds control.
ScalarField w_field(const ScalarField& p, const ScalarField& cap);

enum class AbMode { generalized, refined };

// One snapshot row of the lower-bound check. Generalized mode: min_w is the
// minimum of w over the eroded pressure support and the bound column is
// -2/((k-1)t) - K1. Refined mode folds the forcing to the left-hand side:
// min_w is the minimum of w + F and the bound is -beta/(k-1) - 1/((k-1)t).
struct AbRow {
  double t = 0.0;
  double min_w = 0.0;
  double bound = 0.0;
  double margin = 0.0;  // min_w - bound; >= 0 means the bound holds
  std::string note;
};

struct AbReport {
  AbMode mode = AbMode::generalized;
  double k = 0.0;
  double constant_used = 0.0;    // K1 or beta the margins are held against
  double fitted_constant = 0.0;  // smallest nonnegative value with all margins >= 0
  double worst_margin = 0.0;
  int skipped = 0;  // snapshots at t <= max(0, t_min): bound undefined / excluded
  std::vector<AbRow> rows;

  bool all_nonnegative(double tol = 0.0) const;
};

// Evaluates the lower bound on each snapshot with t > max(0, t_min), over the
// relative 1e-3 pressure support eroded by 3 cells (stencil values at the
// discrete free boundary are scheme artifacts, not distributional data).
// When `constant` is given the margins are held against it; otherwise against
// the fitted constant. Refined mode requires a congested frame at every
// sampled time and throws NotCongestedError otherwise.
AbReport ab_check(const Trajectory& traj, AbMode mode, FrameProvider& frames,
                  std::optional<double> constant = std::nullopt, double t_min = 0.0);

std::string to_json(const AbReport& r);

struct ComplementarityResidual {
  double residual = 0.0;   // sup over cells of p * (cap - rho)+
  double overshoot = 0.0;  // sup over cells of (rho - cap)+
};

ComplementarityResidual complementarity_residual(const ScalarField& p, const ScalarField& rho,
                                                 const ScalarField& cap);

// max over v in [0,1] of k/(k-1) * v^(k-1) * (1-v), attained at v = (k-1)/k:
// the scalar ceiling ((1-1/k)^(k-1))/(k-1) for the residual wherever rho <= cap.
double complementarity_scalar_bound(double k);

// Volume-weighted L1 average of |div(cap grad p) + cap * forcing| over the
// theta-support of p eroded by 3 cells. Throws EmptySupportError when no
// cell survives the erosion.
double pressure_equation_residual(const ScalarField& p, const CoefficientFrame& frame,
                                  double theta);

// Uniform-norm suite over a trajectory: sup |p|, largest support radius,
// space-time integrals of |grad p|^2 and |grad p|^4 (trapezoid in time),
// sup of BV(v) for t >= tau, and the L1 moduli of d/dt v and d/dt p over
// [tau, T]. Entries are informational: pass means the value is finite.
DiagnosticsReport estimate_suite(const Trajectory& traj, double tau);

}  // namespace pmlab
