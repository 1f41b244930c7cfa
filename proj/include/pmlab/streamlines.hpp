#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Characteristic path X'(t) = -drift(X, t). times ascend even when the
// integration ran backward; positions[i] is X(times[i]).
struct Streamline {
  double x0 = 0.0;     // seed, given at the integration's start time
  double dt_ode = 0.0;
  std::vector<double> times;
  std::vector<double> positions;

  double at(double t) const;  // linear interpolation, clamped to the ends
};

// Classical 4th-order one-step integration from t0 to t1 (backward when
// t1 < t0). Throws LeftDomainError as soon as any stage leaves the grid.
Streamline integrate_streamline(const ScalarCoeff& drift, const Grid& grid, double x0,
                                double t0, double t1, double dt_ode = 1e-3);

/// Foot of the characteristic through (x, t): integrate back to time zero.
double inverse_point(const ScalarCoeff& drift, const Grid& grid, double x, double t,
                     double dt_ode = 1e-3);

// rho0(X(-t,x)) * exp( integral over [0,t] of (source + div drift) along the
// path ), the characteristic-form solution of the continuity equation
// d/dt rho = div(rho * drift) + source * rho. The exponent is a trapezoid
// over the backward path's own nodes, reused in forward order.
double external_density(const std::function<double(double)>& rho0, const ScalarCoeff& drift,
                        const Grid& grid, const std::function<double(double, double)>& source,
                        const std::function<double(double, double)>& div_drift, double x,
                        double t, double dt_ode = 1e-3);

struct RetentionRow {
  double x0 = 0.0;
  double p_tau = 0.0;         // pressure at the streamline point at time tau
  double worst_margin = 0.0;  // min over later snapshots of p - p_tau * decay
  double fitted_beta = 0.0;   // smallest beta >= 0 closing this seed's margins
};

struct RetentionReport {
  double tau = 0.0;
  double beta_used = 0.0;
  double fitted_beta = 0.0;  // max over seeds
  double worst_margin = 0.0;
  double sup_pressure = 0.0;  // sup over the trajectory, for relative tolerances
  std::vector<RetentionRow> rows;
};

// Along each seed's streamline, checks p(X(t),t) >= p(X(tau),tau) *
// exp(-(beta + 1/tau)(t - tau)) for every snapshot time t > tau. tau must
// match a snapshot time. beta defaults to the fitted value.
RetentionReport retention_check(const Trajectory& traj, const ScalarCoeff& drift,
                                const std::vector<double>& seeds, double tau,
                                std::optional<double> beta = std::nullopt,
                                double dt_ode = 1e-3);

std::string to_json(const RetentionReport& r);

// For consecutive snapshots, transports the relative theta-support of the
// pressure along streamlines and reports the worst fraction of cells landing
// outside the later support. Congested scenarios only (NotCongestedError).
double monotone_support_check(const Trajectory& traj, double theta, const ScalarCoeff& drift,
                              FrameProvider& frames, double dt_ode = 1e-3);

}  // namespace pmlab
