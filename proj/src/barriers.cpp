#include "pmlab/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "pmlab/errors.hpp"
#include "pmlab/operators.hpp"

namespace pmlab {

double RadialPhi::slope(double r) const { return r / (dim * cap.value(r, t)); }

double RadialPhi::value(double r) const {
  if (r <= 0.0) return 0.0;
  double dr = rs[1] - rs[0];
  size_t last = rs.size() - 1;
  size_t j = std::min(static_cast<size_t>(r / dr), last);
  // Trapezoid over the partial segment with the exact integrand keeps the
  // profile C1 and consistent with the node accumulation.
  return phis[j] + 0.5 * (r - rs[j]) * (slope(rs[j]) + slope(r));
}

RadialPhi build_radial_phi(const ScalarCoeff& cap, double t, double r_max, int n, int dim) {
  if (dim != 1 && dim != 2) throw ValidationError("build_radial_phi: dim must be 1 or 2");
  if (!(r_max > 0.0) || n < 8) throw ValidationError("build_radial_phi: need r_max > 0, n >= 8");

  RadialPhi phi;
  phi.t = t;
  phi.dim = dim;
  phi.r_max = r_max;
  phi.cap = cap;
  phi.rs.resize(n + 1);
  phi.phis.resize(n + 1);
  double dr = r_max / n;
  for (int j = 0; j <= n; ++j) {
    phi.rs[j] = j * dr;
    if (cap.value(phi.rs[j], t) < 1e-12)
      throw ValidationError("build_radial_phi: cap vanishes on the radius range");
  }
  phi.phis[0] = 0.0;
  for (int j = 0; j < n; ++j)
    phi.phis[j + 1] =
        phi.phis[j] + 0.5 * dr * (phi.slope(phi.rs[j]) + phi.slope(phi.rs[j + 1]));

  for (int j = 1; j <= n; ++j) {
    double g = phi.slope(phi.rs[j]);
    phi.k_phi = std::max(phi.k_phi, g * g / phi.phis[j]);
  }

  if (cap.time_dependent()) {
    // d/dt phi by differentiating under the integral: integrand -r m_t / (d m^2).
    auto gt = [&](double r) {
      double m = cap.value(r, t);
      return -r * cap.dt(r, t) / (dim * m * m);
    };
    double acc = 0.0;
    for (int j = 1; j <= n; ++j) {
      acc += 0.5 * dr * (gt(phi.rs[j - 1]) + gt(phi.rs[j]));
      phi.m_phi = std::max(phi.m_phi, std::abs(acc) / phi.phis[j]);
    }
  }
  return phi;
}

double SuperBarrierZ::value(double x, double t) const {
  return alpha * std::max(R(t) - phi.value(std::abs(x)), 0.0);
}

SuperBarrierZ build_super_Z(const RadialPhi& phi, double gamma, double alpha, double b_sup) {
  if (!(gamma > 1.0)) throw ValidationError("build_super_Z: gamma must exceed 1");
  if (!(alpha > 0.0)) throw ValidationError("build_super_Z: alpha must be positive");
  SuperBarrierZ z;
  z.phi = phi;
  z.alpha = alpha;
  z.gamma = gamma;
  z.m_drift = 0.5 * b_sup * b_sup;
  return z;
}

double SubBarrierPi::value(double x, double t) const {
  double d = x - center(t);
  return gamma * gamma - r_pi * r_pi * std::exp(2.0 * lip_b * t) * d * d;
}

double SubBarrierPi::positivity_radius(double t) const {
  return gamma / r_pi * std::exp(-lip_b * t);
}

SubBarrierPi build_sub_Pi(double gamma, double r_pi, const CoefficientSpec& coeffs,
                          const Grid& grid, double x0, double t_max, double dt_ode) {
  if (!(gamma > 0.0) || gamma > r_pi / 10.0)
    throw ValidationError("build_sub_Pi: need 0 < gamma <= r_pi / 10");
  if (congestion_margin(eval_frame(coeffs, grid, 0.0)) <= 0.0)
    throw NotCongestedError("build_sub_Pi: scenario is not congested");

  SubBarrierPi pi;
  pi.gamma = gamma;
  pi.r_pi = r_pi;
  pi.x0 = x0;
  double lip = 0.0;
  for (double t : {0.0, 0.5 * t_max, t_max})
    for (int i = 0; i + 1 < grid.n_cells; ++i) {
      double db = coeffs.drift.value(grid.center(i + 1), t) - coeffs.drift.value(grid.center(i), t);
      lip = std::max(lip, std::abs(db) / grid.h);
    }
  pi.lip_b = 1.1 * lip;
  pi.path = integrate_streamline(coeffs.drift, grid, x0, 0.0, t_max, dt_ode);
  return pi;
}

namespace {

ResidualStats residual_impl(const std::function<double(double, double)>& barrier,
                            BarrierSense sense, FrameProvider& frames, double k,
                            const std::vector<double>& times, double region_lo,
                            double region_hi) {
  if (times.empty()) throw ValidationError("barrier_residual: no times given");
  const Grid& grid = frames.grid();

  std::vector<int> region;
  for (int i = 0; i < grid.n_cells; ++i) {
    double x = grid.center(i);
    if (x >= region_lo && x <= region_hi) region.push_back(i);
  }
  if (region.empty()) throw ValidationError("barrier_residual: region contains no cells");

  ResidualStats stats;
  stats.sense = sense;
  stats.times = times;
  stats.cells = static_cast<int>(region.size());
  stats.min_res = std::numeric_limits<double>::infinity();
  stats.max_res = -std::numeric_limits<double>::infinity();

  double max_b = 0.0, max_f = 0.0, max_g = 0.0;
  for (double t : times) {
    const CoefficientFrame& frame = frames.at(t);
    ScalarField bf(grid, t);
    for (int i = 0; i < grid.n_cells; ++i) bf[i] = barrier(grid.center(i), t);

    std::vector<char> positive(grid.n_cells, 0);
    for (int i = 0; i < grid.n_cells; ++i) positive[i] = bf[i] > 0.0 ? 1 : 0;
    std::vector<char> eroded = erode(positive, 3);
    for (int i : region)
      if (!eroded[i])
        throw RegionOutsidePositivityError(
            "barrier_residual: region cell leaves the eroded positivity set at t = " +
            std::to_string(t));

    VectorField grad = gradient(bf);
    ScalarField w = div_cap_grad(frame.cap, bf);
    for (int i = 0; i < grid.n_cells; ++i) w[i] /= frame.cap[i];

    double dt = std::max(1e-6, 1e-6 * std::abs(t));
    for (int i : region) {
      double x = grid.center(i);
      double bt = t - dt >= 0.0
                      ? (barrier(x, t + dt) - barrier(x, t - dt)) / (2.0 * dt)
                      : (barrier(x, t + dt) - barrier(x, t)) / dt;
      double res = bt - grad[i] * grad[i] - grad[i] * frame.drift[i] -
                   (k - 1.0) * bf[i] * (w[i] + frame.forcing[i]);
      stats.min_res = std::min(stats.min_res, res);
      stats.max_res = std::max(stats.max_res, res);
      max_b = std::max(max_b, bf[i]);
      max_f = std::max(max_f, std::abs(frame.forcing[i]));
      max_g = std::max(max_g, std::abs(grad[i]));
    }
  }

  double h2 = grid.h * grid.h;
  stats.tol = 1e-8 + 50.0 * h2 * (1.0 + max_g * max_g + (k - 1.0) * max_b * (1.0 + max_f));
  stats.ok = sense == BarrierSense::super ? stats.min_res >= -stats.tol
                                          : stats.max_res <= stats.tol;
  return stats;
}

}  // namespace

ResidualStats barrier_residual(const SuperBarrierZ& z, FrameProvider& frames, double k,
                               const std::vector<double>& times, double region_lo,
                               double region_hi) {
  auto fn = [&z](double x, double t) { return z.value(x, t); };
  return residual_impl(fn, BarrierSense::super, frames, k, times, region_lo, region_hi);
}

ResidualStats barrier_residual(const SubBarrierPi& pi, FrameProvider& frames, double k,
                               const std::vector<double>& times, double region_lo,
                               double region_hi) {
  auto fn = [&pi](double x, double t) { return pi.value(x, t); };
  return residual_impl(fn, BarrierSense::sub, frames, k, times, region_lo, region_hi);
}

std::string to_json(const ResidualStats& r) {
  nlohmann::ordered_json j;
  j["sense"] = r.sense == BarrierSense::super ? "super" : "sub";
  j["min_res"] = r.min_res;
  j["max_res"] = r.max_res;
  j["tol"] = r.tol;
  j["cells"] = r.cells;
  j["times"] = r.times;
  j["ok"] = r.ok;
  return j.dump(2);
}

namespace {

template <typename Barrier>
double compare_impl(const Barrier& barrier, const Trajectory& traj, bool upper) {
  if (traj.snapshots.empty()) throw ValidationError("comparison_vs_solver: empty trajectory");
  const auto& first = traj.snapshots.front();
  const Grid& grid = first.density.grid;
  for (int i = 0; i < grid.n_cells; ++i) {
    double b = barrier.value(grid.center(i), first.t);
    double p = first.pressure[i];
    double slack = 1e-12 * (1.0 + std::abs(b) + std::abs(p));
    bool ordered = upper ? p <= b + slack : std::max(b, 0.0) <= p + slack;
    if (!ordered)
      throw InitialOrderingError("comparison_vs_solver: barrier does not dominate at t = " +
                                 std::to_string(first.t));
  }
  double violation = 0.0;
  for (const auto& snap : traj.snapshots)
    for (int i = 0; i < grid.n_cells; ++i) {
      double b = barrier.value(grid.center(i), snap.t);
      double p = snap.pressure[i];
      violation = std::max(violation, upper ? p - b : std::max(b, 0.0) - p);
    }
  return std::max(violation, 0.0);
}

}  // namespace

double comparison_vs_solver(const SuperBarrierZ& z, const Trajectory& traj) {
  return compare_impl(z, traj, true);
}

double comparison_vs_solver(const SubBarrierPi& pi, const Trajectory& traj) {
  return compare_impl(pi, traj, false);
}

double fit_alpha(const RadialPhi& phi, double gamma, double b_sup, FrameProvider& frames,
                 double k, const std::vector<double>& times, double region_lo,
                 double region_hi) {
  for (double alpha = 1.0; alpha <= 1024.0; alpha *= 2.0) {
    SuperBarrierZ z = build_super_Z(phi, gamma, alpha, b_sup);
    ResidualStats stats = barrier_residual(z, frames, k, times, region_lo, region_hi);
    if (stats.ok) return alpha;
  }
  throw ValidationError("fit_alpha: no power-of-two alpha up to 1024 passes");
}

}  // namespace pmlab
