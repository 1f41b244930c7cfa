#include "pmlab/streamlines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "pmlab/errors.hpp"
#include "pmlab/operators.hpp"

namespace pmlab {

namespace {

void check_inside(const Grid& g, double x, double t) {
  double slack = 1e-12 * (g.x_hi - g.x_lo);
  if (x < g.x_lo - slack || x > g.x_hi + slack)
    throw LeftDomainError("streamline left the domain at x = " + std::to_string(x) +
                          ", t = " + std::to_string(t));
}

}  // namespace

double Streamline::at(double t) const {
  if (times.empty()) throw ValidationError("Streamline::at on an empty path");
  if (times.size() == 1 || t <= times.front()) return positions.front();
  if (t >= times.back()) return positions.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  size_t j = static_cast<size_t>(it - times.begin());
  double w = (t - times[j - 1]) / (times[j] - times[j - 1]);
  return positions[j - 1] + w * (positions[j] - positions[j - 1]);
}

Streamline integrate_streamline(const ScalarCoeff& drift, const Grid& grid, double x0,
                                double t0, double t1, double dt_ode) {
  if (!(dt_ode > 0.0)) throw ValidationError("integrate_streamline: dt_ode must be positive");
  Streamline path;
  path.x0 = x0;
  path.dt_ode = dt_ode;
  check_inside(grid, x0, t0);

  long n_steps = t1 == t0 ? 0 : static_cast<long>(std::ceil(std::abs(t1 - t0) / dt_ode - 1e-12));
  n_steps = std::max(n_steps, t1 == t0 ? 0L : 1L);
  double dt = n_steps == 0 ? 0.0 : (t1 - t0) / static_cast<double>(n_steps);

  path.times.reserve(n_steps + 1);
  path.positions.reserve(n_steps + 1);
  double x = x0;
  path.times.push_back(t0);
  path.positions.push_back(x);
  auto rhs = [&](double y, double s) { return -drift.value(y, s); };
  for (long i = 0; i < n_steps; ++i) {
    double t = t0 + dt * static_cast<double>(i);
    double k1 = rhs(x, t);
    double k2 = rhs(x + 0.5 * dt * k1, t + 0.5 * dt);
    double k3 = rhs(x + 0.5 * dt * k2, t + 0.5 * dt);
    double k4 = rhs(x + dt * k3, t + dt);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    double t_next = i + 1 == n_steps ? t1 : t + dt;
    check_inside(grid, x, t_next);
    path.times.push_back(t_next);
    path.positions.push_back(x);
  }
  if (t1 < t0) {
    std::reverse(path.times.begin(), path.times.end());
    std::reverse(path.positions.begin(), path.positions.end());
  }
  return path;
}

double inverse_point(const ScalarCoeff& drift, const Grid& grid, double x, double t,
                     double dt_ode) {
  if (t == 0.0) {
    check_inside(grid, x, t);
    return x;
  }
  Streamline back = integrate_streamline(drift, grid, x, t, 0.0, dt_ode);
  return back.positions.front();
}

double external_density(const std::function<double(double)>& rho0, const ScalarCoeff& drift,
                        const Grid& grid, const std::function<double(double, double)>& source,
                        const std::function<double(double, double)>& div_drift, double x,
                        double t, double dt_ode) {
  if (t < 0.0) throw ValidationError("external_density: t must be >= 0");
  if (t == 0.0) {
    check_inside(grid, x, t);
    return rho0(x);
  }
  // The backward path reversed is the forward path through the same points.
  Streamline path = integrate_streamline(drift, grid, x, t, 0.0, dt_ode);
  double expo = 0.0;
  for (size_t i = 0; i + 1 < path.times.size(); ++i) {
    double ga = source(path.positions[i], path.times[i]) +
                div_drift(path.positions[i], path.times[i]);
    double gb = source(path.positions[i + 1], path.times[i + 1]) +
                div_drift(path.positions[i + 1], path.times[i + 1]);
    expo += 0.5 * (ga + gb) * (path.times[i + 1] - path.times[i]);
  }
  return rho0(path.positions.front()) * std::exp(expo);
}

RetentionReport retention_check(const Trajectory& traj, const ScalarCoeff& drift,
                                const std::vector<double>& seeds, double tau,
                                std::optional<double> beta, double dt_ode) {
  if (!(tau > 0.0)) throw ValidationError("retention_check: tau must be positive");
  const auto& snaps = traj.snapshots;
  size_t i_tau = snaps.size();
  for (size_t i = 0; i < snaps.size(); ++i)
    if (std::abs(snaps[i].t - tau) <= 1e-9 * std::max(1.0, tau)) {
      i_tau = i;
      break;
    }
  if (i_tau == snaps.size())
    throw ValidationError("retention_check: tau must coincide with a snapshot time");
  if (i_tau + 1 >= snaps.size())
    throw ValidationError("retention_check: no snapshots after tau");

  RetentionReport rep;
  rep.tau = tau;
  for (const auto& s : snaps) rep.sup_pressure = std::max(rep.sup_pressure, norms(s.pressure).linf);
  const double eps_p = 1e-12 + 1e-9 * rep.sup_pressure;
  const Grid& grid = snaps.front().density.grid;

  struct SeedData {
    double x0, p_tau;
    std::vector<double> p_t, dt;  // per later snapshot
    double fitted = 0.0;
  };
  std::vector<SeedData> data;
  for (double x0 : seeds) {
    Streamline path =
        integrate_streamline(drift, grid, x0, snaps.front().t, snaps.back().t, dt_ode);
    SeedData sd;
    sd.x0 = x0;
    sd.p_tau = interp(snaps[i_tau].pressure, path.at(tau));
    for (size_t j = i_tau + 1; j < snaps.size(); ++j) {
      sd.p_t.push_back(interp(snaps[j].pressure, path.at(snaps[j].t)));
      sd.dt.push_back(snaps[j].t - tau);
    }
    for (size_t j = 0; j < sd.p_t.size(); ++j) {
      if (sd.p_tau <= 0.0) break;  // margins nonnegative for any beta
      double need = std::log(sd.p_tau / (sd.p_t[j] + eps_p)) / sd.dt[j] - 1.0 / tau;
      sd.fitted = std::max(sd.fitted, need);
    }
    sd.fitted = std::max(sd.fitted, 0.0);
    rep.fitted_beta = std::max(rep.fitted_beta, sd.fitted);
    data.push_back(std::move(sd));
  }

  rep.beta_used = beta.value_or(rep.fitted_beta);
  rep.worst_margin = std::numeric_limits<double>::infinity();
  for (const auto& sd : data) {
    RetentionRow row;
    row.x0 = sd.x0;
    row.p_tau = sd.p_tau;
    row.fitted_beta = sd.fitted;
    row.worst_margin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < sd.p_t.size(); ++j) {
      double decay = std::exp(-(rep.beta_used + 1.0 / tau) * sd.dt[j]);
      row.worst_margin = std::min(row.worst_margin, sd.p_t[j] - sd.p_tau * decay);
    }
    rep.worst_margin = std::min(rep.worst_margin, row.worst_margin);
    rep.rows.push_back(row);
  }
  if (rep.rows.empty()) rep.worst_margin = 0.0;
  return rep;
}

std::string to_json(const RetentionReport& r) {
  nlohmann::ordered_json j;
  j["tau"] = r.tau;
  j["beta_used"] = r.beta_used;
  j["fitted_beta"] = r.fitted_beta;
  j["worst_margin"] = r.worst_margin;
  j["sup_pressure"] = r.sup_pressure;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json jr;
    jr["x0"] = row.x0;
    jr["p_tau"] = row.p_tau;
    jr["worst_margin"] = row.worst_margin;
    jr["fitted_beta"] = row.fitted_beta;
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2);
}

double monotone_support_check(const Trajectory& traj, double theta, const ScalarCoeff& drift,
                              FrameProvider& frames, double dt_ode) {
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 2)
    throw ValidationError("monotone_support_check: need at least two snapshots");
  for (const auto& s : snaps)
    if (congestion_margin(frames.at(s.t)) <= 0.0)
      throw NotCongestedError("monotone_support_check: scenario is not congested");

  const Grid& grid = snaps.front().density.grid;
  double worst = 0.0;
  for (size_t i = 0; i + 1 < snaps.size(); ++i) {
    if (norms(snaps[i].pressure).linf <= 0.0) continue;
    Support s1 = support(snaps[i].pressure, theta);
    bool later_empty = norms(snaps[i + 1].pressure).linf <= 0.0;
    Support s2;
    if (!later_empty) s2 = support(snaps[i + 1].pressure, theta);

    int total = count(s1.mask), outside = 0;
    for (int c = 0; c < grid.n_cells; ++c) {
      if (!s1.mask[c]) continue;
      if (later_empty) {
        ++outside;
        continue;
      }
      double landed;
      try {
        Streamline hop = integrate_streamline(drift, grid, grid.center(c), snaps[i].t,
                                              snaps[i + 1].t, dt_ode);
        landed = hop.positions.back();
      } catch (const LeftDomainError&) {
        ++outside;
        continue;
      }
      int j = static_cast<int>(std::floor((landed - grid.x_lo) / grid.h));
      if (j < 0 || j >= grid.n_cells || !s2.mask[j]) ++outside;
    }
    if (total > 0) worst = std::max(worst, static_cast<double>(outside) / total);
  }
  return worst;
}

}  // namespace pmlab
