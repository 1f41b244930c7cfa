#include "pmlab/pressure_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "pmlab/errors.hpp"
#include "pmlab/operators.hpp"

namespace pmlab {

ScalarField pressure_of(const ScalarField& rho, const ScalarField& cap, double k) {
  if (!(k > 1.0)) throw ValidationError("pressure_of: k must exceed 1");
  ScalarField p(rho.grid, rho.time);
  const double coef = k / (k - 1.0);
  for (int i = 0; i < rho.size(); ++i) {
    double v = std::max(rho[i] / cap[i], 0.0);
    p[i] = coef * std::pow(v, k - 1.0);
  }
  return p;
}

ScalarField w_field(const ScalarField& p, const ScalarField& cap) {
  ScalarField w = div_cap_grad(cap, p);
  for (int i = 0; i < w.size(); ++i) w[i] /= cap[i];
  return w;
}

bool AbReport::all_nonnegative(double tol) const {
  for (const auto& r : rows)
    if (r.margin < -tol) return false;
  return true;
}

AbReport ab_check(const Trajectory& traj, AbMode mode, FrameProvider& frames,
                  std::optional<double> constant, double t_min) {
  AbReport rep;
  rep.mode = mode;
  rep.k = traj.config.k;
  const double k = rep.k;

  // Pass 1: the raw minima; the bound columns need the constant, fitted below.
  struct Raw {
    double t, min_w;
    bool empty;
  };
  std::vector<Raw> raws;
  double fitted = 0.0;
  for (const auto& snap : traj.snapshots) {
    if (snap.t <= 0.0 || snap.t < t_min) {
      ++rep.skipped;
      continue;
    }
    const CoefficientFrame& frame = frames.at(snap.t);
    if (mode == AbMode::refined && congestion_margin(frame) <= 0.0)
      throw NotCongestedError("ab_check: refined bound needs a congested frame");

    if (norms(snap.pressure).linf <= 0.0) {
      raws.push_back({snap.t, 0.0, true});
      continue;
    }
    Support s = support(snap.pressure, 1e-3);
    std::vector<char> region = erode(s.mask, 3);
    if (count(region) == 0) {
      raws.push_back({snap.t, 0.0, true});
      continue;
    }
    ScalarField w = w_field(snap.pressure, frame.cap);
    double mn = std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.size(); ++i) {
      if (!region[i]) continue;
      double val = w[i] + (mode == AbMode::refined ? frame.forcing[i] : 0.0);
      mn = std::min(mn, val);
    }
    raws.push_back({snap.t, mn, false});
    double deficit = mode == AbMode::generalized
                         ? -mn - 2.0 / ((k - 1.0) * snap.t)
                         : (k - 1.0) * (-mn) - 1.0 / snap.t;
    fitted = std::max(fitted, deficit);
  }
  rep.fitted_constant = std::max(fitted, 0.0);
  rep.constant_used = constant.value_or(rep.fitted_constant);

  const double c = rep.constant_used;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& raw : raws) {
    AbRow row;
    row.t = raw.t;
    row.min_w = raw.min_w;
    row.bound = mode == AbMode::generalized
                    ? -2.0 / ((k - 1.0) * raw.t) - c
                    : -c / (k - 1.0) - 1.0 / ((k - 1.0) * raw.t);
    row.margin = row.min_w - row.bound;
    if (raw.empty) row.note = "empty support";
    worst = std::min(worst, row.margin);
    rep.rows.push_back(std::move(row));
  }
  rep.worst_margin = rep.rows.empty() ? 0.0 : worst;
  return rep;
}

std::string to_json(const AbReport& r) {
  nlohmann::ordered_json j;
  j["mode"] = r.mode == AbMode::generalized ? "generalized" : "refined";
  j["k"] = r.k;
  j["constant_used"] = r.constant_used;
  j["fitted_constant"] = r.fitted_constant;
  j["worst_margin"] = r.worst_margin;
  j["skipped_snapshots"] = r.skipped;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json jr;
    jr["t"] = row.t;
    jr["min_w"] = row.min_w;
    jr["bound"] = row.bound;
    jr["margin"] = row.margin;
    if (!row.note.empty()) jr["note"] = row.note;
    j["rows"].push_back(std::move(jr));
  }
  return j.dump(2);
}

ComplementarityResidual complementarity_residual(const ScalarField& p, const ScalarField& rho,
                                                 const ScalarField& cap) {
  ComplementarityResidual out;
  for (int i = 0; i < p.size(); ++i) {
    double slack = cap[i] - rho[i];
    if (slack >= 0.0)
      out.residual = std::max(out.residual, p[i] * slack);
    else
      out.overshoot = std::max(out.overshoot, -slack);
  }
  return out;
}

double complementarity_scalar_bound(double k) {
  return std::pow(1.0 - 1.0 / k, k - 1.0) / (k - 1.0);
}

double pressure_equation_residual(const ScalarField& p, const CoefficientFrame& frame,
                                  double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw ValidationError("pressure_equation_residual: theta must lie in (0,1)");
  Support s = support(p, theta);
  std::vector<char> region = erode(s.mask, 3);
  if (count(region) == 0)
    throw EmptySupportError("pressure_equation_residual: support vanished under erosion");

  ScalarField lhs = div_cap_grad(frame.cap, p);
  double acc = 0.0, vol = 0.0;
  for (int i = 0; i < p.size(); ++i) {
    if (!region[i]) continue;
    double cell = p.grid.volume(i);
    acc += std::abs(lhs[i] + frame.cap[i] * frame.forcing[i]) * cell;
    vol += cell;
  }
  return acc / vol;
}

namespace {

double support_radius(const ScalarField& u) {
  try {
    Support s = support(u, 1e-3);
    return u.grid.dim == 2 ? s.hi : std::max(std::abs(s.lo), std::abs(s.hi));
  } catch (const EmptySupportError&) {
    return 0.0;
  }
}

double l1_diff(const ScalarField& a, const ScalarField& b) {
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]) * a.grid.volume(i);
  return acc;
}

CheckResult info(const std::string& name, double value) {
  CheckResult c;
  c.name = name;
  c.value = value;
  c.bound = std::numeric_limits<double>::quiet_NaN();
  c.margin = 0.0;
  c.pass = std::isfinite(value);
  c.note = "informational";
  return c;
}

}  // namespace

DiagnosticsReport estimate_suite(const Trajectory& traj, double tau) {
  if (traj.snapshots.size() < 2)
    throw ValidationError("estimate_suite: need at least two snapshots");
  const double t0 = traj.snapshots.front().t;
  const double t1 = traj.snapshots.back().t;
  if (!(tau > t0 && tau < t1))
    throw ValidationError("estimate_suite: tau must lie strictly inside the time range");

  double sup_p = 0.0, radius = 0.0, bv_sup = 0.0;
  std::vector<double> g2, g4, times;
  for (const auto& snap : traj.snapshots) {
    sup_p = std::max(sup_p, norms(snap.pressure).linf);
    radius = std::max(radius, support_radius(snap.density));
    Norms gn = norms(gradient(snap.pressure));
    g2.push_back(gn.l2 * gn.l2);
    g4.push_back(gn.l4 * gn.l4 * gn.l4 * gn.l4);
    times.push_back(snap.t);
    if (snap.t >= tau - 1e-12) bv_sup = std::max(bv_sup, bv_seminorm(snap.saturation));
  }

  double int_g2 = 0.0, int_g4 = 0.0;
  for (size_t i = 0; i + 1 < times.size(); ++i) {
    double dt = times[i + 1] - times[i];
    int_g2 += 0.5 * (g2[i] + g2[i + 1]) * dt;
    int_g4 += 0.5 * (g4[i] + g4[i + 1]) * dt;
  }

  double dt_v = 0.0, dt_p = 0.0;
  for (size_t i = 0; i + 1 < traj.snapshots.size(); ++i) {
    if (traj.snapshots[i].t < tau - 1e-12) continue;
    dt_v += l1_diff(traj.snapshots[i + 1].saturation, traj.snapshots[i].saturation);
    dt_p += l1_diff(traj.snapshots[i + 1].pressure, traj.snapshots[i].pressure);
  }

  DiagnosticsReport rep;
  rep.add(info("sup_pressure_linf", sup_p));
  rep.add(info("support_radius_sup", radius));
  rep.add(info("gradp_sq_spacetime", int_g2));
  rep.add(info("gradp_4th_spacetime", int_g4));
  rep.add(info("bv_saturation_sup", bv_sup));
  rep.add(info("dt_saturation_l1", dt_v));
  rep.add(info("dt_pressure_l1", dt_p));
  return rep;
}

}  // namespace pmlab
