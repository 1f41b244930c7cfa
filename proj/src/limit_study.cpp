#include "pmlab/limit_study.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <json.hpp>

#include "pmlab/errors.hpp"
#include "pmlab/operators.hpp"
#include "pmlab/streamlines.hpp"

namespace pmlab {
namespace {

using ordered_json = nlohmann::ordered_json;

double l1_distance(const ScalarField& a, const ScalarField& b) {
  double acc = 0.0;
  for (int i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]) * a.grid.volume(i);
  return acc;
}

struct SweepMember {
  Trajectory traj;
  std::vector<ComplementarityResidual> comp;
  DiagnosticsReport suite;
};

}  // namespace

KSweepResult k_sweep(const Scenario& scenario, const std::vector<double>& ks) {
  return k_sweep(scenario, ks, scenario.solver);
}

KSweepResult k_sweep(const Scenario& scenario, const std::vector<double>& ks,
                     const SolverConfig& base) {
  if (ks.size() < 2) throw ValidationError("k sweep needs at least two exponents");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(ks[i] > 1.0)) throw ValidationError("k sweep: every exponent must exceed 1");
    if (i && ks[i] < ks[i - 1])
      throw ValidationError("k sweep: exponents must be sorted ascending");
  }

  const ScalarField rho0 = scenario.rho0();
  KSweepResult out;
  out.scenario = scenario;
  out.ks = ks;
  // the integral-estimate suites need a positive time cutoff strictly inside
  // the snapshot range
  out.suite_tau = base.output_times.size() >= 3 ? base.output_times[1] : -1.0;

  auto member = [&scenario, &rho0, &base, tau = out.suite_tau](double k) {
    SolverConfig cfg = base;
    cfg.k = k;
    FrameProvider frames(scenario.coeffs, scenario.grid);
    SweepMember r;
    r.traj = run(frames, rho0, cfg);
    for (const SolverState& s : r.traj.snapshots)
      r.comp.push_back(complementarity_residual(s.pressure, s.density, frames.at(s.t).cap));
    if (tau > 0.0) r.suite = estimate_suite(r.traj, tau);
    return r;
  };

  std::vector<std::future<SweepMember>> futures;
  futures.reserve(ks.size());
  for (double k : ks) futures.push_back(std::async(std::launch::async, member, k));
  for (auto& f : futures) {
    SweepMember r = f.get();
    out.trajectories.push_back(std::move(r.traj));
    out.comp_residuals.push_back(std::move(r.comp));
    out.suites.push_back(std::move(r.suite));
  }

  const int n = static_cast<int>(ks.size());
  out.d_rho.assign(n, std::vector<double>(n, 0.0));
  out.d_p.assign(n, std::vector<double>(n, 0.0));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      const auto& A = out.trajectories[a].snapshots;
      const auto& B = out.trajectories[b].snapshots;
      std::size_t m = std::min(A.size(), B.size());
      double dr = 0.0, dp = 0.0;
      for (std::size_t j = 0; j + 1 < m; ++j) {
        double w = 0.5 * (A[j + 1].t - A[j].t);
        dr += w * (l1_distance(A[j].density, B[j].density) +
                   l1_distance(A[j + 1].density, B[j + 1].density));
        dp += w * (l1_distance(A[j].pressure, B[j].pressure) +
                   l1_distance(A[j + 1].pressure, B[j + 1].pressure));
      }
      out.d_rho[a][b] = out.d_rho[b][a] = dr;
      out.d_p[a][b] = out.d_p[b][a] = dp;
    }
  return out;
}

IdentificationReport identify_density(const KSweepResult& sweep, double theta) {
  if (!(theta > 0.0 && theta < 1.0)) throw ValidationError("theta must lie in (0, 1)");
  if (sweep.trajectories.empty()) throw ValidationError("identification needs a populated sweep");

  const Scenario& sc = sweep.scenario;
  const Grid& g = sc.grid;
  FrameProvider frames(sc.coeffs, g);
  const Trajectory& proxy = sweep.trajectories.back();

  for (const SolverState& s : proxy.snapshots)
    if (!(congestion_margin(frames.at(s.t)) > 0.0))
      throw NotCongestedError("identification requires a congested scenario at t = " +
                              std::to_string(s.t));

  const auto rho0 = sc.rho0_fn();
  const auto source = sc.source_fn();
  const auto div_drift = sc.div_drift_fn();

  IdentificationReport rep;
  rep.theta = theta;
  rep.k_proxy = sweep.ks.back();

  for (const SolverState& s : proxy.snapshots) {
    const ScalarField& p = s.pressure;
    double psup = 0.0;
    for (int i = 0; i < p.size(); ++i) psup = std::max(psup, std::abs(p[i]));

    std::vector<char> plus(g.n_cells, 0), zero(g.n_cells, 0);
    for (int i = 0; i < g.n_cells; ++i) {
      plus[i] = psup > 0.0 && p[i] > theta * psup;
      zero[i] = !plus[i];
    }
    std::vector<char> plus_in = erode(plus, 3);
    std::vector<char> zero_in = erode(zero, 3);

    IdentificationRow row;
    row.t = s.t;
    const ScalarField& cap = frames.at(s.t).cap;
    for (int i = 0; i < g.n_cells; ++i) {
      if (plus_in[i]) {
        ++row.plus_cells;
        row.plus_mismatch =
            std::max(row.plus_mismatch, std::abs(s.density[i] - cap[i]) / cap[i]);
      } else if (zero_in[i]) {
        ++row.zero_cells;
        double ext = external_density(rho0, sc.coeffs.drift, g, source, div_drift,
                                      g.center(i), s.t);
        row.zero_mismatch =
            std::max(row.zero_mismatch, std::abs(s.density[i] - ext) / (ext + 1e-12));
      }
    }
    rep.max_plus = std::max(rep.max_plus, row.plus_mismatch);
    rep.max_zero = std::max(rep.max_zero, row.zero_mismatch);
    rep.rows.push_back(row);
  }
  return rep;
}

double mushy_fraction(const ScalarField& saturation, double theta) {
  if (!(theta > 0.0 && theta < 0.5)) throw ValidationError("theta must lie in (0, 0.5)");
  std::vector<char> interior;
  try {
    Support s = support(saturation, theta);
    interior = erode(s.mask, 3);
  } catch (const EmptySupportError&) {
    return 0.0;
  }
  int mushy = 0;
  for (int i = 0; i < saturation.size(); ++i)
    if (interior[i] && saturation[i] > theta && saturation[i] < 1.0 - theta) ++mushy;
  return static_cast<double>(mushy) / saturation.size();
}

double patch_test(const Trajectory& traj, double theta, FrameProvider& frames) {
  if (traj.snapshots.empty()) throw ValidationError("patch test needs snapshots");
  if (!(theta > 0.0 && theta < 0.5)) throw ValidationError("theta must lie in (0, 0.5)");

  const ScalarField& v0 = traj.snapshots.front().saturation;
  for (int i = 0; i < v0.size(); ++i) {
    bool zero_phase = v0[i] <= theta;
    bool full_phase = v0[i] >= 1.0 - theta && v0[i] <= 1.0 + 1e-12;
    if (!zero_phase && !full_phase)
      throw NotAPatchError("initial saturation " + std::to_string(v0[i]) + " at cell " +
                           std::to_string(i) + " is neither empty nor full");
  }

  double worst = 0.0;
  for (const SolverState& s : traj.snapshots) {
    if (!(congestion_margin(frames.at(s.t)) > 0.0))
      throw NotCongestedError("patch preservation requires congestion at t = " +
                              std::to_string(s.t));
    worst = std::max(worst, mushy_fraction(s.saturation, theta));
  }
  return worst;
}

namespace {

// theta-level crossing of p on the outward side of cell j (direction nu).
double crossing(const ScalarField& p, int j, int nu, double level) {
  const Grid& g = p.grid;
  double pj = p[j];
  double pn = p[j + nu];
  return g.center(j) + nu * g.h * (pj - level) / (pj - pn);
}

// least-squares slope of p over cells [first, last]
double interior_slope(const ScalarField& p, int first, int last) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = first; i <= last; ++i) {
    double x = p.grid.center(i);
    sx += x;
    sy += p[i];
    sxx += x * x;
    sxy += x * p[i];
    ++n;
  }
  double det = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / det;
}

}  // namespace

FrontReport front_velocity_check(const Trajectory& traj,
                                 const std::function<double(double, double)>& rho_external,
                                 FrameProvider& frames, double t_min) {
  const double theta = 1e-3;
  const auto& snaps = traj.snapshots;
  if (snaps.size() < 3)
    throw ValidationError("front tracking needs at least three snapshots");
  const Grid& g = snaps.front().density.grid;
  const bool both_edges = g.dim == 1;

  struct Located {
    double left = 0.0, right = 0.0;
  };
  std::vector<Located> fronts(snaps.size());

  for (std::size_t si = 0; si < snaps.size(); ++si) {
    const ScalarField& p = snaps[si].pressure;
    Support s = support(p, theta);  // EmptySupportError if p vanishes
    for (int i = s.first; i <= s.last; ++i)
      if (!s.mask[i])
        throw MultipleFrontsError("pressure support is disconnected at t = " +
                                  std::to_string(snaps[si].t));
    if (s.last >= g.n_cells - 1)
      throw SupportNearBoundaryError("front reached the outer boundary at t = " +
                                     std::to_string(snaps[si].t));
    double level = theta * *std::max_element(p.values.begin(), p.values.end());
    fronts[si].right = crossing(p, s.last, +1, level);
    if (both_edges) {
      if (s.first <= 0)
        throw SupportNearBoundaryError("front reached the left boundary at t = " +
                                       std::to_string(snaps[si].t));
      fronts[si].left = crossing(p, s.first, -1, level);
    }
  }

  FrontReport rep;
  rep.theta = theta;
  for (std::size_t si = 1; si + 1 < snaps.size(); ++si) {
    double t = snaps[si].t;
    if (t < t_min - 1e-12) continue;
    double span = snaps[si + 1].t - snaps[si - 1].t;
    const ScalarField& p = snaps[si].pressure;
    Support s = support(p, theta);
    const CoefficientFrame& frame = frames.at(t);
    double cap_sup = 0.0;
    for (int i = 0; i < g.n_cells; ++i) cap_sup = std::max(cap_sup, frame.cap[i]);

    auto emit = [&](int nu, double x_f, double measured) {
      int edge = nu > 0 ? s.last : s.first;
      int inner_far = edge - nu * 5;
      int inner_near = edge - nu * 2;
      if (inner_far < 0 || inner_far >= g.n_cells || inner_near < 0 ||
          inner_near >= g.n_cells)
        throw ValidationError("pressure support too thin for a one-sided gradient");
      double slope =
          interior_slope(p, std::min(inner_far, inner_near), std::max(inner_far, inner_near));
      double m_f = interp(frame.cap, x_f);
      double b_f = interp(frame.drift, x_f);
      double rho_out = rho_external(x_f + 2.0 * nu * g.h, t);
      double denom = m_f - rho_out;
      if (denom < 0.05 * cap_sup)
        throw DegenerateDenominatorError(
            "cap minus outside density degenerates at the front, t = " + std::to_string(t));
      FrontRow row;
      row.t = t;
      row.position = x_f;
      row.nu = nu;
      row.measured = measured;
      row.predicted = nu * (-m_f * slope / denom - b_f);
      row.rel_err =
          std::abs(row.measured - row.predicted) / std::max(std::abs(row.predicted), 1e-12);
      rep.max_rel_err = std::max(rep.max_rel_err, row.rel_err);
      rep.rows.push_back(row);
    };

    emit(+1, fronts[si].right, (fronts[si + 1].right - fronts[si - 1].right) / span);
    if (both_edges)
      emit(-1, fronts[si].left, -(fronts[si + 1].left - fronts[si - 1].left) / span);
  }
  return rep;
}

double ordered_pair_test(const Scenario& scenario, const ScalarField& rho0_lo,
                         const ScalarField& rho0_hi) {
  if (!(rho0_lo.grid == scenario.grid) || !(rho0_hi.grid == scenario.grid))
    throw ValidationError("ordered pair: both fields must live on the scenario grid");
  for (int i = 0; i < rho0_lo.size(); ++i)
    if (rho0_lo[i] > rho0_hi[i])
      throw ValidationError("ordered pair: rho0_lo must not exceed rho0_hi anywhere");
  FrameProvider frames(scenario.coeffs, scenario.grid);
  return run_ordered_pair(frames, rho0_lo, rho0_hi, scenario.solver).violation;
}

std::string to_json(const KSweepResult& sweep) {
  ordered_json j;
  j["scenario"] = sweep.scenario.id;
  j["ks"] = sweep.ks;
  j["suite_tau"] = sweep.suite_tau;
  j["d_rho"] = sweep.d_rho;
  j["d_p"] = sweep.d_p;
  ordered_json comp = ordered_json::array();
  for (std::size_t a = 0; a < sweep.comp_residuals.size(); ++a) {
    ordered_json series = ordered_json::array();
    for (std::size_t s = 0; s < sweep.comp_residuals[a].size(); ++s) {
      const ComplementarityResidual& c = sweep.comp_residuals[a][s];
      series.push_back({{"t", sweep.trajectories[a].snapshots[s].t},
                        {"residual", c.residual},
                        {"overshoot", c.overshoot}});
    }
    comp.push_back(std::move(series));
  }
  j["comp_residuals"] = std::move(comp);
  ordered_json suites = ordered_json::array();
  for (const DiagnosticsReport& rep : sweep.suites)
    suites.push_back(ordered_json::parse(to_json(rep)));
  j["suites"] = std::move(suites);
  return j.dump(2);
}

std::string to_json(const IdentificationReport& rep) {
  ordered_json j;
  j["theta"] = rep.theta;
  j["k_proxy"] = rep.k_proxy;
  j["max_plus"] = rep.max_plus;
  j["max_zero"] = rep.max_zero;
  ordered_json rows = ordered_json::array();
  for (const IdentificationRow& r : rep.rows)
    rows.push_back({{"t", r.t},
                    {"plus_mismatch", r.plus_mismatch},
                    {"zero_mismatch", r.zero_mismatch},
                    {"plus_cells", r.plus_cells},
                    {"zero_cells", r.zero_cells}});
  j["rows"] = std::move(rows);
  return j.dump(2);
}

std::string to_json(const FrontReport& rep) {
  ordered_json j;
  j["theta"] = rep.theta;
  j["max_rel_err"] = rep.max_rel_err;
  ordered_json rows = ordered_json::array();
  for (const FrontRow& r : rep.rows)
    rows.push_back({{"t", r.t},
                    {"position", r.position},
                    {"nu", r.nu},
                    {"measured", r.measured},
                    {"predicted", r.predicted},
                    {"rel_err", r.rel_err}});
  j["rows"] = std::move(rows);
  return j.dump(2);
}

}  // namespace pmlab
