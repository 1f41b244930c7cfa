#include "pmlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pmlab/barriers.hpp"
#include "pmlab/coefficients.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/io.hpp"
#include "pmlab/limit_study.hpp"
#include "pmlab/operators.hpp"
#include "pmlab/pressure_diagnostics.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"
#include "pmlab/streamlines.hpp"

namespace pmlab {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// --------------------------------------------------------------- simulate

struct SimulateOpts {
  std::string scenario;
  std::optional<double> k;
  std::optional<double> t_end;
  std::optional<long> outputs;
  std::string out;
};

int cmd_simulate(const SimulateOpts& o) {
  Scenario s = load_scenario(o.scenario);
  bool touched = false;
  if (o.k) {
    if (!(*o.k > 1.0)) throw ValidationError("--k must be > 1");
    s.solver.k = *o.k;
    touched = true;
  }
  if (o.outputs && *o.outputs < 1) throw ValidationError("--outputs must be >= 1");
  if (o.t_end) {
    if (!(*o.t_end > 0.0)) throw ValidationError("--t-end must be positive");
    long n = o.outputs ? *o.outputs
                       : std::max<long>(1, static_cast<long>(s.solver.output_times.size()) - 1);
    s.solver.t_end = *o.t_end;
    s.solver.output_times = linspace_times(0.0, *o.t_end, n);
    touched = true;
  } else if (o.outputs) {
    s.solver.output_times = linspace_times(0.0, s.solver.t_end, *o.outputs);
    touched = true;
  }
  if (touched) validate_scenario(s);

  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);

  std::string dir = o.out.empty() ? "run_" + s.id : o.out;
  write_run(s, traj, dir);

  double mass_end = traj.ledger.empty() ? traj.initial_mass : traj.ledger.back().mass;
  double source_total = 0.0;
  for (const LedgerRow& row : traj.ledger) source_total += row.source_integral;
  double m0 = traj.initial_mass;
  double defect = std::abs(mass_end - m0 - source_total);
  double budget = 1e-8 * std::max(m0, 1e-30) + traj.clamped_mass_total;
  bool mass_ok =
      defect <= budget && traj.clamped_mass_total <= 1e-8 * std::max(m0, 1e-30);

  std::cout << "scenario " << s.id << ": " << traj.snapshots.back().steps << " steps to t = "
            << fmt(s.solver.t_end) << ", " << traj.snapshots.size() << " snapshots -> " << dir
            << "\n";
  std::cout << "mass: initial " << fmt(m0) << ", final " << fmt(mass_end) << ", source total "
            << fmt(source_total) << ", balance defect " << fmt(defect) << " (budget "
            << fmt(budget) << ") -> " << (mass_ok ? "ok" : "VIOLATED") << "\n";
  if (traj.cap_events > 0)
    std::cout << "note: the saturation guard engaged " << traj.cap_events
              << " time(s); inspect the ledger\n";
  return mass_ok ? 0 : 1;
}

// ------------------------------------------------------------------ sweep

struct SweepOpts {
  std::string scenario;
  std::vector<double> ks;
  std::string out;
};

int cmd_sweep(const SweepOpts& o) {
  Scenario s = load_scenario(o.scenario);
  KSweepResult sweep = k_sweep(s, o.ks);  // validates the exponent list
  std::string dir = o.out.empty() ? "sweep_" + s.id : o.out;
  write_sweep(sweep, dir);
  for (size_t i = 0; i + 1 < sweep.ks.size(); ++i) {
    std::cout << "d(k=" << fmt(sweep.ks[i]) << ", k=" << fmt(sweep.ks[i + 1]) << "): density "
              << fmt(sweep.d_rho[i][i + 1]) << ", pressure " << fmt(sweep.d_p[i][i + 1])
              << "\n";
  }
  std::cout << "wrote " << dir << "\n";
  return 0;
}

// --------------------------------------------------------------- diagnose

struct DiagnoseOpts {
  std::string dir;
  bool ab = false, estimates = false, complementarity = false, retention = false, front = false;
  std::string mode;                // "", "generalized", "refined"
  std::optional<double> constant;  // hold the lower bound against this instead of fitting
  double t_min = 0.0;
  std::optional<double> tau;
  std::optional<double> beta;
  long seeds = 20;
  double front_tol = 0.15;
  double front_t_min = 0.2;
};

int cmd_diagnose(const DiagnoseOpts& o) {
  LoadedRun lr = load_run(o.dir);
  const Scenario& s = lr.scenario;
  Trajectory& traj = lr.traj;
  FrameProvider frames(s.coeffs, s.grid);

  bool any = o.ab || o.estimates || o.complementarity || o.retention || o.front;
  bool do_ab = o.ab || !any;
  bool do_est = o.estimates || !any;
  bool do_comp = o.complementarity || !any;
  bool all_ok = true;

  if (do_ab) {
    AbMode mode = s.congested ? AbMode::refined : AbMode::generalized;
    if (o.mode == "generalized")
      mode = AbMode::generalized;
    else if (o.mode == "refined")
      mode = AbMode::refined;
    else if (!o.mode.empty())
      throw ValidationError("--mode must be 'generalized' or 'refined'");
    AbReport rep = ab_check(traj, mode, frames, o.constant, o.t_min);
    std::cout << "== semi-convexity lower bound ==\n" << to_json(rep) << "\n";
    if (rep.skipped > 0)
      std::cout << "note: " << rep.skipped << " snapshot(s) excluded (t <= "
                << fmt(std::max(0.0, o.t_min)) << "; the bound degenerates as t -> 0)\n";
    bool ok = rep.all_nonnegative(1e-12 * std::max(1.0, std::abs(rep.constant_used)));
    all_ok = all_ok && ok;
    std::cout << (ok ? "lower bound holds" : "lower bound VIOLATED") << " (worst margin "
              << fmt(rep.worst_margin) << ", constant " << fmt(rep.constant_used) << ")\n";
  }

  if (do_est) {
    double tau = o.tau ? *o.tau
                       : (traj.snapshots.size() >= 3
                              ? traj.snapshots[1].t
                              : 0.5 * (traj.snapshots.front().t + traj.snapshots.back().t));
    DiagnosticsReport rep = estimate_suite(traj, tau);
    std::cout << "== uniform-norm estimates (tau = " << fmt(tau) << ") ==\n" << to_json(rep)
              << "\n";
    all_ok = all_ok && rep.all_pass();
    std::cout << (rep.all_pass() ? "all estimates finite" : "estimate check FAILED") << "\n";
  }

  if (do_comp) {
    double k = traj.config.k;
    double scalar = complementarity_scalar_bound(k);
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    bool ok = true;
    for (const SolverState& snap : traj.snapshots) {
      const CoefficientFrame& fr = frames.at(snap.t);
      double cap_sup = 0.0;
      for (double c : fr.cap.values) cap_sup = std::max(cap_sup, c);
      ComplementarityResidual cr =
          complementarity_residual(snap.pressure, snap.density, fr.cap);
      double bound = cap_sup * scalar;
      bool row_ok = cr.residual <= bound * (1.0 + 1e-9);
      ok = ok && row_ok;
      nlohmann::ordered_json jr;
      jr["t"] = snap.t;
      jr["residual"] = cr.residual;
      jr["bound"] = bound;
      jr["overshoot"] = cr.overshoot;
      jr["pass"] = row_ok;
      rows.push_back(jr);
    }
    nlohmann::ordered_json j;
    j["k"] = k;
    j["scalar_bound"] = scalar;
    j["rows"] = rows;
    j["all_pass"] = ok;
    std::cout << "== complementarity residual ==\n" << j.dump(2) << "\n";
    all_ok = all_ok && ok;
    std::cout << (ok ? "residual within the stiffness ceiling" : "residual EXCEEDS the ceiling")
              << "\n";
  }

  if (o.retention) {
    if (traj.snapshots.size() < 3)
      throw ValidationError("retention needs at least three snapshots");
    double tau = o.tau ? *o.tau : traj.snapshots[1].t;
    Support sp = support(traj.snapshots.front().pressure, 1e-3);
    if (sp.last - sp.first < 4)
      throw ValidationError("initial pressure support too thin to seed streamlines");
    double lo = s.grid.center(sp.first + 1);
    double hi = s.grid.center(sp.last - 1);
    long n = std::max<long>(1, o.seeds);
    std::vector<double> seeds;
    for (long j = 0; j < n; ++j)
      seeds.push_back(lo + (static_cast<double>(j) + 0.5) * (hi - lo) / static_cast<double>(n));
    RetentionReport rep = retention_check(traj, s.coeffs.drift, seeds, tau, o.beta);
    std::cout << "== streamline pressure retention ==\n" << to_json(rep) << "\n";
    bool ok = rep.worst_margin >= -1e-3 * std::max(rep.sup_pressure, 1e-30);
    all_ok = all_ok && ok;
    std::cout << (ok ? "retention holds" : "retention VIOLATED") << " (worst margin "
              << fmt(rep.worst_margin) << ")\n";
  }

  if (o.front) {
    auto rho0 = s.rho0_fn();
    auto src = s.source_fn();
    auto divb = s.div_drift_fn();
    const ScalarCoeff drift = s.coeffs.drift;
    const Grid grid = s.grid;
    auto rho_ext = [rho0, drift, grid, src, divb](double x, double t) {
      return external_density(rho0, drift, grid, src, divb, x, t);
    };
    FrontReport rep = front_velocity_check(traj, rho_ext, frames, o.front_t_min);
    std::cout << "== front velocity law ==\n" << to_json(rep) << "\n";
    bool ok = rep.max_rel_err <= o.front_tol;
    all_ok = all_ok && ok;
    std::cout << (ok ? "front speeds match the velocity law" : "front speed MISMATCH")
              << " (worst relative error " << fmt(rep.max_rel_err) << ", tolerance "
              << fmt(o.front_tol) << ")\n";
  }

  return all_ok ? 0 : 1;
}

// --------------------------------------------------------------- barriers

struct BarrierOpts {
  std::string scenario;
  bool z = false, pi = false;
  std::optional<double> k;
  double z_gamma = 7.0;
  std::optional<double> alpha;
  double r_pi = 0.25;
  std::optional<double> pi_gamma;
  std::optional<double> x0;
  long eval_n = 2048;
  std::vector<double> times;
  std::string out;
};

template <class Barrier>
void write_barrier_profile(const std::string& path, const Barrier& bar,
                           const std::vector<double>& times, const Grid& g, double lo,
                           double hi) {
  std::vector<double> ct, cx, cv;
  for (double t : times)
    for (int i = 0; i < g.n_cells; ++i) {
      double x = g.center(i);
      if (x < lo || x > hi) continue;
      ct.push_back(t);
      cx.push_back(x);
      cv.push_back(bar.value(x, t));
    }
  write_csv(path, {"t", "x", "value"}, {ct, cx, cv});
}

int cmd_barriers(const BarrierOpts& o) {
  Scenario s = load_scenario(o.scenario);
  bool do_z = o.z || !(o.z || o.pi);
  bool do_pi = o.pi || !(o.z || o.pi);
  double k = o.k ? *o.k : s.solver.k;
  if (!(k > 1.0)) throw ValidationError("--k must be > 1");
  int n_eval = static_cast<int>(std::max<long>(64, o.eval_n));
  Grid eval(s.grid.dim, n_eval, s.grid.x_lo, s.grid.x_hi);
  FrameProvider frames(s.coeffs, eval);
  std::vector<double> times = o.times;
  if (times.empty())
    for (double c : {0.1, 0.4, 0.7, 1.0}) times.push_back(c * s.solver.t_end);

  if (!o.out.empty()) std::filesystem::create_directories(o.out);
  bool all_ok = true;
  nlohmann::ordered_json stats = nlohmann::ordered_json::array();

  if (do_z) {
    if (!(o.z_gamma > 1.0)) throw ValidationError("--gamma must be > 1");
    double r_max =
        eval.dim == 2 ? eval.x_hi : std::max(std::abs(eval.x_lo), std::abs(eval.x_hi));
    RadialPhi phi = build_radial_phi(s.coeffs.cap, 0.0, r_max, 4096, eval.dim);
    double b_sup = 0.0;
    for (double t : {0.0, 0.5 * s.solver.t_end, s.solver.t_end})
      for (int i = 0; i < eval.n_cells; ++i)
        b_sup = std::max(b_sup, std::abs(s.coeffs.drift.value(eval.center(i), t)));
    // The profile is positive where the weighted radius stays under R(t); R
    // grows, so t = 0 binds. Keep the check region at 80% of that radius.
    double r_pos = phi.r_max;
    if (phi.value(phi.r_max) > 0.8 * o.z_gamma) {
      double blo = 0.0, bhi = phi.r_max;
      for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (blo + bhi);
        (phi.value(mid) <= 0.8 * o.z_gamma ? blo : bhi) = mid;
      }
      r_pos = blo;
    }
    double pad = 4.0 * eval.h;
    double lo = eval.dim == 2 ? eval.x_lo + pad : std::max(eval.x_lo + pad, -r_pos);
    double hi = std::min(eval.x_hi - pad, r_pos);
    if (!(lo < hi))
      throw ValidationError("upper-barrier positivity region is empty on this domain");
    double alpha =
        o.alpha ? *o.alpha : fit_alpha(phi, o.z_gamma, b_sup, frames, k, times, lo, hi);
    SuperBarrierZ zb = build_super_Z(phi, o.z_gamma, alpha, b_sup);
    ResidualStats st = barrier_residual(zb, frames, k, times, lo, hi);
    std::cout << "== upper barrier ==\n" << to_json(st) << "\n";
    std::cout << "alpha = " << fmt(alpha) << ", gamma = " << fmt(o.z_gamma)
              << ", drift amplitude " << fmt(b_sup) << ", region [" << fmt(lo) << ", "
              << fmt(hi) << "] -> " << (st.ok ? "admissible" : "NOT admissible") << "\n";
    all_ok = all_ok && st.ok;
    if (!o.out.empty()) write_barrier_profile(o.out + "/barrier_upper.csv", zb, times, eval, lo, hi);
    stats.push_back(nlohmann::ordered_json::parse(to_json(st)));
  }

  if (do_pi) {
    if (!(o.r_pi > 0.0)) throw ValidationError("--r-pi must be positive");
    double pg = o.pi_gamma ? *o.pi_gamma : o.r_pi / 10.0;
    double x0 = 0.0;
    if (o.x0) {
      x0 = *o.x0;
    } else {
      switch (s.init.kind) {
        case InitialData::Kind::patch: x0 = 0.5 * (s.init.lo + s.init.hi); break;
        case InitialData::Kind::gaussian: x0 = s.init.center; break;
        case InitialData::Kind::barenblatt: x0 = 0.0; break;
        case InitialData::Kind::file:
          x0 = 0.5 * (s.init.tab_x.front() + s.init.tab_x.back());
          break;
      }
    }
    SubBarrierPi pb = build_sub_Pi(pg, o.r_pi, s.coeffs, eval, x0, s.solver.t_end);
    double lo = -1e300, hi = 1e300;
    for (double t : times) {
      double c = pb.path.at(t);
      double rad = pb.positivity_radius(t);
      lo = std::max(lo, c - 0.8 * rad);
      hi = std::min(hi, c + 0.8 * rad);
    }
    lo = std::max(lo, eval.x_lo + 4.0 * eval.h);
    hi = std::min(hi, eval.x_hi - 4.0 * eval.h);
    if (!(hi - lo >= 8.0 * eval.h))
      throw ValidationError(
          "lower-barrier positivity region too thin; increase --eval-n or --r-pi");
    ResidualStats st = barrier_residual(pb, frames, k, times, lo, hi);
    std::cout << "== lower barrier ==\n" << to_json(st) << "\n";
    std::cout << "gamma = " << fmt(pg) << ", shape radius " << fmt(o.r_pi) << ", seed x0 = "
              << fmt(x0) << ", region [" << fmt(lo) << ", " << fmt(hi) << "] -> "
              << (st.ok ? "admissible" : "NOT admissible") << "\n";
    all_ok = all_ok && st.ok;
    if (!o.out.empty()) write_barrier_profile(o.out + "/barrier_lower.csv", pb, times, eval, lo, hi);
    stats.push_back(nlohmann::ordered_json::parse(to_json(st)));
  }

  if (!o.out.empty()) {
    std::ofstream f(o.out + "/barriers.json", std::ios::binary);
    if (!f) throw IoError("cannot write " + o.out + "/barriers.json");
    f << stats.dump(2) << "\n";
  }
  return all_ok ? 0 : 1;
}

// --------------------------------------------------------- reproduce-fig1

int cmd_reproduce_fig1(const std::string& out) {
  // The congested showcase on a wide window: shrinking cap, no drift, no
  // source. Long horizon so the saturated plateau has fully developed.
  Scenario s = builtin_scenario("fig1");
  s.grid = Grid(1, 160, -6.0, 6.0);
  s.solver.t_end = 6.0;
  s.solver.output_times = linspace_times(0.0, 6.0, 60);
  validate_scenario(s);

  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);
  std::string dir = out.empty() ? "fig1" : out;
  write_run(s, traj, dir);

  const SolverState& fin = traj.snapshots.back();
  const CoefficientFrame& fr = frames.at(fin.t);
  Support sp = support(fin.pressure, 1e-3);
  std::vector<char> mask = erode(sp.mask, 5);
  double worst = 0.0;
  int cells = 0;
  for (int i = 0; i < s.grid.n_cells; ++i) {
    if (!mask[static_cast<size_t>(i)]) continue;
    ++cells;
    worst = std::max(worst, std::abs(fin.density[i] - fr.cap[i]) / fr.cap[i]);
  }
  if (cells == 0) {
    std::cout << "no congested region survived erosion; cannot evaluate the saturation gap\n";
    return 1;
  }
  bool ok = worst <= 0.05;
  std::cout << "final-time congestion check: max |density - cap| / cap = " << fmt(worst)
            << " over " << cells << " pressure-support cells at t = " << fmt(fin.t)
            << " (bound 0.05) -> " << (ok ? "PASS" : "FAIL") << "\n";
  std::cout << "pressure support spans [" << fmt(sp.lo) << ", " << fmt(sp.hi)
            << "]; artifacts in " << dir << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"numerical laboratory for density-capped porous-medium flow"};
  app.require_subcommand(1);

  SimulateOpts so;
  CLI::App* sim = app.add_subcommand("simulate", "run one scenario and write a run directory");
  sim->add_option("scenario", so.scenario, "built-in name or scenario file")->required();
  sim->add_option("--k", so.k, "override the stiffness exponent (> 1)");
  sim->add_option("--t-end", so.t_end, "override the final time");
  sim->add_option("--outputs", so.outputs, "override the number of output intervals");
  sim->add_option("--out", so.out, "output directory (default run_<id>)");

  SweepOpts wo;
  CLI::App* sw = app.add_subcommand("sweep", "run a stiffness sweep and compare the profiles");
  sw->add_option("scenario", wo.scenario, "built-in name or scenario file")->required();
  sw->add_option("--ks", wo.ks, "ascending exponent list, e.g. 10,20,40,80")
      ->required()
      ->delimiter(',');
  sw->add_option("--out", wo.out, "output directory (default sweep_<id>)");

  DiagnoseOpts dopt;
  CLI::App* dg = app.add_subcommand("diagnose", "evaluate checks on a stored run directory");
  dg->add_option("run", dopt.dir, "run directory written by simulate")->required();
  dg->add_flag("--ab", dopt.ab, "semi-convexity lower bound on the dissipation term");
  dg->add_flag("--estimates", dopt.estimates, "uniform-norm estimate suite");
  dg->add_flag("--complementarity", dopt.complementarity,
               "pressure * slack residual against the stiffness ceiling");
  dg->add_flag("--retention", dopt.retention, "streamline pressure retention");
  dg->add_flag("--front", dopt.front, "free-boundary velocity law");
  dg->add_option("--mode", dopt.mode, "lower-bound mode: generalized or refined");
  dg->add_option("--constant", dopt.constant,
                 "hold the lower bound against this constant instead of fitting");
  dg->add_option("--t-min", dopt.t_min, "exclude snapshots at or before this time (--ab)");
  dg->add_option("--tau", dopt.tau, "foothold time (--retention) / window start (--estimates)");
  dg->add_option("--beta", dopt.beta, "retention decay rate (default: fitted)");
  dg->add_option("--seeds", dopt.seeds, "number of streamline seeds (default 20)");
  dg->add_option("--front-tol", dopt.front_tol,
                 "relative tolerance for the velocity law (default 0.15)");
  dg->add_option("--front-t-min", dopt.front_t_min,
                 "first time included in the front check (default 0.2)");

  BarrierOpts bo;
  CLI::App* br = app.add_subcommand("barriers", "check comparison profiles for a scenario");
  br->add_option("scenario", bo.scenario, "built-in name or scenario file")->required();
  br->add_flag("--z", bo.z, "expanding upper barrier (default: both)");
  br->add_flag("--pi", bo.pi, "shrinking lower barrier (default: both)");
  br->add_option("--k", bo.k, "stiffness exponent (default: the scenario's)");
  br->add_option("--gamma", bo.z_gamma, "upper-barrier height parameter (> 1, default 7)");
  br->add_option("--alpha", bo.alpha, "upper-barrier slope (default: fitted powers of two)");
  br->add_option("--r-pi", bo.r_pi, "lower-barrier shape radius (default 0.25)");
  br->add_option("--pi-gamma", bo.pi_gamma,
                 "lower-barrier height (<= r_pi/10, default r_pi/10)");
  br->add_option("--x0", bo.x0, "lower-barrier seed point (default: initial-data center)");
  br->add_option("--eval-n", bo.eval_n, "evaluation grid resolution (default 2048)");
  br->add_option("--times", bo.times, "check times (default 0.1,0.4,0.7,1.0 x t_end)")
      ->delimiter(',');
  br->add_option("--out", bo.out, "write barrier profiles and stats to this directory");

  std::string fig_out;
  CLI::App* fig = app.add_subcommand(
      "reproduce-fig1", "long-horizon congested showcase with its saturation check");
  fig->add_option("--out", fig_out, "output directory (default fig1)");

  std::vector<const char*> argv;
  argv.push_back("pmlab");
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);  // prints the message or the help text
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(so);
    if (sw->parsed()) return cmd_sweep(wo);
    if (dg->parsed()) return cmd_diagnose(dopt);
    if (br->parsed()) return cmd_barriers(bo);
    if (fig->parsed()) return cmd_reproduce_fig1(fig_out);
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pmlab
