#include "pmlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmlab/operators.hpp"

namespace pmlab {
namespace {

constexpr double kCflFloor = 1e-8;

struct StepStats {
  double clamped_mass = 0.0;
  double source_integral = 0.0;
  long cap_events = 0;
};

struct Scratch {
  std::vector<double> u;     // min(v, v_cap)^k per cell
  std::vector<double> flux;  // per face, 0..n
};

double clipped_sat(double rho, double m, double v_cap, long& cap_events) {
  double v = rho / m;
  if (v < 0.0) return 0.0;
  if (v > v_cap) {
    ++cap_events;
    return v_cap;
  }
  return v;
}

// Core update; reads density + frame only, writes density in place.
StepStats advance(ScalarField& rho, const CoefficientFrame& frame, const SolverConfig& cfg,
                  double dt) {
  const Grid& g = rho.grid;
  const int n = g.n_cells;
  const double h = g.h;
  const double k = cfg.k;
  static thread_local Scratch scratch;
  scratch.u.resize(n);
  scratch.flux.assign(n + 1, 0.0);

  StepStats st;
  for (int i = 0; i < n; ++i) {
    double v = clipped_sat(rho[i], frame.cap[i], cfg.v_cap, st.cap_events);
    scratch.u[i] = std::pow(v, k);
  }
  // Face flux j between cells j-1 and j: cap * d(v^k)/dx plus upwinded
  // density * drift (the equation transports with velocity -drift, so a
  // positive face drift pulls from the right cell). Each face value is
  // computed once so the mass budget telescopes exactly.
  for (int j = 1; j < n; ++j) {
    double mf = 0.5 * (frame.cap[j - 1] + frame.cap[j]);
    double bf = 0.5 * (frame.drift[j - 1] + frame.drift[j]);
    double diff = mf * (scratch.u[j] - scratch.u[j - 1]) / h;
    double adv = bf > 0.0 ? rho[j] * bf : rho[j - 1] * bf;
    double fx = diff + adv;
    if (g.dim == 2) fx *= g.face(j);
    scratch.flux[j] = fx;
  }
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    double geom = (g.dim == 2) ? g.center(i) : 1.0;
    double div = (scratch.flux[i + 1] - scratch.flux[i]) / (geom * h);
    double src = frame.source[i] * rho[i];
    st.source_integral += src * g.volume(i);
    double next = rho[i] + dt * (div + src);
    double floor = 0.0;
    if (cfg.regularization_n) floor = frame.cap[i] / double(*cfg.regularization_n);
    if (next < floor) {
      st.clamped_mass += (floor - next) * g.volume(i);
      next = floor;
    }
    finite = finite && std::isfinite(next);
    rho[i] = next;
  }
  st.source_integral *= dt;
  if (!finite) throw NonFiniteError("solver: non-finite density after step");
  return st;
}

void refresh_derived(SolverState& s, const CoefficientFrame& frame, const SolverConfig& cfg) {
  const int n = s.density.grid.n_cells;
  long dummy = 0;
  for (int i = 0; i < n; ++i) {
    double v = clipped_sat(s.density[i], frame.cap[i], cfg.v_cap, dummy);
    s.saturation[i] = v;
    s.pressure[i] = cfg.k / (cfg.k - 1.0) * std::pow(v, cfg.k - 1.0);
  }
  s.saturation.time = s.t;
  s.pressure.time = s.t;
  s.density.time = s.t;
}

// Support must stay clear of the outer boundary; r = 0 is a symmetry axis.
void check_support_margin(const ScalarField& rho) {
  const Grid& g = rho.grid;
  const int n = g.n_cells;
  double thr = 1e-14 * std::max(1e-300, norms(rho).linf);
  int first = n, last = -1;
  for (int i = 0; i < n; ++i) {
    if (rho[i] > thr) {
      if (i < first) first = i;
      last = i;
    }
  }
  if (last < 0) return;
  bool bad = (last >= n - 5) || (g.dim == 1 && first < 5);
  if (bad)
    throw SupportNearBoundaryError(
        "solver: support reached within 5 cells of the boundary; enlarge the domain");
}

}  // namespace

double cfl_dt(const SolverState& state, const CoefficientFrame& frame,
              const SolverConfig& cfg) {
  const Grid& g = state.density.grid;
  const double h = g.h;
  double dt = std::numeric_limits<double>::infinity();
  long dummy = 0;
  for (int i = 0; i < g.n_cells; ++i) {
    double v = clipped_sat(state.density[i], frame.cap[i], cfg.v_cap, dummy);
    double diffusivity = cfg.k * frame.cap[i] * std::pow(v, cfg.k - 1.0);
    double denom = 2.0 * g.dim * diffusivity + h * std::fabs(frame.drift[i]) +
                   h * h * std::fabs(frame.source[i]) + kCflFloor;
    dt = std::min(dt, h * h / denom);
  }
  return cfg.cfl_safety * dt;
}

SolverState make_state(const ScalarField& rho0, const CoefficientFrame& frame,
                       const SolverConfig& cfg) {
  SolverState s;
  s.density = rho0;
  s.saturation = ScalarField(rho0.grid, rho0.time);
  s.pressure = ScalarField(rho0.grid, rho0.time);
  s.t = rho0.time;
  refresh_derived(s, frame, cfg);
  return s;
}

SolverState step(const SolverState& state, const CoefficientFrame& frame,
                 const SolverConfig& cfg, double dt) {
  if (frame.t != state.t)
    throw ValidationError("step: frame sampled at a different time than the state");
  double limit = cfl_dt(state, frame, cfg);
  if (dt > limit * (1.0 + 1e-12))
    throw CflViolationError("step: dt exceeds the stability bound");
  SolverState next = state;
  advance(next.density, frame, cfg, dt);
  next.t += dt;
  next.steps += 1;
  refresh_derived(next, frame, cfg);
  return next;
}

ScalarField regularize_initial(const ScalarField& rho0, const ScalarField& cap0, long n) {
  if (n <= 0) throw ValidationError("regularize_initial: n must be positive");
  ScalarField out = rho0;
  for (int i = 0; i < out.grid.n_cells; ++i)
    out[i] = std::max(out[i], 0.0) + cap0[i] / double(n);
  return out;
}

std::vector<double> linspace_times(double t0, double t1, int n_intervals) {
  std::vector<double> ts(n_intervals + 1);
  for (int j = 0; j <= n_intervals; ++j) ts[j] = t0 + (t1 - t0) * j / n_intervals;
  return ts;
}

namespace {

struct RunDriver {
  FrameProvider& frames;
  const SolverConfig& cfg;
  std::vector<SolverState*> states;  // advanced in lockstep
  Trajectory* traj = nullptr;        // ledger/snapshots follow states[0]

  void run_loop() {
    const double t_end = cfg.t_end;
    std::vector<double> outputs = cfg.output_times;
    std::sort(outputs.begin(), outputs.end());
    size_t next_out = 0;
    auto time_eps = [&](double t) { return 1e-12 * std::max(1.0, std::fabs(t)); };

    SolverState& lead = *states[0];
    if (traj) {
      traj->initial_mass = mass(lead.density);
      traj->config = cfg;
    }
    // snapshots requested at (or before) the start time
    while (next_out < outputs.size() && outputs[next_out] <= lead.t + time_eps(lead.t)) {
      if (traj) traj->snapshots.push_back(lead);
      ++next_out;
    }

    long steps_since_check = 0;
    while (lead.t < t_end - time_eps(t_end)) {
      if (lead.steps >= cfg.max_steps)
        throw MaxStepsError("solver: exceeded the configured step budget");
      const CoefficientFrame& frame = frames.at(lead.t);
      double dt = std::numeric_limits<double>::infinity();
      for (SolverState* s : states) dt = std::min(dt, cfl_dt(*s, frame, cfg));
      dt = std::min(dt, t_end - lead.t);
      if (next_out < outputs.size()) dt = std::min(dt, outputs[next_out] - lead.t);
      if (!(dt > 0)) throw NonFiniteError("solver: non-positive dt");

      StepStats stats;
      for (SolverState* s : states) {
        StepStats st = advance(s->density, frame, cfg, dt);
        if (s == states[0]) stats = st;
        s->t += dt;
        s->steps += 1;
      }
      const CoefficientFrame& now = frames.at(lead.t);
      for (SolverState* s : states) refresh_derived(*s, now, cfg);

      if (traj) {
        traj->clamped_mass_total += stats.clamped_mass;
        traj->cap_events += stats.cap_events;
        traj->ledger.push_back({lead.steps, lead.t, dt, mass(lead.density),
                                stats.source_integral, stats.clamped_mass});
      }
      if (++steps_since_check >= 64) {
        steps_since_check = 0;
        for (SolverState* s : states) check_support_margin(s->density);
      }
      while (next_out < outputs.size() && lead.t >= outputs[next_out] - time_eps(lead.t)) {
        for (SolverState* s : states) check_support_margin(s->density);
        if (traj) traj->snapshots.push_back(lead);
        ++next_out;
      }
    }
  }
};

}  // namespace

Trajectory run(FrameProvider& frames, const ScalarField& rho0, const SolverConfig& cfg) {
  Trajectory traj;
  SolverState state = make_state(rho0, frames.at(rho0.time), cfg);
  RunDriver driver{frames, cfg, {&state}, &traj};
  driver.run_loop();
  return traj;
}

OrderedPairResult run_ordered_pair(FrameProvider& frames, const ScalarField& rho0_lo,
                                   const ScalarField& rho0_hi, const SolverConfig& cfg) {
  SolverState lo = make_state(rho0_lo, frames.at(rho0_lo.time), cfg);
  SolverState hi = make_state(rho0_hi, frames.at(rho0_hi.time), cfg);
  OrderedPairResult res;
  auto record = [&]() {
    for (int i = 0; i < lo.density.grid.n_cells; ++i) {
      res.violation = std::max(res.violation, lo.density[i] - hi.density[i]);
      res.hi_linf = std::max(res.hi_linf, hi.density[i]);
    }
  };
  record();
  // reuse the lockstep driver; snapshots/ledger not needed here
  SolverConfig cfg2 = cfg;
  std::vector<double> outputs = cfg.output_times;
  if (outputs.empty()) outputs = linspace_times(0.0, cfg.t_end, 20);
  for (size_t j = 0; j + 1 < outputs.size(); ++j) {
    cfg2.t_end = outputs[j + 1];
    RunDriver driver{frames, cfg2, {&lo, &hi}, nullptr};
    driver.run_loop();
    record();
  }
  res.violation = std::max(res.violation, 0.0);
  return res;
}

}  // namespace pmlab
