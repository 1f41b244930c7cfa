#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/operators.hpp"
#include "pmlab/pressure_diagnostics.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"

using namespace pmlab;

namespace {

CoefficientSpec flat_spec() {
  CoefficientSpec spec;
  spec.cap = ScalarCoeff::constant(1.0);
  spec.drift = ScalarCoeff::constant(0.0);
  spec.source = ScalarCoeff::constant(0.0);
  return spec;
}

Trajectory self_similar_run(int n, double t_end, int outputs) {
  Grid g(1, n, -5.0, 5.0);
  CoefficientSpec spec = flat_spec();
  FrameProvider frames(spec, g);
  SolverConfig cfg;
  cfg.k = 2.0;
  cfg.t_end = t_end;
  cfg.output_times = linspace_times(0.0, t_end, outputs);
  ScalarField rho0 = make_field(g, 0.0, [](double x) { return barenblatt_density(x, 1.0, 1.0); });
  return run(frames, rho0, cfg);
}

}  // namespace

TEST_CASE("constitutive law, including the saturated value") {
  Grid g(1, 16, 0.0, 1.0);
  ScalarField cap = make_field(g, 0.0, [](double) { return 2.0; });
  ScalarField rho(g, 0.0);
  rho[0] = 0.0;
  rho[1] = 1.0;  // v = 0.5
  rho[2] = 2.0;  // v = 1
  ScalarField p = pressure_of(rho, cap, 5.0);
  CHECK(p[0] == doctest::Approx(0.0));
  CHECK(p[1] == doctest::Approx(5.0 / 4.0 * std::pow(0.5, 4.0)).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(5.0 / 4.0).epsilon(1e-14));
}

TEST_CASE("scalar complementarity ceiling: frozen values and k-scaling") {
  // max over v of k/(k-1) v^(k-1) (1-v) = ((1-1/k)^(k-1))/(k-1)
  CHECK(complementarity_scalar_bound(40.0) == doctest::Approx(9.5523e-3).epsilon(1e-4));
  CHECK(complementarity_scalar_bound(80.0) == doctest::Approx(4.6859e-3).epsilon(1e-4));
  // the ceiling behaves like 1/(e k): doubling k about halves it
  double ratio = complementarity_scalar_bound(80.0) / complementarity_scalar_bound(40.0);
  CHECK(ratio > 0.47);
  CHECK(ratio < 0.51);
  // direct scan oracle at k = 7
  double scan = 0.0;
  for (int i = 0; i <= 100000; ++i) {
    double v = i / 100000.0;
    scan = std::max(scan, 7.0 / 6.0 * std::pow(v, 6.0) * (1.0 - v));
  }
  CHECK(complementarity_scalar_bound(7.0) == doctest::Approx(scan).epsilon(1e-8));
}

TEST_CASE("complementarity residual on hand-built fields") {
  Grid g(1, 8, 0.0, 1.0);
  ScalarField p(g, 0.0), rho(g, 0.0), cap(g, 0.0);
  for (int i = 0; i < 8; ++i) cap[i] = 1.0;
  p[2] = 2.0;
  rho[2] = 0.75;  // slack 0.25 where p = 2 -> product 0.5
  rho[3] = 1.25;  // overshoot 0.25, but p = 0 there
  ComplementarityResidual r = complementarity_residual(p, rho, cap);
  CHECK(r.residual == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.overshoot == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("dissipation field matches the self-similar plateau") {
  // on the classical profile (unit cap) w = lap p = -1/(3 t_age)
  Trajectory traj = self_similar_run(400, 0.25, 5);
  CoefficientSpec spec = flat_spec();
  Grid g = traj.snapshots.front().density.grid;
  FrameProvider frames(spec, g);
  for (size_t si = 1; si < traj.snapshots.size(); ++si) {
    const SolverState& snap = traj.snapshots[si];
    ScalarField w = w_field(snap.pressure, frames.at(snap.t).cap);
    double expected = -1.0 / (3.0 * (1.0 + snap.t));
    // probe the central half of the support, far from the fronts
    double a = std::sqrt(12.0) * std::cbrt(1.0 + snap.t);
    for (int i = 0; i < g.n_cells; ++i) {
      if (std::abs(g.center(i)) > 0.5 * a) continue;
      CHECK(w[i] == doctest::Approx(expected).epsilon(0.02));
    }
  }
}

TEST_CASE("generalized lower bound holds with zero fitted constant on the benchmark") {
  Trajectory traj = self_similar_run(400, 0.25, 10);
  CoefficientSpec spec = flat_spec();
  FrameProvider frames(spec, traj.snapshots.front().density.grid);
  AbReport rep = ab_check(traj, AbMode::generalized, frames);
  CHECK(rep.mode == AbMode::generalized);
  CHECK(rep.skipped == 1);  // the t = 0 snapshot, where the bound is void
  CHECK(rep.fitted_constant == doctest::Approx(0.0));
  CHECK(rep.all_nonnegative(1e-12));
  CHECK(rep.worst_margin >= 0.0);
  // bound column is -2/((k-1) t) = -2/t at k = 2
  REQUIRE(!rep.rows.empty());
  CHECK(rep.rows.front().bound == doctest::Approx(-2.0 / rep.rows.front().t).epsilon(1e-12));

  // holding against an explicit constant keeps margins reported against it
  AbReport held = ab_check(traj, AbMode::generalized, frames, 3.0);
  CHECK(held.constant_used == doctest::Approx(3.0));
  CHECK(held.worst_margin >= 3.0 - 1e-9);  // bound moves down by the constant
}

TEST_CASE("refined mode needs congestion") {
  Trajectory traj = self_similar_run(200, 0.1, 2);
  CoefficientSpec spec = flat_spec();  // zero forcing: not congested
  FrameProvider frames(spec, traj.snapshots.front().density.grid);
  CHECK_THROWS_AS(ab_check(traj, AbMode::refined, frames), NotCongestedError);
}

TEST_CASE("refined lower bound closes on the congested benchmark") {
  Scenario s = builtin_scenario("fig1");
  s.solver.output_times = linspace_times(0.0, 1.0, 10);
  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);
  AbReport rep = ab_check(traj, AbMode::refined, frames, std::nullopt, 0.05);
  CHECK(rep.all_nonnegative(1e-12));
  CHECK(rep.fitted_constant >= 0.0);
  CHECK(rep.fitted_constant < 50.0);  // sanity: some moderate decay rate fits
}

TEST_CASE("stationary-limit pressure residual vanishes on a manufactured profile") {
  // cap = 1, forcing = 2, p = (R^2 - x^2)+ solves div(cap grad p) + cap*forcing = 0
  Grid g(1, 200, -2.0, 2.0);
  CoefficientSpec spec = flat_spec();
  spec.source = ScalarCoeff::constant(2.0);
  FrameProvider frames(spec, g);
  ScalarField p = make_field(g, 0.0, [](double x) { return std::max(1.0 - x * x, 0.0); });
  double res = pressure_equation_residual(p, frames.at(0.0), 1e-3);
  CHECK(res <= 1e-10);
  // with the wrong forcing the defect is visible
  CoefficientSpec wrong = flat_spec();
  wrong.source = ScalarCoeff::constant(1.0);
  FrameProvider fw(wrong, g);
  CHECK(pressure_equation_residual(p, fw.at(0.0), 1e-3) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("uniform-norm suite freezes the space-time gradient integral") {
  // examined on the self-similar solution: int |grad p|^2 dx dt over ages
  // [1, 1.25] equals (2/27) 12^{3/2} ln(5/4) ~ 0.68707
  Trajectory traj = self_similar_run(800, 0.25, 25);
  DiagnosticsReport rep = estimate_suite(traj, 0.1);
  CHECK(rep.all_pass());
  const CheckResult* g2 = rep.find("gradp_sq_spacetime");
  REQUIRE(g2 != nullptr);
  const double oracle = 2.0 / 27.0 * std::pow(12.0, 1.5) * std::log(1.25);
  CHECK(g2->value == doctest::Approx(oracle).epsilon(0.05));

  const CheckResult* sup_p = rep.find("sup_pressure_linf");
  REQUIRE(sup_p != nullptr);
  // sup p = 2 C / t_age^(1/3) at age 1
  CHECK(sup_p->value == doctest::Approx(2.0).epsilon(0.02));

  const CheckResult* rad = rep.find("support_radius_sup");
  REQUIRE(rad != nullptr);
  // front at sqrt(12) age^{1/3}; largest at age 1.25
  CHECK(rad->value == doctest::Approx(std::sqrt(12.0) * std::cbrt(1.25)).epsilon(0.02));

  for (const char* name : {"gradp_4th_spacetime", "bv_saturation_sup", "dt_saturation_l1",
                           "dt_pressure_l1"}) {
    const CheckResult* c = rep.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->pass);
    CHECK(c->value >= 0.0);
  }

  CHECK_THROWS_AS(estimate_suite(traj, 0.0), ValidationError);   // tau on the edge
  CHECK_THROWS_AS(estimate_suite(traj, 0.25), ValidationError);  // tau on the edge
}
