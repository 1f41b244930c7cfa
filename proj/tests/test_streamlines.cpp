#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/operators.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"
#include "pmlab/streamlines.hpp"

using namespace pmlab;

TEST_CASE("linear drift has the exact exponential streamline") {
  // dX/dt = -b(X) with b(x) = x gives X(t) = x0 e^{-t}
  Grid g(1, 64, -4.0, 4.0);
  ScalarCoeff b = ScalarCoeff::linear(0.0, 1.0);
  Streamline s = integrate_streamline(b, g, 1.5, 0.0, 2.0, 1e-3);
  CHECK(s.positions.back() == doctest::Approx(1.5 * std::exp(-2.0)).epsilon(1e-8));
  CHECK(s.at(1.0) == doctest::Approx(1.5 * std::exp(-1.0)).epsilon(1e-6));
  CHECK(s.at(-5.0) == doctest::Approx(1.5));  // clamped before the start
}

TEST_CASE("a streamline that exits the window is an error") {
  Grid g(1, 64, -4.0, 4.0);
  ScalarCoeff b = ScalarCoeff::constant(-2.0);  // transport velocity +2
  CHECK_THROWS_AS(integrate_streamline(b, g, 3.5, 0.0, 1.0), LeftDomainError);
}

TEST_CASE("inverse point undoes the flow") {
  Grid g(1, 64, -4.0, 4.0);
  ScalarCoeff b = ScalarCoeff::sine(0.8, 1.0);
  const double x0 = 0.37;
  Streamline fwd = integrate_streamline(b, g, x0, 0.0, 1.5, 1e-3);
  double back = inverse_point(b, g, fwd.positions.back(), 1.5, 1e-3);
  CHECK(back == doctest::Approx(x0).epsilon(1e-6));
}

TEST_CASE("externally transported density: pure translation") {
  Grid g(1, 160, -3.0, 3.0);
  ScalarCoeff b = ScalarCoeff::constant(-0.4);
  auto rho0 = [](double x) { return (x >= -1.0 && x <= 1.0) ? 0.3 * (2.0 - x * x) : 0.0; };
  auto zero = [](double, double) { return 0.0; };
  // transport velocity is -b = +0.4, so the profile slides right by 0.3
  for (double x : {-0.4, 0.1, 0.9}) {
    double v = external_density(rho0, b, g, zero, zero, x, 0.75);
    CHECK(v == doctest::Approx(rho0(x - 0.3)).epsilon(1e-6));
  }
}

TEST_CASE("externally transported density: growth and compression factors") {
  Grid g(1, 160, -4.0, 4.0);
  auto rho0 = [](double x) { return std::exp(-x * x); };
  auto zero = [](double, double) { return 0.0; };

  // pure source f = 1/4: density picks up e^{t/4}
  ScalarCoeff none = ScalarCoeff::constant(0.0);
  auto f = [](double, double) { return 0.25; };
  double v = external_density(rho0, none, g, f, zero, 0.5, 1.2);
  CHECK(v == doctest::Approx(std::exp(-0.25) * std::exp(0.25 * 1.2)).epsilon(1e-6));

  // inward drift b = x: the foot is x e^{t} and compression contributes e^{t}
  ScalarCoeff bx = ScalarCoeff::linear(0.0, 1.0);
  auto divb = [](double, double) { return 1.0; };
  double w = external_density(rho0, bx, g, zero, divb, 0.3, 0.8);
  const double foot = 0.3 * std::exp(0.8);
  CHECK(w == doctest::Approx(std::exp(-foot * foot) * std::exp(0.8)).epsilon(1e-5));
}

TEST_CASE("pressure is retained along streamlines in the congested benchmark") {
  Scenario s = builtin_scenario("fig1");
  s.solver.t_end = 0.5;
  s.solver.output_times = linspace_times(0.0, 0.5, 10);
  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);

  std::vector<double> seeds;
  for (int j = 0; j < 12; ++j) seeds.push_back(-0.8 + 1.6 * j / 11.0);
  RetentionReport rep = retention_check(traj, s.coeffs.drift, seeds, 0.05);
  CHECK(rep.tau == doctest::Approx(0.05));
  CHECK(rep.sup_pressure > 0.0);
  CHECK(rep.rows.size() == seeds.size());
  CHECK(rep.worst_margin >= -1e-3 * rep.sup_pressure);

  // a decay rate far above the fitted one can only loosen the margins
  RetentionReport loose = retention_check(traj, s.coeffs.drift, seeds, 0.05, 50.0);
  CHECK(loose.beta_used == doctest::Approx(50.0));
  CHECK(loose.worst_margin >= rep.worst_margin - 1e-12);

  // tau off the snapshot lattice is a usage error
  CHECK_THROWS_AS(retention_check(traj, s.coeffs.drift, seeds, 0.513), ValidationError);
}

TEST_CASE("transported support stays inside the later support when congested") {
  Scenario s = builtin_scenario("fig1");
  s.solver.t_end = 0.3;
  s.solver.output_times = linspace_times(0.0, 0.3, 6);
  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);
  double frac = monotone_support_check(traj, 1e-3, s.coeffs.drift, frames);
  CHECK(frac <= 0.02);
}

TEST_CASE("the detector flags an artificial support collapse") {
  Grid g(1, 100, -2.0, 2.0);
  CoefficientSpec spec;
  spec.cap = ScalarCoeff::constant(1.0);
  spec.drift = ScalarCoeff::constant(0.0);
  spec.source = ScalarCoeff::constant(1.0);  // keeps the frames congested
  FrameProvider frames(spec, g);

  Trajectory fake;
  fake.config.k = 10.0;
  SolverState a;
  a.t = 0.0;
  a.density = make_field(g, 0.0, [](double x) { return std::abs(x) <= 1.0 ? 0.5 : 0.0; });
  a.saturation = a.density;
  a.pressure = a.density;
  SolverState bstate = a;
  bstate.t = 0.1;
  bstate.pressure =
      make_field(g, 0.1, [](double x) { return (x >= 0.0 && x <= 1.0) ? 0.5 : 0.0; });
  fake.snapshots = {a, bstate};

  // half of the transported support cells land outside the halved support
  double frac = monotone_support_check(fake, 1e-3, spec.drift, frames);
  CHECK(frac == doctest::Approx(0.5).epsilon(0.05));

  // the same data is rejected outright without congestion
  CoefficientSpec idle = spec;
  idle.source = ScalarCoeff::constant(0.0);
  FrameProvider fi(idle, g);
  CHECK_THROWS_AS(monotone_support_check(fake, 1e-3, idle.drift, fi), NotCongestedError);
}
