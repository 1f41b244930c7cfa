#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/errors.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/operators.hpp"

using namespace pmlab;

namespace {

CoefficientSpec shrinking_cap_spec() {
  CoefficientSpec spec;
  spec.cap = ScalarCoeff::gauss_decay(1.0, 0.1, 1.0 / 6.0);
  spec.drift = ScalarCoeff::constant(0.0);
  spec.source = ScalarCoeff::constant(0.0);
  return spec;
}

}  // namespace

TEST_CASE("analytic families: values and derivatives") {
  ScalarCoeff c = ScalarCoeff::constant(2.5);
  CHECK(c.value(1.0, 3.0) == doctest::Approx(2.5));
  CHECK(c.dx(1.0, 3.0) == doctest::Approx(0.0));
  CHECK(c.dt(1.0, 3.0) == doctest::Approx(0.0));

  ScalarCoeff g = ScalarCoeff::gauss_decay(1.0, 0.1, 1.0 / 6.0);
  const double x = 0.7, t = 0.4;
  const double v = std::exp(-t / 6.0 - 0.1 * x * x);
  CHECK(g.value(x, t) == doctest::Approx(v).epsilon(1e-14));
  CHECK(g.dx(x, t) == doctest::Approx(-0.2 * x * v).epsilon(1e-12));
  CHECK(g.dxx(x, t) == doctest::Approx((-0.2 + 0.04 * x * x) * v).epsilon(1e-12));
  CHECK(g.dt(x, t) == doctest::Approx(-v / 6.0).epsilon(1e-12));

  ScalarCoeff l = ScalarCoeff::linear(0.5, -0.25);
  CHECK(l.value(2.0, 9.0) == doctest::Approx(0.0));
  CHECK(l.dx(2.0, 9.0) == doctest::Approx(-0.25));
  CHECK(l.dxx(2.0, 9.0) == doctest::Approx(0.0));
  CHECK(l.dt(2.0, 9.0) == doctest::Approx(0.0));

  ScalarCoeff s = ScalarCoeff::sine(2.0, 3.0);
  CHECK(s.value(0.5, 0.0) == doctest::Approx(2.0 * std::sin(1.5)).epsilon(1e-14));
  CHECK(s.dx(0.5, 0.0) == doctest::Approx(6.0 * std::cos(1.5)).epsilon(1e-12));
  CHECK(s.dxx(0.5, 0.0) == doctest::Approx(-18.0 * std::sin(1.5)).epsilon(1e-12));
}

TEST_CASE("tabulated profiles interpolate and differentiate numerically") {
  std::vector<double> xs, vs;
  for (int i = 0; i <= 400; ++i) {
    double x = -2.0 + 4.0 * i / 400.0;
    xs.push_back(x);
    vs.push_back(std::sin(x));
  }
  ScalarCoeff tab = ScalarCoeff::tabulated(xs, vs);
  CHECK(tab.value(0.3, 0.0) == doctest::Approx(std::sin(0.3)).epsilon(1e-4));
  CHECK(tab.dx(0.3, 0.0) == doctest::Approx(std::cos(0.3)).epsilon(1e-2));
  CHECK(tab.dt(0.3, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("shrinking-cap frame: forcing equals the decay rate exactly") {
  // cap = e^{-t/6} e^{-x^2/10}, no drift, no source:
  // forcing = -(d/dt cap)/cap = 1/6 at every cell and every time
  CoefficientSpec spec = shrinking_cap_spec();
  Grid grid(1, 160, -3.0, 3.0);
  FrameProvider frames(spec, grid);
  for (double t : {0.0, 0.3, 1.0}) {
    const CoefficientFrame& fr = frames.at(t);
    for (int i = 0; i < grid.n_cells; i += 13)
      CHECK(fr.forcing[i] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
}

TEST_CASE("frame carries consistent auxiliary fields") {
  CoefficientSpec spec;
  spec.cap = ScalarCoeff::constant(1.0);
  spec.drift = ScalarCoeff::linear(0.3, -0.5);
  spec.source = ScalarCoeff::constant(0.25);
  Grid grid(1, 64, -2.0, 2.0);
  FrameProvider frames(spec, grid);
  const CoefficientFrame& fr = frames.at(0.7);
  CHECK(fr.t == doctest::Approx(0.7));
  for (int i = 0; i < grid.n_cells; i += 7) {
    CHECK(fr.cap[i] == doctest::Approx(1.0));
    CHECK(fr.log_cap[i] == doctest::Approx(0.0));
    CHECK(fr.cap_dt[i] == doctest::Approx(0.0));
    CHECK(fr.div_cap_drift[i] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(fr.forcing[i] == doctest::Approx(-0.25).epsilon(1e-12));
  }
}

TEST_CASE("congestion margin distinguishes the two regimes") {
  Grid grid(1, 96, -3.0, 3.0);
  FrameProvider congested(shrinking_cap_spec(), grid);
  double eps = congestion_margin(congested.at(0.5));
  CHECK(eps > 0.0);
  // numerator is -cap_dt = cap/6, smallest where cap is smallest (|x| max)
  double edge = std::abs(grid.center(grid.n_cells - 1));
  double expected = std::exp(-0.5 / 6.0 - 0.1 * edge * edge) / 6.0;
  CHECK(eps == doctest::Approx(expected).epsilon(1e-12));

  CoefficientSpec thinning;
  thinning.cap = ScalarCoeff::constant(1.0);
  thinning.drift = ScalarCoeff::linear(0.0, -0.5);
  thinning.source = ScalarCoeff::constant(0.25);
  FrameProvider fb(thinning, grid);
  CHECK(congestion_margin(fb.at(0.0)) == doctest::Approx(-0.25).epsilon(1e-12));

  // restricted to a region the margin ignores the excluded cells
  std::vector<char> left_half(static_cast<size_t>(grid.n_cells), 0);
  for (int i = 0; i < grid.n_cells / 2; ++i) left_half[static_cast<size_t>(i)] = 1;
  double eps_half = congestion_margin(congested.at(0.5), left_half);
  CHECK(eps_half >= eps);
}

TEST_CASE("frame provider caches static frames and re-evaluates moving ones") {
  Grid grid(1, 64, -2.0, 2.0);
  CoefficientSpec stat;
  stat.cap = ScalarCoeff::constant(1.0);
  stat.drift = ScalarCoeff::constant(0.0);
  stat.source = ScalarCoeff::constant(0.0);
  FrameProvider fp(stat, grid);
  const CoefficientFrame& a = fp.at(0.1);
  const CoefficientFrame& b = fp.at(0.9);
  CHECK(&a == &b);  // one cached frame; callers must not hold stale references
  CHECK(b.t == doctest::Approx(0.9));

  FrameProvider fm(shrinking_cap_spec(), grid);
  double c0 = fm.at(0.0).cap[32];
  double c1 = fm.at(1.0).cap[32];
  CHECK(c1 == doctest::Approx(c0 * std::exp(-1.0 / 6.0)).epsilon(1e-12));
}

TEST_CASE("assumption validation accepts the congested benchmark setup") {
  CoefficientSpec spec = shrinking_cap_spec();
  Grid grid(1, 160, -3.0, 3.0);
  ScalarField rho0 = make_field(grid, 0.0, [&spec](double x) {
    return (x >= -1.0 && x <= 1.0) ? 0.9 * spec.cap.value(x, 0.0) : 0.0;
  });
  DiagnosticsReport rep = validate_assumptions(spec, grid, rho0, {10.0, 80.0}, 1.0);
  CHECK(rep.all_pass());
  for (const char* name :
       {"cap_lower_bound", "initial_support_inside", "initial_nonnegative",
        "initial_linf_finite", "initial_bv_finite", "initial_pressure_bound",
        "geometry_assumption"}) {
    const CheckResult* c = rep.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->pass);
  }
}

TEST_CASE("assumption validation flags violations") {
  Grid grid(1, 96, -3.0, 3.0);
  CoefficientSpec flat;
  flat.cap = ScalarCoeff::constant(1.0);
  flat.drift = ScalarCoeff::constant(0.0);
  flat.source = ScalarCoeff::constant(0.0);

  // support reaching the walls
  ScalarField wide = make_field(grid, 0.0, [](double) { return 0.5; });
  DiagnosticsReport rep = validate_assumptions(flat, grid, wide, {2.0}, 1.0);
  CHECK_FALSE(rep.all_pass());
  CHECK_FALSE(rep.find("initial_support_inside")->pass);

  // a negative cell inside an otherwise fine patch
  ScalarField neg = make_field(grid, 0.0, [](double x) {
    return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0;
  });
  neg[grid.n_cells / 2] = -0.1;
  rep = validate_assumptions(flat, grid, neg, {2.0}, 1.0);
  CHECK_FALSE(rep.find("initial_nonnegative")->pass);

  // cap dipping under its positivity floor somewhere in the domain
  CoefficientSpec thin = flat;
  thin.cap = ScalarCoeff::gauss_decay(1.0, 10.0, 0.0);  // e^{-10 x^2} < 1e-6 near |x|=3
  ScalarField patch = make_field(grid, 0.0, [](double x) {
    return (x >= -1.0 && x <= 1.0) ? 1e-7 : 0.0;
  });
  rep = validate_assumptions(thin, grid, patch, {2.0}, 1.0);
  CHECK_FALSE(rep.find("cap_lower_bound")->pass);
}

TEST_CASE("radial support margin only counts the outer edge") {
  // a disc of density starting at the axis is fine; r = 0 is not a wall
  Grid grid(2, 64, 0.0, 4.0);
  CoefficientSpec flat;
  flat.cap = ScalarCoeff::constant(1.0);
  flat.drift = ScalarCoeff::constant(0.0);
  flat.source = ScalarCoeff::constant(0.5);
  ScalarField disc = make_field(grid, 0.0, [](double r) { return r <= 1.0 ? 1.0 : 0.0; });
  DiagnosticsReport rep = validate_assumptions(flat, grid, disc, {80.0}, 0.6);
  CHECK(rep.find("initial_support_inside")->pass);
  CHECK(rep.all_pass());
}
