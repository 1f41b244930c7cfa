#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/operators.hpp"
#include "pmlab/pressure_diagnostics.hpp"
#include "pmlab/scenario.hpp"
#include "pmlab/solver.hpp"
#include "pmlab/streamlines.hpp"

using namespace pmlab;

// End-to-end behaviour of the congested shrinking-cap patch: one stiff run
// feeding every diagnostic the library offers, with empirically frozen
// expectations. This is the library-level counterpart of the figure
// reproduction command.
TEST_CASE("congested patch end-to-end") {
  Scenario s = builtin_scenario("fig1");
  FrameProvider frames(s.coeffs, s.grid);
  Trajectory traj = run(frames, s.rho0(), s.solver);

  REQUIRE(traj.snapshots.size() == 51);
  CHECK(traj.snapshots.back().t == 1.0);
  CHECK(traj.snapshots.back().steps > 9000);
  CHECK(traj.snapshots.back().steps < 10500);

  // the scenario stays congested through the whole horizon
  for (const SolverState& sn : traj.snapshots)
    CHECK(congestion_margin(frames.at(sn.t)) > 0.0);

  // mass bookkeeping: no source, no clamping, no saturation-cap events
  double m0 = mass(traj.snapshots.front().density);
  double m1 = mass(traj.snapshots.back().density);
  CHECK(traj.initial_mass == doctest::Approx(m0));
  CHECK(std::abs(m1 - m0) <= 1e-8 * m0);
  CHECK(traj.clamped_mass_total <= 1e-8 * m0);
  CHECK(traj.cap_events == 0);
  CHECK(traj.ledger.back().t == 1.0);

  // congestion fills the patch: the saturation peak climbs toward 1
  double prev_vmax = 0.0;
  for (size_t i = 0; i < traj.snapshots.size(); i += 10) {
    double vmax = norms(traj.snapshots[i].saturation).linf;
    CHECK(vmax >= prev_vmax - 1e-9);
    prev_vmax = vmax;
  }
  CHECK(prev_vmax == doctest::Approx(0.944742).epsilon(0.02));
  CHECK(prev_vmax < 1.0);

  const SolverState& fin = traj.snapshots.back();
  CHECK(norms(fin.pressure).linf == doctest::Approx(0.111742).epsilon(0.05));

  // complementarity: the residual stays under the stiffness ceiling with room
  double comp_worst = 0.0;
  for (const SolverState& sn : traj.snapshots) {
    ComplementarityResidual r =
        complementarity_residual(sn.pressure, sn.density, frames.at(sn.t).cap);
    comp_worst = std::max(comp_worst, r.residual);
  }
  CHECK(comp_worst == doctest::Approx(0.00522665).epsilon(0.1));
  CHECK(comp_worst <= 0.6 * complementarity_scalar_bound(s.solver.k));

  // the refined lower bound on the dissipation term holds with no extra slack
  AbReport ab = ab_check(traj, AbMode::refined, frames, std::nullopt, 0.05);
  CHECK(ab.fitted_constant == 0.0);
  CHECK(ab.worst_margin == doctest::Approx(0.0102849).epsilon(0.1));
  CHECK(ab.all_nonnegative());

  // the pressurized region only ever grows, in cells and along streamlines
  Support s02 = support(traj.snapshots[10].pressure, 1e-3);
  Support s10 = support(fin.pressure, 1e-3);
  CHECK(s10.first <= s02.first);
  CHECK(s10.last >= s02.last);
  CHECK(s10.first <= 50);  // frozen: cells 49..110 at t = 1
  CHECK(s10.last >= 109);
  CHECK(s10.hi >= 1.10);
  CHECK(monotone_support_check(traj, 1e-3, s.coeffs.drift, frames) == 0.0);

  // at this horizon the plateau is still filling: density within 10% of the
  // cap over the eroded pressurized core (2.9% after six time units)
  std::vector<char> core = erode(s10.mask, 5);
  const ScalarField& cap1 = frames.at(fin.t).cap;
  double plateau = 0.0;
  for (int i = 0; i < fin.density.size(); ++i)
    if (core[i]) plateau = std::max(plateau, std::abs(fin.density[i] - cap1[i]) / cap1[i]);
  CHECK(plateau == doctest::Approx(0.0807334).epsilon(0.15));
  CHECK(plateau <= 0.10);

  // streamline retention: pressure never decays faster than the 1/tau rate
  std::vector<double> seeds;
  for (double x = -0.8; x <= 0.81; x += 0.2) seeds.push_back(x);
  RetentionReport rr = retention_check(traj, s.coeffs.drift, seeds, 0.1, std::nullopt);
  CHECK(rr.rows.size() == seeds.size());
  CHECK(rr.fitted_beta == 0.0);
  CHECK(rr.worst_margin > 0.0);
  CHECK(rr.sup_pressure == doctest::Approx(0.111742).epsilon(0.05));
}
