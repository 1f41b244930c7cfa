#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"
#include "pmlab/streamlines.hpp"

namespace pmlab {

// Radial profile phi(r) = (1/dim) * integral over [0,r] of r'/cap(r',t) dr',
// frozen at one time. Node values come from composite-trapezoid quadrature;
// value() completes the last partial segment with the exact integrand, so
// the profile is C1 and phi(0) = 0, strictly increasing.
struct RadialPhi {
  double t = 0.0;
  int dim = 1;
  double r_max = 0.0;
  ScalarCoeff cap;
  std::vector<double> rs, phis;
  double k_phi = 0.0;  // fitted: |phi'|^2 <= k_phi * phi at every sampled r > 0
  double m_phi = 0.0;  // fitted: |d/dt phi| <= m_phi * phi (0 for static cap)

  double value(double r) const;  // extends past r_max by continuing the quadrature
  double slope(double r) const;  // exact integrand r / (dim * cap)
};

RadialPhi build_radial_phi(const ScalarCoeff& cap, double t, double r_max, int n, int dim);

// Expanding upper barrier Z = alpha * max(R(t) - phi, 0) with
// R(t) = (gamma + M) * exp((3/2 alpha^2 k_phi + m_phi) t) - M, M = b_sup^2/2.
struct SuperBarrierZ {
  RadialPhi phi;
  double alpha = 1.0;
  double gamma = 0.0;
  double m_drift = 0.0;  // M above

  double rate() const { return 1.5 * alpha * alpha * phi.k_phi + phi.m_phi; }
  double R(double t) const { return (gamma + m_drift) * std::exp(rate() * t) - m_drift; }
  double value(double x, double t) const;
};

// gamma > 1 by the construction's normalization (ValidationError otherwise).
SuperBarrierZ build_super_Z(const RadialPhi& phi, double gamma, double alpha, double b_sup);

// Shrinking lower barrier Pi = gamma^2 - r_pi^2 e^{2Lt} |x - X(t,x0)|^2
// riding the streamline through x0; positive on a ball of radius
// (gamma/r_pi) e^{-Lt} around the moving center.
struct SubBarrierPi {
  double gamma = 0.0;
  double r_pi = 0.0;
  double lip_b = 0.0;  // difference-quotient estimate of Lip(b), inflated 10%
  double x0 = 0.0;
  Streamline path;

  double center(double t) const { return path.at(t); }
  double value(double x, double t) const;
  double positivity_radius(double t) const;
};

// Requires gamma <= r_pi / 10 and a congested scenario (frame at t = 0).
SubBarrierPi build_sub_Pi(double gamma, double r_pi, const CoefficientSpec& coeffs,
                          const Grid& grid, double x0, double t_max, double dt_ode = 1e-3);

enum class BarrierSense { super, sub };

struct ResidualStats {
  BarrierSense sense = BarrierSense::super;
  double min_res = 0.0;
  double max_res = 0.0;
  double tol = 0.0;
  int cells = 0;  // region cells checked per time
  std::vector<double> times;
  bool ok = false;  // super: min_res >= -tol; sub: max_res <= tol
};

// Evaluates Res = dB/dt - |grad B|^2 - grad B . b - (k-1) B ((1/m)div(m grad B) + F)
// with the library's stencils on the provider's grid, at the given times, over
// the cells whose centers lie in [region_lo, region_hi]. The region must sit
// inside the barrier's positivity set eroded by 3 cells at every time
// (RegionOutsidePositivityError). tol = 1e-8 plus an O(h^2) stencil allowance.
ResidualStats barrier_residual(const SuperBarrierZ& z, FrameProvider& frames, double k,
                               const std::vector<double>& times, double region_lo,
                               double region_hi);
ResidualStats barrier_residual(const SubBarrierPi& pi, FrameProvider& frames, double k,
                               const std::vector<double>& times, double region_lo,
                               double region_hi);

std::string to_json(const ResidualStats& r);

// Upper sense: max over snapshots and cells of (p - Z)+, requiring p <= Z at
// the first snapshot (InitialOrderingError otherwise). Lower sense: same with
// (Pi+ - p)+ and Pi+ <= p initially.
double comparison_vs_solver(const SuperBarrierZ& z, const Trajectory& traj);
double comparison_vs_solver(const SubBarrierPi& pi, const Trajectory& traj);

// Smallest power-of-two alpha whose super-barrier residual check passes at
// the given k; ValidationError when none up to 2^10 does.
double fit_alpha(const RadialPhi& phi, double gamma, double b_sup, FrameProvider& frames,
                 double k, const std::vector<double>& times, double region_lo,
                 double region_hi);

}  // namespace pmlab
