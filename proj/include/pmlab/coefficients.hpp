#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmlab/grid.hpp"
#include "pmlab/report.hpp"

namespace pmlab {

struct DiagnosticsReport;

// Closed-form coefficient families. Every family evaluates the value and,
// when analytic() is true, exact x/t derivatives; the tabulated family falls
// back to 4th-order central differences and flags the frame it feeds.
enum class CoeffFamily { constant, gauss_decay, linear, sine, tabulated };

struct ScalarCoeff {
  CoeffFamily family = CoeffFamily::constant;
  // gauss_decay: amp * exp(-at*t - ax*x^2)
  double amp = 0.0, ax = 0.0, at = 0.0;
  // linear: c0 + cx*x
  double c0 = 0.0, cx = 0.0;
  // sine: amp * sin(omega*x)
  double omega = 0.0;
  // tabulated: piecewise-linear samples, constant in t
  std::vector<double> tab_x, tab_v;

  double value(double x, double t) const;
  double dx(double x, double t) const;
  double dxx(double x, double t) const;
  double dt(double x, double t) const;
  bool analytic() const { return family != CoeffFamily::tabulated; }
  bool time_dependent() const;

  static ScalarCoeff constant(double c);
  static ScalarCoeff gauss_decay(double amp, double ax, double at);
  static ScalarCoeff linear(double c0, double cx);
  static ScalarCoeff sine(double amp, double omega);
  static ScalarCoeff tabulated(std::vector<double> xs, std::vector<double> vs);

  bool operator==(const ScalarCoeff&) const = default;
};

struct CoefficientSpec {
  ScalarCoeff cap;     // upper density bound m(x,t), must stay >= delta
  ScalarCoeff drift;   // b(x,t); the transport velocity is -b
  ScalarCoeff source;  // f(x,t)
  double delta = 1e-6;
  int dim = 1;  // 2 = radial; profiles are then functions of r
  bool gradient_decay_declared = false;

  bool operator==(const CoefficientSpec&) const = default;
};

// Everything the solver and the diagnostics need, sampled on one grid at one
// instant. forcing = (div(cap*drift) + cap*source - d/dt cap) / cap.
struct CoefficientFrame {
  double t = 0.0;
  ScalarField cap, source, forcing, log_cap, cap_dt, div_cap_drift;
  VectorField drift;
  bool fd_fallback = false;
};

CoefficientFrame eval_frame(const CoefficientSpec& spec, const Grid& grid, double t);

// min over the region of cap*source + div(cap*drift) - d/dt cap; positive
// means the scenario squeezes the congested phase everywhere in the region.
double congestion_margin(const CoefficientFrame& frame, const std::vector<char>& region);
double congestion_margin(const CoefficientFrame& frame);  // whole grid

// Structural checks a scenario must clear before a run is meaningful.
DiagnosticsReport validate_assumptions(const CoefficientSpec& spec, const Grid& grid,
                                       const ScalarField& rho0,
                                       const std::vector<double>& k_list, double t_end);

// Frame cache; re-evaluates only when t changes (never for static specs).
class FrameProvider {
 public:
  FrameProvider(CoefficientSpec spec, Grid grid);
  const CoefficientFrame& at(double t);
  const CoefficientSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }

 private:
  CoefficientSpec spec_;
  Grid grid_;
  bool static_coeffs_ = false;
  bool have_frame_ = false;
  CoefficientFrame frame_;
};

}  // namespace pmlab
