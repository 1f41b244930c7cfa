#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pmlab/coefficients.hpp"
#include "pmlab/grid.hpp"
#include "pmlab/solver.hpp"

namespace pmlab {

// Initial-data descriptor. Every kind produces a compactly supported,
// nonnegative profile so the boundary-clearance validation can pass.
struct InitialData {
  enum class Kind { patch, barenblatt, gaussian, file };
  Kind kind = Kind::patch;

  // patch: density = v0 * cap(x, 0) for x in [lo, hi], zero outside
  double v0 = 0.9;
  double lo = -1.0;
  double hi = 1.0;

  // barenblatt: the exact self-similar profile at time offset t0, constant c
  double c = 1.0;
  double t0 = 1.0;

  // gaussian: amp * exp(-(x-center)^2 / (2 sigma^2)), truncated to zero
  // beyond cut*sigma from the center so the support is genuinely compact
  double amp = 0.7;
  double sigma = 0.7;
  double center = 0.0;
  double cut = 4.0;

  // file: two-column CSV (x, density); linear interpolation, zero outside
  std::string path;
  std::vector<double> tab_x, tab_v;  // resolved table for kind == file

  bool operator==(const InitialData&) const = default;
};

struct Scenario {
  std::string id;
  CoefficientSpec coeffs;
  InitialData init;
  Grid grid;
  SolverConfig solver;
  bool congested = false;  // declared expectation, checked by diagnostics

  // initial density sampled at cell centers
  ScalarField rho0() const;
  // pointwise initial density (used when tracing characteristics off-grid)
  std::function<double(double)> rho0_fn() const;
  // source term f(x, t)
  std::function<double(double, double)> source_fn() const;
  // divergence of the drift field, geometry-aware (radial uses b' + b/r)
  std::function<double(double, double)> div_drift_fn() const;

  bool operator==(const Scenario&) const = default;
};

// Self-similar solution of the classical porous medium limit (unit cap, no
// drift, no source, exponent 2): density(x, t) = t^(-1/3) * max(c - x^2 /
// (12 t^(2/3)), 0), pressure = 2 * density, total mass (4/3) sqrt(12) c^(3/2).
double barenblatt_density(double x, double t, double c);
double barenblatt_pressure(double x, double t, double c);
double barenblatt_mass(double c);

// Built-in scenario library.
std::vector<std::string> builtin_scenario_names();
Scenario builtin_scenario(const std::string& id);

// Flat sectioned key=value format; see docs/formats.md for the grammar.
// `origin` labels error messages (file name or "<builtin>").
Scenario parse_scenario(const std::string& text, const std::string& origin);
std::string write_scenario(const Scenario& scenario);

// Accepts a built-in name or a path to a scenario file. The result has been
// checked by validate_assumptions; failures raise ValidationError.
Scenario load_scenario(const std::string& name_or_path);

// Re-run the assumption checks (useful after command-line overrides).
void validate_scenario(const Scenario& scenario);

}  // namespace pmlab
