#pragma once

#include <functional>
#include <vector>

#include "pmlab/errors.hpp"

namespace pmlab {

// Uniform cell-centered grid. dim = 1 is an interval [x_lo, x_hi];
// dim = 2 is a radial grid on [0, r_max] where every field is a radial
// profile and cell volumes carry the 2*pi*r factor.
struct Grid {
  int dim = 1;
  int n_cells = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
  double h = 0.0;

  Grid() = default;
  Grid(int dim_, int n_cells_, double x_lo_, double x_hi_);

  double center(int i) const { return x_lo + (i + 0.5) * h; }
  double face(int i) const { return x_lo + i * h; }  // i in [0, n_cells]
  double volume(int i) const;
  double total_volume() const;

  bool operator==(const Grid& o) const {
    return dim == o.dim && n_cells == o.n_cells && x_lo == o.x_lo && x_hi == o.x_hi;
  }
};

// Value-semantic cell sample of a scalar quantity at one instant.
struct ScalarField {
  Grid grid;
  double time = 0.0;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(const Grid& g, double t) : grid(g), time(t), values(g.n_cells, 0.0) {}

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }
};

// In 1d and radial geometry a vector field has a single component.
using VectorField = ScalarField;

ScalarField make_field(const Grid& g, double t, const std::function<double(double)>& fn);

// Linear interpolation between cell centers; clamps to the end cells.
double interp(const ScalarField& u, double x);

}  // namespace pmlab
