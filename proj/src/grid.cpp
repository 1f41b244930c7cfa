#include "pmlab/grid.hpp"

#include <cmath>
#include <numbers>

namespace pmlab {

Grid::Grid(int dim_, int n_cells_, double x_lo_, double x_hi_)
    : dim(dim_), n_cells(n_cells_), x_lo(x_lo_), x_hi(x_hi_) {
  if (dim != 1 && dim != 2) throw ValidationError("grid: dim must be 1 or 2");
  if (n_cells < 8) throw ValidationError("grid: need at least 8 cells");
  if (!(x_hi > x_lo)) throw ValidationError("grid: x_hi must exceed x_lo");
  if (dim == 2 && x_lo != 0.0) throw ValidationError("grid: radial grid must start at r = 0");
  h = (x_hi - x_lo) / n_cells;
}

double Grid::volume(int i) const {
  if (dim == 1) return h;
  return 2.0 * std::numbers::pi * center(i) * h;
}

double Grid::total_volume() const {
  if (dim == 1) return x_hi - x_lo;
  return std::numbers::pi * x_hi * x_hi;
}

ScalarField make_field(const Grid& g, double t, const std::function<double(double)>& fn) {
  ScalarField u(g, t);
  for (int i = 0; i < g.n_cells; ++i) u[i] = fn(g.center(i));
  return u;
}

double interp(const ScalarField& u, double x) {
  const Grid& g = u.grid;
  if (x <= g.center(0)) return u[0];
  if (x >= g.center(g.n_cells - 1)) return u[g.n_cells - 1];
  double s = (x - g.center(0)) / g.h;
  int j = static_cast<int>(s);
  if (j >= g.n_cells - 1) j = g.n_cells - 2;
  double w = s - j;
  return (1.0 - w) * u[j] + w * u[j + 1];
}

}  // namespace pmlab
