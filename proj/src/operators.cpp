#include "pmlab/operators.hpp"

#include <algorithm>
#include <cmath>

namespace pmlab {

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid;
  const int n = g.n_cells;
  VectorField out(g, u.time);
  if (n == 1) return out;
  out[0] = (u[1] - u[0]) / g.h;
  out[n - 1] = (u[n - 1] - u[n - 2]) / g.h;
  for (int i = 1; i < n - 1; ++i) out[i] = (u[i + 1] - u[i - 1]) / (2.0 * g.h);
  return out;
}

ScalarField div_cap_grad(const ScalarField& cap, const ScalarField& u) {
  const Grid& g = u.grid;
  if (!(cap.grid == g)) throw ValidationError("div_cap_grad: grid mismatch");
  const int n = g.n_cells;
  ScalarField out(g, u.time);
  // face flux j sits between cells j-1 and j; boundary faces carry zero flux
  std::vector<double> flux(n + 1, 0.0);
  for (int j = 1; j < n; ++j) {
    double cf = 0.5 * (cap[j - 1] + cap[j]);
    double fx = cf * (u[j] - u[j - 1]) / g.h;
    if (g.dim == 2) fx *= g.face(j);
    flux[j] = fx;
  }
  for (int i = 0; i < n; ++i) {
    double geom = (g.dim == 2) ? g.center(i) : 1.0;
    out[i] = (flux[i + 1] - flux[i]) / (geom * g.h);
  }
  return out;
}

Norms norms(const ScalarField& u) {
  Norms r;
  double s2 = 0, s4 = 0;
  for (int i = 0; i < u.grid.n_cells; ++i) {
    double v = u[i], w = u.grid.volume(i), a = std::fabs(v);
    r.l1 += a * w;
    s2 += v * v * w;
    s4 += v * v * v * v * w;
    r.linf = std::max(r.linf, a);
  }
  r.l2 = std::sqrt(s2);
  r.l4 = std::pow(s4, 0.25);
  return r;
}

double mass(const ScalarField& u) {
  double m = 0;
  for (int i = 0; i < u.grid.n_cells; ++i) m += u[i] * u.grid.volume(i);
  return m;
}

double bv_seminorm(const ScalarField& u) {
  VectorField gr = gradient(u);
  double s = 0;
  for (int i = 0; i < u.grid.n_cells; ++i) s += std::fabs(gr[i]) * u.grid.volume(i);
  return s;
}

Support support(const ScalarField& u, double theta) {
  constexpr double floor = 1e-30;
  double umax = floor;
  for (double v : u.values) umax = std::max(umax, v);
  double thr = theta * umax;
  Support s;
  s.mask.assign(u.grid.n_cells, 0);
  for (int i = 0; i < u.grid.n_cells; ++i) {
    if (u[i] > thr) {
      s.mask[i] = 1;
      if (s.first < 0) s.first = i;
      s.last = i;
    }
  }
  if (s.first < 0) throw EmptySupportError("support: no cell above threshold");
  s.lo = u.grid.center(s.first);
  s.hi = u.grid.center(s.last);
  return s;
}

std::vector<char> erode(const std::vector<char>& mask, int cells) {
  const int n = static_cast<int>(mask.size());
  std::vector<char> out(n, 0);
  for (int i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    bool keep = (i - cells >= 0) && (i + cells < n);
    for (int j = i - cells; keep && j <= i + cells; ++j) keep = mask[j];
    out[i] = keep ? 1 : 0;
  }
  return out;
}

int count(const std::vector<char>& mask) {
  return static_cast<int>(std::count(mask.begin(), mask.end(), char(1)));
}

}  // namespace pmlab
