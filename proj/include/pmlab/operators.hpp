#pragma once

#include <vector>

#include "pmlab/grid.hpp"

namespace pmlab {

// Cell-centered gradient: central differences inside, one-sided at the ends.
VectorField gradient(const ScalarField& u);

// Conservative face-flux form of div(cap * grad u) with zero-flux ghost
// cells. On a radial grid this is (1/r) d/dr (r * cap * du/dr), assembled
// from face radii so that the discrete operator telescopes exactly.
ScalarField div_cap_grad(const ScalarField& cap, const ScalarField& u);

struct Norms {
  double l1 = 0, l2 = 0, l4 = 0, linf = 0;
};
Norms norms(const ScalarField& u);
double mass(const ScalarField& u);  // signed integral, volume weighted

double bv_seminorm(const ScalarField& u);

struct Support {
  std::vector<char> mask;  // one entry per cell
  int first = -1;
  int last = -1;
  double lo = 0, hi = 0;  // bounding interval of member cell centers
};

// Cells with u > theta * max(max(u), floor); floor = 1e-30 guards the
// all-zero field. Throws EmptySupportError when no cell qualifies.
Support support(const ScalarField& u, double theta);

// Keep a cell only if every cell within `cells` of it is in the mask
// (cells past the domain edge count as outside).
std::vector<char> erode(const std::vector<char>& mask, int cells);

int count(const std::vector<char>& mask);

}  // namespace pmlab
