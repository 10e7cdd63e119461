// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "rte_rbm/quadrature.hpp"

namespace rte_rbm {

// Uniform Cartesian mesh in 1 or 2 spatial dimensions. Elements are indexed
// e = ix + nx * iy (row-major in y); in 1D, ny == 1 and iy == 0.
struct SpatialMesh
{
  int dim_x = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> cells{1, 1};

  double h(int axis) const { return (hi[axis] - lo[axis]) / cells[axis]; }
  int num_elements() const { return cells[0] * (dim_x == 2 ? cells[1] : 1); }
  int index(int ix, int iy) const { return ix + cells[0] * iy; }
  double center(int axis, int i) const { return lo[axis] + (i + 0.5) * h(axis); }
};

SpatialMesh make_mesh_1d(double xl, double xr, int nx);
SpatialMesh make_mesh_2d(double xl, double xr, double yl, double yr, int nx, int ny);

// Element ordering for the transport sweep in direction j: every upwind
// neighbor of an element precedes it. Directions with a zero component along
// an axis are ordered as if the component were positive (the corresponding
// flux terms vanish, so the choice only fixes the order).
struct SweepOrdering
{
  int direction = 0;
  std::vector<int> order;
};

std::vector<SweepOrdering> build_sweep_orderings(const SpatialMesh& mesh,
                                                 const AngularQuadrature& quad);

}  // namespace rte_rbm
