// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/mesh.hpp"

#include <stdexcept>

namespace rte_rbm {

SpatialMesh make_mesh_1d(double xl, double xr, int nx)
{
  if (nx < 1 || xr <= xl)
    throw std::invalid_argument("make_mesh_1d: invalid bounds or cell count");
  SpatialMesh m;
  m.dim_x = 1;
  m.lo = {xl, 0.0};
  m.hi = {xr, 1.0};
  m.cells = {nx, 1};
  return m;
}

SpatialMesh make_mesh_2d(double xl, double xr, double yl, double yr, int nx, int ny)
{
  if (nx < 1 || ny < 1 || xr <= xl || yr <= yl)
    throw std::invalid_argument("make_mesh_2d: invalid bounds or cell count");
  SpatialMesh m;
  m.dim_x = 2;
  m.lo = {xl, yl};
  m.hi = {xr, yr};
  m.cells = {nx, ny};
  return m;
}

std::vector<SweepOrdering> build_sweep_orderings(const SpatialMesh& mesh,
                                                 const AngularQuadrature& quad)
{
  std::vector<SweepOrdering> out(quad.size());
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  for (int j = 0; j < quad.size(); ++j)
  {
    // Zero components count as positive.
    const bool xpos = quad.nodes[j][0] >= 0.0;
    const bool ypos = quad.nodes[j][1] >= 0.0;
    SweepOrdering& s = out[j];
    s.direction = j;
    s.order.reserve(static_cast<std::size_t>(nx) * ny);
    for (int ky = 0; ky < ny; ++ky)
    {
      int iy = ypos ? ky : ny - 1 - ky;
      for (int kx = 0; kx < nx; ++kx)
      {
        int ix = xpos ? kx : nx - 1 - kx;
        s.order.push_back(mesh.index(ix, iy));
      }
    }
  }
  return out;
}

}  // namespace rte_rbm
