// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/fom_system.hpp"

#include <stdexcept>

namespace rte_rbm {

Eigen::VectorXd FomSystem::moments(const Eigen::VectorXd& f) const
{
  const int nsp = n_dof_x();
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(nsp);
  for (int j = 0; j < quad.size(); ++j)
    rho += quad.weights[j] * f.segment(static_cast<Eigen::Index>(j) * nsp, nsp);
  return rho;
}

FomSystem build_fom_system(const ProblemDefinition& problem, const Discretization& disc)
{
  FomSystem sys;
  sys.problem = problem;
  if (problem.dim_x == 1)
  {
    sys.mesh = make_mesh_1d(problem.domain.lo[0], problem.domain.hi[0], disc.nx);
    sys.quad = gauss_legendre_slab(disc.quad.n_slab);
  }
  else
  {
    sys.mesh = make_mesh_2d(problem.domain.lo[0], problem.domain.hi[0], problem.domain.lo[1],
                            problem.domain.hi[1], disc.nx, disc.ny);
    sys.quad = chebyshev_legendre_sphere(disc.quad.n_theta, disc.quad.n_xi);
  }
  sys.space = std::make_shared<const DgSpace>(sys.mesh, disc.degree);
  sys.ops = assemble_affine_cross_sections(sys.space, sys.quad, problem);
  sys.data = assemble_data(*sys.space, sys.quad, problem);
  sys.weighting = WeightingMatrix{sys.quad.weights, sys.space->n_dof_x()};
  sys.sweeps = build_sweep_orderings(sys.mesh, sys.quad);
  return sys;
}

MaterialState evaluate_materials(const FomSystem& sys, const Eigen::VectorXd& mu)
{
  MaterialState m;
  const Eigen::VectorXd th = sys.theta_A(mu);
  const int qs = sys.ops.q_s();
  for (int q = 0; q < qs; ++q)
    m.sigma_s_blocks.add_scaled(th[1 + q], sys.ops.scat[q]);
  m.sigma_t_blocks = m.sigma_s_blocks;
  for (int q = 0; q < sys.ops.q_a(); ++q)
    m.sigma_t_blocks.add_scaled(th[1 + qs + q], sys.ops.abs[q]);
  if (m.sigma_t_blocks.nloc() == 0)
    m.sigma_t_blocks = ElementBlockDiag(sys.mesh.num_elements(), sys.space->nloc());
  if (m.sigma_s_blocks.nloc() == 0)
    m.sigma_s_blocks = ElementBlockDiag(sys.mesh.num_elements(), sys.space->nloc());

  // The (0,0) entry of a mass-type block against the orthonormal basis is
  // exactly the element mean of the cross section.
  const int ne = sys.mesh.num_elements();
  m.sigma_t_mean.resize(ne);
  m.sigma_s_mean.resize(ne);
  m.sigma_a_mean.resize(ne);
  for (int e = 0; e < ne; ++e)
  {
    m.sigma_s_mean[e] = m.sigma_s_blocks.block(e)(0, 0);
    m.sigma_t_mean[e] = m.sigma_t_blocks.block(e)(0, 0);
    m.sigma_a_mean[e] = m.sigma_t_mean[e] - m.sigma_s_mean[e];
  }
  return m;
}

}  // namespace rte_rbm
