// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>

#include "rte_rbm/operators.hpp"

namespace rte_rbm {

// Assembled full-order model for one problem at one discretization: mesh,
// quadrature, affine operator/data families, sweep orderings, weighting.
// Immutable after build; shareable across threads.
struct FomSystem
{
  ProblemDefinition problem;
  SpatialMesh mesh;
  AngularQuadrature quad;
  std::shared_ptr<const DgSpace> space;
  AffineOperatorFamily ops;
  AffineVectorFamily data;
  WeightingMatrix weighting;
  std::vector<SweepOrdering> sweeps;

  int n_dof_x() const { return space->n_dof_x(); }
  Eigen::Index n() const { return static_cast<Eigen::Index>(n_dof_x()) * quad.size(); }

  Eigen::VectorXd theta_A(const Eigen::VectorXd& mu) const { return problem.theta_A(mu); }
  Eigen::VectorXd theta_b(const Eigen::VectorXd& mu) const { return problem.theta_b(mu); }
  Eigen::VectorXd b_mu(const Eigen::VectorXd& mu) const
  {
    return data.assemble(theta_b(mu));
  }

  // Scalar flux rho = sum_j w_j f_j of a coordinate vector.
  Eigen::VectorXd moments(const Eigen::VectorXd& f) const;

  double norm_h(const Eigen::VectorXd& g) const { return weighting.norm_h(g); }
  double residual_norm(const Eigen::VectorXd& mu, const Eigen::VectorXd& g) const
  {
    return weighted_residual_norm(ops, weighting, theta_A(mu), b_mu(mu), g);
  }
};

FomSystem build_fom_system(const ProblemDefinition& problem, const Discretization& disc);

// Per-parameter material data used by the sweep and the DSA correction:
// combined sigma_t / sigma_s local blocks and their element means.
struct MaterialState
{
  ElementBlockDiag sigma_t_blocks;  // sum of scattering + absorption blocks
  ElementBlockDiag sigma_s_blocks;
  Eigen::VectorXd sigma_t_mean;  // per element
  Eigen::VectorXd sigma_s_mean;
  Eigen::VectorXd sigma_a_mean;
};

MaterialState evaluate_materials(const FomSystem& sys, const Eigen::VectorXd& mu);

}  // namespace rte_rbm
