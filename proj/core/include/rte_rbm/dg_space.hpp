// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "rte_rbm/mesh.hpp"

namespace rte_rbm {

// Tensor-product DG space of degree K per axis on a uniform Cartesian mesh.
// The local basis is L2-orthonormalized Legendre per element, so the global
// mass matrix is the identity and the residual weighting matrix is diagonal.
//
// Local index within an element: p = ix + (K+1) * iy, with phi_p(x, y) =
// P_ix(x) * P_iy(y) (P_i the normalized 1D factors). Global DOF index:
// element * nloc + p, elements ordered as in SpatialMesh.
class DgSpace
{
public:
  DgSpace(SpatialMesh mesh, int degree = 1);

  const SpatialMesh& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  int nloc1d() const { return degree_ + 1; }
  int nloc() const { return nloc_; }
  int n_dof_x() const { return nloc_ * mesh_.num_elements(); }

  // int_T phi'_k phi_l dx along an axis (nloc1d x nloc1d, includes 1/h).
  const Eigen::MatrixXd& deriv_matrix(int axis) const { return S_[axis]; }
  // 1D factor traces at the element faces, scaled by 1/sqrt(h).
  const Eigen::VectorXd& trace_lo(int axis) const { return trace_lo_[axis]; }
  const Eigen::VectorXd& trace_hi(int axis) const { return trace_hi_[axis]; }

  // Normalized 1D Legendre factors at physical coordinate x within element i
  // along the given axis.
  Eigen::VectorXd eval_axis(int axis, int i, double x) const;

  // All local basis functions at a physical point inside element e.
  Eigen::VectorXd eval_basis(int e, double x, double y) const;

  // Reconstructs a DG coefficient block (nloc values for element e) at a point.
  double eval_function(const Eigen::VectorXd& coeffs, int e, double x, double y) const;

private:
  SpatialMesh mesh_;
  int degree_;
  int nloc_;
  Eigen::MatrixXd S_[2];
  Eigen::VectorXd trace_lo_[2], trace_hi_[2];
};

// Gauss rule with n points mapped to [a, b].
void gauss_on_interval(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w);

}  // namespace rte_rbm
