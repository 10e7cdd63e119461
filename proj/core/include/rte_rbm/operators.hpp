// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "rte_rbm/dg_space.hpp"
#include "rte_rbm/problems.hpp"
#include "rte_rbm/quadrature.hpp"

namespace rte_rbm {

using Triplet = Eigen::Triplet<double>;

// Block-diagonal operator over elements with one nloc x nloc block each
// (mass-type cross-section matrices). Blocks are symmetric.
class ElementBlockDiag
{
public:
  ElementBlockDiag() = default;
  ElementBlockDiag(int nelem, int nloc)
      : nloc_(nloc), blocks_(Eigen::MatrixXd::Zero(nloc, nloc * nelem)) {}

  int nloc() const { return nloc_; }
  int nelem() const { return static_cast<int>(blocks_.cols()) / std::max(nloc_, 1); }
  Eigen::Ref<Eigen::MatrixXd> block(int e) { return blocks_.middleCols(e * nloc_, nloc_); }
  Eigen::Ref<const Eigen::MatrixXd> block(int e) const
  {
    return blocks_.middleCols(e * nloc_, nloc_);
  }

  // y = this * x on spatial coefficient vectors (length nloc * nelem).
  void apply(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::Ref<Eigen::VectorXd> y) const;
  // y += c * this * x
  void apply_add(double c, const Eigen::Ref<const Eigen::VectorXd>& x,
                 Eigen::Ref<Eigen::VectorXd> y) const;

  void add_scaled(double c, const ElementBlockDiag& other);
  void append_triplets(double c, int row0, int col0, std::vector<Triplet>& out) const;
  double max_abs() const { return blocks_.size() ? blocks_.cwiseAbs().maxCoeff() : 0.0; }

private:
  int nloc_ = 0;
  Eigen::MatrixXd blocks_;  // nloc x (nloc * nelem)
};

// Streaming + upwind-face part of the discrete system: block-diagonal over
// directions, and per direction a block lower-triangular matrix in sweep
// order. On a uniform mesh the per-element diagonal block and the upwind
// coupling blocks are identical across elements, so only three small
// matrices are stored per direction.
class TransportOperator
{
public:
  TransportOperator() = default;
  TransportOperator(const DgSpace& space, const AngularQuadrature& quad);

  int ndir() const { return static_cast<int>(diag_.size()); }
  const Eigen::MatrixXd& diag_block(int j) const { return diag_[j]; }
  const Eigen::MatrixXd& coupling_x(int j) const { return cx_[j]; }
  const Eigen::MatrixXd& coupling_y(int j) const { return cy_[j]; }
  // +1 if the upwind x-neighbor of (ix, iy) is (ix-1, iy), else -1.
  int upwind_step_x(int j) const { return sx_[j]; }
  int upwind_step_y(int j) const { return sy_[j]; }

  // y_j = D_j x_j for one direction (spatial-length vectors).
  void apply_direction(const SpatialMesh& mesh, int j,
                       const Eigen::Ref<const Eigen::VectorXd>& x,
                       Eigen::Ref<Eigen::VectorXd> y) const;
  void apply_direction_transpose(const SpatialMesh& mesh, int j,
                                 const Eigen::Ref<const Eigen::VectorXd>& x,
                                 Eigen::Ref<Eigen::VectorXd> y) const;

  void append_triplets(const SpatialMesh& mesh, int j, int offset,
                       std::vector<Triplet>& out) const;

private:
  std::vector<Eigen::MatrixXd> diag_, cx_, cy_;
  std::vector<int> sx_, sy_;
  int nloc_ = 0;
};

// Parameter-separable operator family A_mu = D + sum_q theta_q^s S_q + sum_q
// theta_q^a A_q, where the scattering terms keep the structural form
// (I - 1 w^T) (x) Sigma_s_q and are never materialized at N x N.
struct AffineOperatorFamily
{
  std::shared_ptr<const DgSpace> space;
  AngularQuadrature quad;
  TransportOperator transport;
  std::vector<ElementBlockDiag> scat;  // Sigma_s_q spatial blocks
  std::vector<ElementBlockDiag> abs;   // Sigma_a_q spatial blocks

  int q_s() const { return static_cast<int>(scat.size()); }
  int q_a() const { return static_cast<int>(abs.size()); }
  int q_A() const { return 1 + q_s() + q_a(); }
  int n() const { return space->n_dof_x() * quad.size(); }

  // y = A_mu x given theta = [1, theta_s..., theta_a...].
  void apply(const Eigen::VectorXd& theta_A, const Eigen::Ref<const Eigen::VectorXd>& x,
             Eigen::Ref<Eigen::VectorXd> y) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& theta_A, const Eigen::VectorXd& x) const;

  // y = (term q)^T x for q in [0, Q_A): q = 0 transport, then scattering,
  // then absorption, matching theta_A ordering.
  void apply_term(int q, const Eigen::Ref<const Eigen::VectorXd>& x,
                  Eigen::Ref<Eigen::VectorXd> y) const;
  void apply_term_transpose(int q, const Eigen::Ref<const Eigen::VectorXd>& x,
                            Eigen::Ref<Eigen::VectorXd> y) const;

  Eigen::SparseMatrix<double> assemble_sparse(const Eigen::VectorXd& theta_A) const;
};

// Parameter-separable data family b_mu = sum_q theta_q^b b_q (Q_b = 1 in the
// registered benchmarks).
struct AffineVectorFamily
{
  std::vector<Eigen::VectorXd> terms;

  int q_b() const { return static_cast<int>(terms.size()); }
  Eigen::VectorXd assemble(const Eigen::VectorXd& theta_b) const;
};

// diag(w_1 M^{-1}, ..., w_Nv M^{-1}) and its Cholesky factor. With the
// orthonormal local basis M == I, so both are diagonal with entries w_j and
// sqrt(w_j) repeated blockwise.
struct WeightingMatrix
{
  Eigen::VectorXd weights;  // angular weights w_j
  int block = 0;            // spatial DOF count per direction

  void apply_cholesky(Eigen::Ref<Eigen::VectorXd> g) const;  // g <- G g
  double norm_h(const Eigen::Ref<const Eigen::VectorXd>& g) const;
  double norm_mh(const Eigen::Ref<const Eigen::VectorXd>& r) const;  // sqrt(r^T Mh r)
};

// Assembly entry points.
TransportOperator assemble_transport(const DgSpace& space, const AngularQuadrature& quad);
AffineOperatorFamily assemble_affine_cross_sections(std::shared_ptr<const DgSpace> space,
                                                    const AngularQuadrature& quad,
                                                    const ProblemDefinition& problem);
AffineVectorFamily assemble_data(const DgSpace& space, const AngularQuadrature& quad,
                                 const ProblemDefinition& problem);

// Single mass-type block family for a material term (shared by assembly and
// tests): block(e) = profile-weighted local mass over the term's boxes.
ElementBlockDiag assemble_material_blocks(const DgSpace& space, const MaterialTerm& term);

Eigen::VectorXd apply_A(const AffineOperatorFamily& family, const Eigen::VectorXd& theta_A,
                        const Eigen::VectorXd& g);

double weighted_norm(const WeightingMatrix& w, const Eigen::VectorXd& g);
double weighted_residual_norm(const AffineOperatorFamily& family, const WeightingMatrix& w,
                              const Eigen::VectorXd& theta_A, const Eigen::VectorXd& b_mu,
                              const Eigen::VectorXd& g);

}  // namespace rte_rbm
