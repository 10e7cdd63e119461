// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rte_rbm/fom_system.hpp"

namespace rte_rbm {

// Reduced Galerkin quantities: Ahat_q = U^T (term_q) U and bhat_q = U^T b_q.
// Nested in m, so the leading blocks serve every smaller reduced dimension.
struct GalerkinArtifacts
{
  std::vector<Eigen::MatrixXd> Ahat;  // Q_A matrices, m x m
  std::vector<Eigen::VectorXd> bhat;  // Q_b vectors, length m
  int m = 0;
};

GalerkinArtifacts galerkin_offline(const FomSystem& sys, const Eigen::MatrixXd& U);

// Incremental update after one basis column was appended: fills in the new
// row and column of each Ahat_q and the new entry of each bhat_q at
// O(N m Q_A) cost.
void galerkin_extend(GalerkinArtifacts& art, const FomSystem& sys, const Eigen::MatrixXd& U);

// Dense m x m solve of (sum theta_q Ahat_q) c = sum theta_q bhat_q; pass
// m_use < m to solve in a leading sub-basis. Throws when the reciprocal
// condition estimate indicates cond > 1/cond_guard.
Eigen::VectorXd galerkin_online(const GalerkinArtifacts& art, const Eigen::VectorXd& theta_A,
                                const Eigen::VectorXd& theta_b, int m_use = -1,
                                double cond_guard = 1e-14);

double galerkin_condition(const GalerkinArtifacts& art, const Eigen::VectorXd& theta_A,
                          int m_use = -1);

}  // namespace rte_rbm
