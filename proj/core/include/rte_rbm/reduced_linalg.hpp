// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include <Eigen/Dense>

namespace rte_rbm {

// Incrementally orthonormalized snapshot matrix F = U * R, built one column
// at a time by classical Gram-Schmidt with one reorthogonalization pass.
// Appending leaves the leading part of U and R untouched (nested structure),
// and updating costs O(N m) per column.
class SnapshotBasis
{
public:
  enum class AppendStatus
  {
    Ok,
    NearDependent
  };

  AppendStatus append(const Eigen::VectorXd& column, Eigen::VectorXd parameter,
                      double dependence_tol = 1e-13);

  int m() const { return m_; }
  Eigen::Index n() const { return U_.rows(); }
  const Eigen::MatrixXd& U() const { return U_; }
  const Eigen::MatrixXd& R() const { return R_; }
  const std::vector<Eigen::VectorXd>& parameters() const { return params_; }

  // Snapshot matrix F = U R, materialized on demand (test-scale use).
  Eigen::MatrixXd snapshots() const { return U_ * R_; }

  // Singular values of F, computed from the m x m factor R only.
  Eigen::VectorXd singular_values() const;
  // r = sigma_m / sqrt(sum sigma_j^2), in (0, 1].
  double spectral_ratio() const;

private:
  Eigen::MatrixXd U_;
  Eigen::MatrixXd R_;
  std::vector<Eigen::VectorXd> params_;
  int m_ = 0;
};

// Rank-revealing economy QR with column pivoting: Q R = B P with orthonormal
// Q (N x s), upper-triangular R (s x Q_B) with non-increasing |R_ii|, and the
// numerical rank s from |R_ii| <= rank_tol * |R_11|.
struct PivotedQr
{
  Eigen::MatrixXd Q;
  Eigen::MatrixXd R;
  Eigen::VectorXi permutation;  // column j of B*P is B column permutation[j]
  int rank = 0;
};

PivotedQr pivoted_qr(const Eigen::MatrixXd& B, double rank_tol = 1e-13);

// Same factorization kept in Q_B-sized pieces for tall B: an unpivoted
// Householder pass gives B = Q1 R1, then a pivoted QR of R1 gives
// R1 P = Q2 R2, so B P = (Q1 Q2) R2 without forming any N x s factor.
struct PivotedQrFactors
{
  Eigen::MatrixXd R1;  // Q_B x Q_B upper-triangular, Q1^T B
  Eigen::MatrixXd Q2;  // Q_B x s
  Eigen::MatrixXd R2;  // s x Q_B
  Eigen::VectorXi permutation;
  int rank = 0;
};

PivotedQrFactors pivoted_qr_factors(const Eigen::MatrixXd& B, double rank_tol = 1e-13);

// argmin || G A_mu U c - G b_mu ||_2 by dense Householder QR; the
// independent reference for the offline/online least-squares path.
Eigen::VectorXd dense_weighted_ls(const Eigen::MatrixXd& weighted_A,
                                  const Eigen::VectorXd& weighted_b);

// 2-norm condition number via singular values.
double cond2(const Eigen::MatrixXd& M);

}  // namespace rte_rbm
