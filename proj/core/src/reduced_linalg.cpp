// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/reduced_linalg.hpp"

#include <stdexcept>

namespace rte_rbm {

SnapshotBasis::AppendStatus SnapshotBasis::append(const Eigen::VectorXd& column,
                                                  Eigen::VectorXd parameter,
                                                  double dependence_tol)
{
  const double cnorm = column.norm();
  if (m_ == 0)
  {
    if (cnorm <= 0.0)
      return AppendStatus::NearDependent;
    U_ = column / cnorm;
    R_ = Eigen::MatrixXd::Constant(1, 1, cnorm);
    params_.push_back(std::move(parameter));
    m_ = 1;
    return AppendStatus::Ok;
  }

  // CGS pass plus one reorthogonalization pass.
  Eigen::VectorXd r = U_.transpose() * column;
  Eigen::VectorXd w = column - U_ * r;
  Eigen::VectorXd r2 = U_.transpose() * w;
  w -= U_ * r2;
  r += r2;
  const double wnorm = w.norm();
  if (wnorm <= dependence_tol * cnorm)
    return AppendStatus::NearDependent;

  U_.conservativeResize(Eigen::NoChange, m_ + 1);
  U_.col(m_) = w / wnorm;
  R_.conservativeResize(m_ + 1, m_ + 1);
  R_.block(0, m_, m_, 1) = r;
  R_.row(m_).setZero();
  R_(m_, m_) = wnorm;
  params_.push_back(std::move(parameter));
  ++m_;
  return AppendStatus::Ok;
}

Eigen::VectorXd SnapshotBasis::singular_values() const
{
  if (m_ == 0)
    return Eigen::VectorXd();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R_);
  return svd.singularValues();
}

double SnapshotBasis::spectral_ratio() const
{
  if (m_ < 1)
    throw std::logic_error("spectral_ratio: empty basis");
  Eigen::VectorXd s = singular_values();
  return s[m_ - 1] / s.norm();
}

PivotedQrFactors pivoted_qr_factors(const Eigen::MatrixXd& B, double rank_tol)
{
  const Eigen::Index qb = B.cols();
  if (B.rows() < qb)
    throw std::invalid_argument("pivoted_qr_factors: matrix must have rows >= cols");

  PivotedQrFactors out;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr1(B);
  out.R1 = qr1.matrixQR().topRows(qb).triangularView<Eigen::Upper>();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(out.R1);
  Eigen::MatrixXd R2full =
      qr2.matrixQR().triangularView<Eigen::Upper>();
  const double r11 = std::abs(R2full(0, 0));
  int s = 0;
  for (Eigen::Index i = 0; i < qb; ++i)
    if (std::abs(R2full(i, i)) > rank_tol * r11)
      ++s;
  if (r11 == 0.0)
    s = 0;
  if (s == 0)
    throw std::invalid_argument("pivoted_qr: zero matrix");

  out.Q2 = qr2.householderQ() * Eigen::MatrixXd::Identity(qb, s);
  out.R2 = R2full.topRows(s);
  out.permutation = qr2.colsPermutation().indices();
  out.rank = s;
  return out;
}

PivotedQr pivoted_qr(const Eigen::MatrixXd& B, double rank_tol)
{
  PivotedQrFactors f = pivoted_qr_factors(B, rank_tol);
  PivotedQr out;
  // Q = Q1 Q2: apply the Householder sequence of the first pass to Q2 padded
  // with zeros.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr1(B);
  Eigen::MatrixXd Qpad = Eigen::MatrixXd::Zero(B.rows(), f.rank);
  Qpad.topRows(B.cols()) = f.Q2;
  out.Q = qr1.householderQ() * Qpad;
  out.R = f.R2;
  out.permutation = f.permutation;
  out.rank = f.rank;
  return out;
}

Eigen::VectorXd dense_weighted_ls(const Eigen::MatrixXd& weighted_A,
                                  const Eigen::VectorXd& weighted_b)
{
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(weighted_A);
  Eigen::MatrixXd R = qr.matrixQR()
                          .topRows(weighted_A.cols())
                          .triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < R.rows(); ++i)
    if (std::abs(R(i, i)) <= 1e-14 * std::abs(R(0, 0)))
      throw std::runtime_error("dense_weighted_ls: rank-deficient least-squares matrix");
  return qr.solve(weighted_b);
}

double cond2(const Eigen::MatrixXd& M)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[s.size() - 1] == 0.0)
    return std::numeric_limits<double>::infinity();
  return s[0] / s[s.size() - 1];
}

}  // namespace rte_rbm
