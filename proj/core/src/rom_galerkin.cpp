// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/rom_galerkin.hpp"

#include <stdexcept>

namespace rte_rbm {

GalerkinArtifacts galerkin_offline(const FomSystem& sys, const Eigen::MatrixXd& U)
{
  GalerkinArtifacts art;
  const int m = static_cast<int>(U.cols());
  const int qa = sys.ops.q_A();
  art.m = m;
  art.Ahat.assign(qa, Eigen::MatrixXd(m, m));
  Eigen::VectorXd w(U.rows());
  for (int q = 0; q < qa; ++q)
    for (int c = 0; c < m; ++c)
    {
      sys.ops.apply_term(q, U.col(c), w);
      art.Ahat[q].col(c) = U.transpose() * w;
    }
  for (const auto& bq : sys.data.terms)
    art.bhat.push_back(U.transpose() * bq);
  return art;
}

void galerkin_extend(GalerkinArtifacts& art, const FomSystem& sys, const Eigen::MatrixXd& U)
{
  const int m = static_cast<int>(U.cols());
  if (m != art.m + 1)
    throw std::logic_error("galerkin_extend: basis must have grown by one column");
  const int qa = sys.ops.q_A();
  Eigen::VectorXd w(U.rows());
  for (int q = 0; q < qa; ++q)
  {
    art.Ahat[q].conservativeResize(m, m);
    sys.ops.apply_term(q, U.col(m - 1), w);
    art.Ahat[q].col(m - 1) = U.transpose() * w;
    sys.ops.apply_term_transpose(q, U.col(m - 1), w);
    art.Ahat[q].row(m - 1).head(m - 1) =
        (U.leftCols(m - 1).transpose() * w).transpose();
  }
  for (std::size_t q = 0; q < art.bhat.size(); ++q)
  {
    art.bhat[q].conservativeResize(m);
    art.bhat[q][m - 1] = U.col(m - 1).dot(sys.data.terms[q]);
  }
  art.m = m;
}

namespace {

Eigen::MatrixXd reduced_matrix(const GalerkinArtifacts& art, const Eigen::VectorXd& theta_A,
                               int m_use)
{
  const int m = m_use < 0 ? art.m : m_use;
  Eigen::MatrixXd A = theta_A[0] * art.Ahat[0].topLeftCorner(m, m);
  for (std::size_t q = 1; q < art.Ahat.size(); ++q)
    A += theta_A[q] * art.Ahat[q].topLeftCorner(m, m);
  return A;
}

}  // namespace

Eigen::VectorXd galerkin_online(const GalerkinArtifacts& art, const Eigen::VectorXd& theta_A,
                                const Eigen::VectorXd& theta_b, int m_use, double cond_guard)
{
  const int m = m_use < 0 ? art.m : m_use;
  Eigen::MatrixXd A = reduced_matrix(art, theta_A, m);
  Eigen::VectorXd b = theta_b[0] * art.bhat[0].head(m);
  for (std::size_t q = 1; q < art.bhat.size(); ++q)
    b += theta_b[q] * art.bhat[q].head(m);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  if (!(lu.rcond() > cond_guard))
    throw std::runtime_error("galerkin_online: reduced system is singular or ill-conditioned");
  return lu.solve(b);
}

double galerkin_condition(const GalerkinArtifacts& art, const Eigen::VectorXd& theta_A,
                          int m_use)
{
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(reduced_matrix(art, theta_A, m_use));
  const auto& s = svd.singularValues();
  return s[s.size() - 1] > 0.0 ? s[0] / s[s.size() - 1]
                               : std::numeric_limits<double>::infinity();
}

}  // namespace rte_rbm
