// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/rom_lspg.hpp"

#include <stdexcept>

#include "rte_rbm/reduced_linalg.hpp"

namespace rte_rbm {

std::size_t LspgArtifacts::byte_size() const
{
  std::size_t bytes = 0;
  for (const auto& y : Y)
    bytes += sizeof(double) * y.size();
  for (const auto& b : btilde)
    bytes += sizeof(double) * b.size();
  bytes += sizeof(double) * (G_res.size() + bbar_gram.size());
  return bytes;
}

std::vector<Eigen::MatrixXd> weighted_operator_blocks(const FomSystem& sys,
                                                      const Eigen::MatrixXd& U)
{
  const int m = static_cast<int>(U.cols());
  const int qa = sys.ops.q_A();
  std::vector<Eigen::MatrixXd> blocks(qa, Eigen::MatrixXd(U.rows(), m));
  Eigen::VectorXd w(U.rows());
  for (int q = 0; q < qa; ++q)
    for (int c = 0; c < m; ++c)
    {
      sys.ops.apply_term(q, U.col(c), w);
      sys.weighting.apply_cholesky(w);
      blocks[q].col(c) = w;
    }
  return blocks;
}

std::vector<Eigen::VectorXd> weighted_data_blocks(const FomSystem& sys)
{
  std::vector<Eigen::VectorXd> out;
  for (const auto& bq : sys.data.terms)
  {
    Eigen::VectorXd w = bq;
    sys.weighting.apply_cholesky(w);
    out.push_back(std::move(w));
  }
  return out;
}

LspgArtifacts lspg_offline_from_blocks(const std::vector<Eigen::MatrixXd>& Abar,
                                       const std::vector<Eigen::VectorXd>& bbar,
                                       VariantMode mode, double rank_tol)
{
  if (mode == VariantMode::NormalEquation)
    throw std::invalid_argument("lspg_offline: the normal-equation route has no QR artifacts");
  const int qa = static_cast<int>(Abar.size());
  const int qb = static_cast<int>(bbar.size());
  const int m = static_cast<int>(Abar[0].cols());
  const Eigen::Index n = Abar[0].rows();
  const int qB = qa * m + (mode == VariantMode::Standard ? qb : 0);
  if (n < qB)
    throw std::invalid_argument("lspg_offline: requires N >= Q_B");

  Eigen::MatrixXd B(n, qB);
  for (int q = 0; q < qa; ++q)
    B.middleCols(q * m, m) = Abar[q];
  if (mode == VariantMode::Standard)
    for (int q = 0; q < qb; ++q)
      B.col(qa * m + q) = bbar[q];

  // B = Q1 R1, then pivoted QR of R1; all products below stay Q_B-sized.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr1(B);
  Eigen::MatrixXd R1 = qr1.matrixQR().topRows(qB).triangularView<Eigen::Upper>();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr2(R1);
  Eigen::MatrixXd R2full = qr2.matrixQR().triangularView<Eigen::Upper>();
  const double r11 = std::abs(R2full(0, 0));
  int s = 0;
  for (int i = 0; i < qB; ++i)
    if (std::abs(R2full(i, i)) > rank_tol * r11)
      ++s;
  if (s < m)
    throw std::runtime_error("lspg_offline: rank of the concatenated matrix fell below m");

  LspgArtifacts art;
  art.mode = mode;
  art.m = m;
  art.rank = s;
  art.q_A = qa;
  art.q_b = qb;
  Eigen::MatrixXd Q2 = qr2.householderQ() * Eigen::MatrixXd::Identity(qB, s);

  for (int q = 0; q < qa; ++q)
    art.Y.push_back(Q2.transpose() * R1.middleCols(q * m, m));
  if (mode == VariantMode::Standard)
  {
    for (int q = 0; q < qb; ++q)
      art.btilde.push_back(Q2.transpose() * R1.col(qa * m + q));
    // G = R P^T: column perm[j] of G is column j of R2.
    Eigen::MatrixXd R2 = R2full.topRows(s);
    art.G_res.resize(s, qB);
    const auto& perm = qr2.colsPermutation().indices();
    for (int jcol = 0; jcol < qB; ++jcol)
      art.G_res.col(perm[jcol]) = R2.col(jcol);
  }
  else
  {
    for (int q = 0; q < qb; ++q)
    {
      Eigen::VectorXd t = qr1.householderQ().transpose() * bbar[q];
      art.btilde.push_back(Q2.transpose() * t.head(qB));
    }
  }

  art.bbar_gram.resize(qb, qb);
  for (int q = 0; q < qb; ++q)
    for (int p = 0; p < qb; ++p)
      art.bbar_gram(q, p) = bbar[q].dot(bbar[p]);

  Eigen::MatrixXd defect = R1 - Q2 * (Q2.transpose() * R1);
  const double bmax = R1.cwiseAbs().maxCoeff();
  art.range_defect = bmax > 0.0 ? defect.cwiseAbs().maxCoeff() / bmax : 0.0;
  return art;
}

LspgArtifacts lspg_offline(const FomSystem& sys, const Eigen::MatrixXd& U, VariantMode mode,
                           double rank_tol)
{
  return lspg_offline_from_blocks(weighted_operator_blocks(sys, U), weighted_data_blocks(sys),
                                  mode, rank_tol);
}

LspgSolve lspg_online(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                      const Eigen::VectorXd& theta_b)
{
  Eigen::MatrixXd Ymu = theta_A[0] * art.Y[0];
  for (int q = 1; q < art.q_A; ++q)
    Ymu += theta_A[q] * art.Y[q];
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(Ymu);
  Eigen::MatrixXd R = qr.matrixQR().topRows(art.m).triangularView<Eigen::Upper>();
  for (int i = 0; i < art.m; ++i)
    if (std::abs(R(i, i)) <= 1e-14 * std::abs(R(0, 0)))
      throw std::runtime_error("lspg_online: rank-deficient reduced least-squares matrix");

  Eigen::VectorXd bt = theta_b[0] * art.btilde[0];
  for (int q = 1; q < art.q_b; ++q)
    bt += theta_b[q] * art.btilde[q];

  LspgSolve out;
  out.d = (qr.householderQ().transpose() * bt).head(art.m);
  out.c = R.triangularView<Eigen::Upper>().solve(out.d);
  return out;
}

double residual_norm_alg5(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                          const Eigen::VectorXd& theta_b, const Eigen::VectorXd& c)
{
  if (art.mode != VariantMode::Standard)
    throw std::logic_error("residual_norm_alg5: requires Standard-mode artifacts");
  if (c.size() != art.m)
    throw std::invalid_argument("residual_norm_alg5: coefficient dimension mismatch");
  Eigen::VectorXd z(art.q_B());
  for (int q = 0; q < art.q_A; ++q)
    z.segment(q * art.m, art.m) = theta_A[q] * c;
  for (int q = 0; q < art.q_b; ++q)
    z[art.q_A * art.m + q] = -theta_b[q];
  return (art.G_res * z).norm();
}

Variant1Residual residual_norm_variant1(const LspgArtifacts& art,
                                        const Eigen::VectorXd& theta_b,
                                        const Eigen::VectorXd& d_mu)
{
  const double b2 = theta_b.dot(art.bbar_gram * theta_b);
  const double radicand = b2 - d_mu.squaredNorm();
  Variant1Residual r;
  r.clamped = radicand < 0.0;
  r.value = std::sqrt(std::max(radicand, 0.0));
  return r;
}

Eigen::VectorXd normal_equation_solve(const FomSystem& sys, const Eigen::MatrixXd& U,
                                      const Eigen::VectorXd& mu, double* cond_out)
{
  const Eigen::VectorXd thA = sys.theta_A(mu);
  const int m = static_cast<int>(U.cols());
  Eigen::MatrixXd GAU(U.rows(), m);
  Eigen::VectorXd w(U.rows());
  for (int c = 0; c < m; ++c)
  {
    sys.ops.apply(thA, U.col(c), w);
    sys.weighting.apply_cholesky(w);
    GAU.col(c) = w;
  }
  Eigen::VectorXd Gb = sys.b_mu(mu);
  sys.weighting.apply_cholesky(Gb);
  Eigen::MatrixXd normal = GAU.transpose() * GAU;
  if (cond_out)
    *cond_out = cond2(normal);
  return Eigen::PartialPivLU<Eigen::MatrixXd>(normal).solve(GAU.transpose() * Gb);
}

double lspg_condition(const LspgArtifacts& art, const Eigen::VectorXd& theta_A)
{
  Eigen::MatrixXd Ymu = theta_A[0] * art.Y[0];
  for (int q = 1; q < art.q_A; ++q)
    Ymu += theta_A[q] * art.Y[q];
  return cond2(Ymu);
}

}  // namespace rte_rbm
