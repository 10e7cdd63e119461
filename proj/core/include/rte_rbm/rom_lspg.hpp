// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rte_rbm/fom_system.hpp"

namespace rte_rbm {

enum class VariantMode
{
  Standard,       // concatenated B includes the data vectors; residuals via G = R P^T
  PrimeOffline,   // B without data vectors; residuals via the Pythagoras formula
  NormalEquation  // test-only reference solving W^T A U c = W^T b
};

// Offline products of the parametric least-squares pipeline. Everything here
// is Q_B- or m-sized, never N-sized, so the online stage stays independent of
// the full order dimension.
struct LspgArtifacts
{
  VariantMode mode = VariantMode::Standard;
  int m = 0;
  int rank = 0;  // s, with m <= s <= Q_B
  int q_A = 0;
  int q_b = 0;
  std::vector<Eigen::MatrixXd> Y;       // Q^T Abar_q, s x m
  std::vector<Eigen::VectorXd> btilde;  // Q^T bbar_q, length s
  Eigen::MatrixXd G_res;                // R P^T, s x Q_B (Standard mode)
  Eigen::MatrixXd bbar_gram;            // (bbar_q)^T (bbar_p)
  double range_defect = 0.0;            // max |(I - QQ^T) B| / max |B|

  int q_B() const { return q_A * m + (mode == VariantMode::Standard ? q_b : 0); }
  std::size_t byte_size() const;
};

LspgArtifacts lspg_offline(const FomSystem& sys, const Eigen::MatrixXd& U,
                           VariantMode mode = VariantMode::Standard,
                           double rank_tol = 1e-13);

// Same pipeline from explicit weighted blocks Abar_q = G (term_q) U and
// bbar_q = G b_q (used by tests with synthetic instances).
LspgArtifacts lspg_offline_from_blocks(const std::vector<Eigen::MatrixXd>& Abar,
                                       const std::vector<Eigen::VectorXd>& bbar,
                                       VariantMode mode = VariantMode::Standard,
                                       double rank_tol = 1e-13);

struct LspgSolve
{
  Eigen::VectorXd c;  // reduced coefficients
  Eigen::VectorXd d;  // Qtilde^T btilde_mu, reused by the Pythagoras residual
};

// Online solve: QR of Y_mu = sum theta_q Y_q (s x m), then back-substitution.
LspgSolve lspg_online(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                      const Eigen::VectorXd& theta_b);

// || Abar_mu c - bbar_mu ||_2 = || A_mu U c - b_mu ||_Mh evaluated as
// || G_res [theta_A (x) c; -theta_b] ||_2; valid at any (mu, c) pair.
double residual_norm_alg5(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                          const Eigen::VectorXd& theta_b, const Eigen::VectorXd& c);

// Pythagoras residual (sqrt(||bbar||^2 - ||d||^2)) at the least-squares
// minimizer; loses significance once the true residual reaches ~sqrt(eps)
// relative, which is reported through the clamp flag.
struct Variant1Residual
{
  double value = 0.0;
  bool clamped = false;
};

Variant1Residual residual_norm_variant1(const LspgArtifacts& art,
                                        const Eigen::VectorXd& theta_b,
                                        const Eigen::VectorXd& d_mu);

// Normal-equation route (W_mu = Mh A_mu U). Demonstrates the conditioning
// squaring; not an online path.
Eigen::VectorXd normal_equation_solve(const FomSystem& sys, const Eigen::MatrixXd& U,
                                      const Eigen::VectorXd& mu, double* cond_out = nullptr);

// cond2 of the reduced least-squares matrix; equals cond2(G A_mu U) because
// the Q factor is orthonormal.
double lspg_condition(const LspgArtifacts& art, const Eigen::VectorXd& theta_A);

// Weighted blocks for one basis: columns G (term_q) u_c and G b_q.
std::vector<Eigen::MatrixXd> weighted_operator_blocks(const FomSystem& sys,
                                                      const Eigen::MatrixXd& U);
std::vector<Eigen::VectorXd> weighted_data_blocks(const FomSystem& sys);

}  // namespace rte_rbm
