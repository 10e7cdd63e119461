// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "rte_rbm/fom_system.hpp"

namespace rte_rbm {

// Source-iteration configuration. Convergence is tested on the l-infinity
// change of the scalar-flux coordinate vector.
struct SiConfig
{
  double tol = 1e-12;
  int max_iterations = 10000;
  bool dsa = true;
  Eigen::VectorXd rho0;  // empty: zero initial guess
  int threads = 0;
};

struct FomSolution
{
  Eigen::VectorXd f;    // coordinate vector, length N
  Eigen::VectorXd rho;  // scalar flux, length N_x dofs
  int iterations = 0;
  double final_change = 0.0;
  double residual_mh = 0.0;  // ||A f - b|| in the Mh norm
  bool converged = false;
};

// One transport sweep: for each direction solve
//   (D_j + Sigma_a + Sigma_s) f_j = Sigma_s rho_prev + b_j
// by marching elements in upwind order. Directions run independently.
void transport_sweep(const FomSystem& sys, const MaterialState& mat,
                     const Eigen::VectorXd& rho_prev, const Eigen::VectorXd& b,
                     Eigen::VectorXd& f, int threads = 0);

FomSolution solve_si(const FomSystem& sys, const Eigen::VectorXd& mu, const SiConfig& cfg);
FomSolution solve_si_dsa(const FomSystem& sys, const Eigen::VectorXd& mu, const SiConfig& cfg);

// Sparse LU solve of A_mu f = b_mu (1D-scale problems).
FomSolution solve_direct(const FomSystem& sys, const Eigen::VectorXd& mu);

// Problem-default dispatch (Direct or SI-DSA with the problem's tol_SI).
FomSolution solve_fom(const FomSystem& sys, const Eigen::VectorXd& mu, int threads = 0);

}  // namespace rte_rbm
