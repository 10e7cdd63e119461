// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

namespace rte_rbm {

// Discrete-ordinates quadrature with scaled weights: sum(weights) == 1, so
// the scalar flux rho = sum_j w_j f_j is the mean of f over the angular set.
struct AngularQuadrature
{
  int dim_v = 1;  // 1: slab cosine on [-1,1], 3: unit sphere
  std::vector<std::array<double, 3>> nodes;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(nodes.size()); }
};

// Gauss-Legendre nodes/weights on [-1,1], computed by Newton iteration on the
// Legendre polynomials (no tables). Weights sum to 2.
void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights);

// n-point Gauss-Legendre rule in the slab cosine variable; weights are the
// standard ones divided by 2 so they sum to 1.
AngularQuadrature gauss_legendre_slab(int n_points);

// (N_theta, N_xi) Chebyshev-Legendre product rule on the unit sphere:
//   v_j = (cos(theta_k) sqrt(1-xi_l^2), sin(theta_k) sqrt(1-xi_l^2), xi_l)
// with theta_k = (2k-1) pi / N_theta, w_k = 1/(2 N_theta), and the N_xi-point
// Gauss-Legendre rule in xi. Node index j = l + (k-1) N_xi (1-based), which is
// kept fixed so regression output is bit-stable.
AngularQuadrature chebyshev_legendre_sphere(int n_theta, int n_xi);

}  // namespace rte_rbm
