// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rte_rbm {

namespace {

// Legendre P_n and P_n' at x via the three-term recurrence.
void legendre_eval(int n, double x, double& p, double& dp)
{
  double p0 = 1.0, p1 = x;
  if (n == 0)
  {
    p = 1.0;
    dp = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k)
  {
    double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0);
}

}  // namespace

void gauss_legendre_rule(int n, std::vector<double>& nodes, std::vector<double>& weights)
{
  if (n < 1)
    throw std::invalid_argument("gauss_legendre_rule: n must be >= 1");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Compute the roots in (0,1] and mirror, so the rule is exactly symmetric.
  for (int i = 0; i < n / 2; ++i)
  {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p, dp;
    for (int it = 0; it < 100; ++it)
    {
      legendre_eval(n, x, p, dp);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15)
        break;
    }
    legendre_eval(n, x, p, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -std::abs(x);
    nodes[n - 1 - i] = std::abs(x);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
  {
    double p, dp;
    legendre_eval(n, 0.0, p, dp);
    nodes[n / 2] = 0.0;
    weights[n / 2] = 2.0 / (dp * dp);
  }
}

AngularQuadrature gauss_legendre_slab(int n_points)
{
  if (n_points < 1)
    throw std::invalid_argument("gauss_legendre_slab: n_points must be >= 1");
  std::vector<double> x, w;
  gauss_legendre_rule(n_points, x, w);
  AngularQuadrature q;
  q.dim_v = 1;
  q.nodes.resize(n_points);
  q.weights.resize(n_points);
  for (int i = 0; i < n_points; ++i)
  {
    q.nodes[i] = {x[i], 0.0, 0.0};
    q.weights[i] = 0.5 * w[i];  // rho = (1/2) int_{-1}^{1} f dv
  }
  return q;
}

AngularQuadrature chebyshev_legendre_sphere(int n_theta, int n_xi)
{
  if (n_theta < 2 || n_theta % 2 != 0)
    throw std::invalid_argument("chebyshev_legendre_sphere: n_theta must be even and >= 2");
  if (n_xi < 1)
    throw std::invalid_argument("chebyshev_legendre_sphere: n_xi must be >= 1");
  std::vector<double> xi, wxi;
  gauss_legendre_rule(n_xi, xi, wxi);

  AngularQuadrature q;
  q.dim_v = 3;
  q.nodes.resize(n_theta * n_xi);
  q.weights.resize(n_theta * n_xi);
  const double w_theta = 1.0 / (2.0 * n_theta);
  for (int k = 0; k < n_theta; ++k)
  {
    double theta = (2.0 * (k + 1) - 1.0) * M_PI / n_theta;
    double c = std::cos(theta), s = std::sin(theta);
    for (int l = 0; l < n_xi; ++l)
    {
      int j = k * n_xi + l;  // j = l + (k-1) N_xi, 1-based
      double r = std::sqrt(1.0 - xi[l] * xi[l]);
      q.nodes[j] = {c * r, s * r, xi[l]};
      q.weights[j] = w_theta * wxi[l];
    }
  }
  return q;
}

}  // namespace rte_rbm
