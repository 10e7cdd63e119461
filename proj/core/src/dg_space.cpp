// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/dg_space.hpp"

#include <cmath>
#include <stdexcept>

#include "rte_rbm/quadrature.hpp"

namespace rte_rbm {

void gauss_on_interval(int n, double a, double b, std::vector<double>& x,
                       std::vector<double>& w)
{
  std::vector<double> xr, wr;
  gauss_legendre_rule(n, xr, wr);
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i)
  {
    x[i] = 0.5 * (a + b) + 0.5 * (b - a) * xr[i];
    w[i] = 0.5 * (b - a) * wr[i];
  }
}

namespace {

// Normalized Legendre factors sqrt((2n+1)/h) P_n(xi) for xi in [-1,1].
Eigen::VectorXd normalized_legendre(int degree, double h, double xi)
{
  Eigen::VectorXd v(degree + 1);
  double p0 = 1.0, p1 = xi;
  v[0] = std::sqrt(1.0 / h);
  if (degree >= 1)
    v[1] = std::sqrt(3.0 / h) * xi;
  for (int n = 2; n <= degree; ++n)
  {
    double p2 = ((2.0 * n - 1.0) * xi * p1 - (n - 1.0) * p0) / n;
    p0 = p1;
    p1 = p2;
    v[n] = std::sqrt((2.0 * n + 1.0) / h) * p2;
  }
  return v;
}

}  // namespace

DgSpace::DgSpace(SpatialMesh mesh, int degree) : mesh_(std::move(mesh)), degree_(degree)
{
  if (degree_ < 0)
    throw std::invalid_argument("DgSpace: degree must be >= 0");
  const int n1 = degree_ + 1;
  nloc_ = mesh_.dim_x == 2 ? n1 * n1 : n1;

  for (int axis = 0; axis < mesh_.dim_x; ++axis)
  {
    const double h = mesh_.h(axis);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n1, n1);
    // int P'_k P_l over [-1,1] is 2 when k > l with k-l odd, else 0.
    for (int k = 0; k < n1; ++k)
      for (int l = 0; l < k; ++l)
        if ((k - l) % 2 == 1)
          S(k, l) = 2.0 * std::sqrt((2.0 * k + 1.0) * (2.0 * l + 1.0)) / h;
    S_[axis] = S;
    trace_lo_[axis] = normalized_legendre(degree_, h, -1.0);
    trace_hi_[axis] = normalized_legendre(degree_, h, 1.0);
  }
  if (mesh_.dim_x == 1)
  {
    S_[1] = Eigen::MatrixXd::Zero(1, 1);
    trace_lo_[1] = trace_hi_[1] = Eigen::VectorXd::Ones(1);
  }
}

Eigen::VectorXd DgSpace::eval_axis(int axis, int i, double x) const
{
  const double h = mesh_.h(axis);
  const double xi = 2.0 * (x - mesh_.center(axis, i)) / h;
  return normalized_legendre(degree_, h, xi);
}

Eigen::VectorXd DgSpace::eval_basis(int e, double x, double y) const
{
  const int n1 = nloc1d();
  const int ix = e % mesh_.cells[0];
  Eigen::VectorXd px = eval_axis(0, ix, x);
  if (mesh_.dim_x == 1)
    return px;
  const int iy = e / mesh_.cells[0];
  Eigen::VectorXd py = eval_axis(1, iy, y);
  Eigen::VectorXd v(nloc_);
  for (int ky = 0; ky < n1; ++ky)
    for (int kx = 0; kx < n1; ++kx)
      v[kx + n1 * ky] = px[kx] * py[ky];
  return v;
}

double DgSpace::eval_function(const Eigen::VectorXd& coeffs, int e, double x, double y) const
{
  return coeffs.dot(eval_basis(e, x, y));
}

}  // namespace rte_rbm
