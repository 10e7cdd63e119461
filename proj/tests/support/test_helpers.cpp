// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "test_helpers.hpp"

#include <cmath>
#include <random>

namespace test_support {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Plain Legendre recurrence, re-derived here so the oracle does not share the
// library's basis code.
void legendre_all(int degree, double xi, VectorXd& p, VectorXd& dp)
{
  p.resize(degree + 1);
  dp.resize(degree + 1);
  p[0] = 1.0;
  dp[0] = 0.0;
  if (degree >= 1)
  {
    p[1] = xi;
    dp[1] = 1.0;
  }
  for (int n = 2; n <= degree; ++n)
  {
    p[n] = ((2.0 * n - 1.0) * xi * p[n - 1] - (n - 1.0) * p[n - 2]) / n;
    dp[n] = dp[n - 2] + (2.0 * n - 1.0) * p[n - 1];
  }
}

struct BasisPoint
{
  VectorXd value;
  VectorXd ddx;
  VectorXd ddy;
};

BasisPoint basis_at(const FomSystem& sys, int e, double x, double y)
{
  const auto& mesh = sys.mesh;
  const int K = sys.space->degree();
  const int n1 = K + 1;
  const int ix = e % mesh.cells[0];
  const int iy = mesh.dim_x == 2 ? e / mesh.cells[0] : 0;
  const double hx = mesh.h(0);
  const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
  const double xix = 2.0 * (x - mesh.center(0, ix)) / hx;
  VectorXd px, dpx, py, dpy;
  legendre_all(K, xix, px, dpx);
  for (int n = 0; n <= K; ++n)
  {
    const double s = std::sqrt((2.0 * n + 1.0) / hx);
    dpx[n] *= s * 2.0 / hx;
    px[n] *= s;
  }
  BasisPoint out;
  if (mesh.dim_x == 1)
  {
    out.value = px;
    out.ddx = dpx;
    out.ddy = VectorXd::Zero(n1);
    return out;
  }
  const double xiy = 2.0 * (y - mesh.center(1, iy)) / hy;
  legendre_all(K, xiy, py, dpy);
  for (int n = 0; n <= K; ++n)
  {
    const double s = std::sqrt((2.0 * n + 1.0) / hy);
    dpy[n] *= s * 2.0 / hy;
    py[n] *= s;
  }
  const int nloc = n1 * n1;
  out.value.resize(nloc);
  out.ddx.resize(nloc);
  out.ddy.resize(nloc);
  for (int ky = 0; ky < n1; ++ky)
    for (int kx = 0; kx < n1; ++kx)
    {
      out.value[kx + n1 * ky] = px[kx] * py[ky];
      out.ddx[kx + n1 * ky] = dpx[kx] * py[ky];
      out.ddy[kx + n1 * ky] = px[kx] * dpy[ky];
    }
  return out;
}

void gauss01(int n, std::vector<double>& x, std::vector<double>& w)
{
  rte_rbm::gauss_on_interval(n, 0.0, 1.0, x, w);
}

}  // namespace

double sigma_eval(const std::vector<rte_rbm::MaterialTerm>& terms, double x, double y,
                  const VectorXd& mu)
{
  double v = 0.0;
  for (const auto& t : terms)
  {
    double chi = 0.0;
    for (const auto& [box, w] : t.boxes)
      if (x >= box.lo[0] && x <= box.hi[0] && y >= box.lo[1] && y <= box.hi[1])
        chi += w;
    const double prof = t.profile == rte_rbm::SpatialProfile::CoordX ? x : 1.0;
    v += t.theta.eval(mu) * prof * chi;
  }
  return v;
}

double source_eval(const ProblemDefinition& problem, double x, double y)
{
  double g = 0.0;
  for (const auto& s : problem.source)
  {
    if (s.kind == rte_rbm::SourceTerm::Kind::ConstantOnBox)
    {
      if (x >= s.box.lo[0] && x <= s.box.hi[0] && y >= s.box.lo[1] && y <= s.box.hi[1])
        g += s.value;
    }
    else
    {
      const double dx = x - s.center[0];
      const double dy = problem.dim_x == 2 ? y - s.center[1] : 0.0;
      g += s.value * std::exp(-s.alpha * (dx * dx + dy * dy));
    }
  }
  return g;
}

MatrixXd dense_assembly(const FomSystem& sys, const VectorXd& mu)
{
  const auto& mesh = sys.mesh;
  const auto& quad = sys.quad;
  const int nsp = sys.n_dof_x();
  const int nloc = sys.space->nloc();
  const int nd = quad.size();
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  const double hx = mesh.h(0);
  const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
  const Eigen::Index n = static_cast<Eigen::Index>(nd) * nsp;
  MatrixXd A = MatrixXd::Zero(n, n);

  std::vector<double> qx, qw;
  gauss01(sys.space->degree() + 3, qx, qw);

  for (int j = 0; j < nd; ++j)
  {
    const double vx = quad.nodes[j][0];
    const double vy = mesh.dim_x == 2 ? quad.nodes[j][1] : 0.0;
    const Eigen::Index off = static_cast<Eigen::Index>(j) * nsp;

    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
      {
        const int e = ix + nx * iy;
        const int nqy = mesh.dim_x == 2 ? static_cast<int>(qx.size()) : 1;
        for (std::size_t a = 0; a < qx.size(); ++a)
          for (int b = 0; b < nqy; ++b)
          {
            const double x = mesh.lo[0] + (ix + qx[a]) * hx;
            const double y = mesh.dim_x == 2 ? mesh.lo[1] + (iy + qx[b]) * hy : 0.5;
            const double wq = qw[a] * hx * (mesh.dim_x == 2 ? qw[b] * hy : 1.0);
            BasisPoint bp = basis_at(sys, e, x, y);
            const double st = sigma_eval(sys.problem.scattering, x, y, mu) +
                              sigma_eval(sys.problem.absorption, x, y, mu);
            for (int k = 0; k < nloc; ++k)
              for (int l = 0; l < nloc; ++l)
                A(off + e * nloc + k, off + e * nloc + l) +=
                    wq * (-(vx * bp.ddx[k] + vy * bp.ddy[k]) * bp.value[l] +
                          st * bp.value[k] * bp.value[l]);
          }
      }

    // Faces normal to an axis; upwind trace on interior faces, outflow terms
    // on the domain boundary.
    for (int axis = 0; axis < mesh.dim_x; ++axis)
    {
      const double vn_axis = axis == 0 ? vx : vy;
      const int n_across = axis == 0 ? nx : ny;
      const int n_along = mesh.dim_x == 2 ? (axis == 0 ? ny : nx) : 1;
      const int nq_face = mesh.dim_x == 2 ? static_cast<int>(qx.size()) : 1;
      for (int face = 0; face <= n_across; ++face)
        for (int t = 0; t < n_along; ++t)
          for (int q = 0; q < nq_face; ++q)
          {
            double x, y, wq;
            if (mesh.dim_x == 1)
            {
              x = mesh.lo[0] + face * hx;
              y = 0.5;
              wq = 1.0;
            }
            else if (axis == 0)
            {
              x = mesh.lo[0] + face * hx;
              y = mesh.lo[1] + (t + qx[q]) * hy;
              wq = qw[q] * hy;
            }
            else
            {
              x = mesh.lo[0] + (t + qx[q]) * hx;
              y = mesh.lo[1] + face * hy;
              wq = qw[q] * hx;
            }
            auto elem = [&](int slot) {
              // element on the low (slot 0) / high (slot 1) side of the face
              int i = face - 1 + slot;
              if (i < 0 || i >= n_across)
                return -1;
              return axis == 0 ? i + nx * t : t + nx * i;
            };
            const int lo_e = elem(0), hi_e = elem(1);
            if (lo_e < 0 || hi_e < 0)
            {
              // Domain boundary: outflow face contributes v.n phi_k phi_l.
              const int e = lo_e >= 0 ? lo_e : hi_e;
              const double nrm = lo_e >= 0 ? 1.0 : -1.0;  // outward normal
              const double vn = vn_axis * nrm;
              if (vn >= 0.0)
              {
                BasisPoint bp = basis_at(sys, e, x, y);
                for (int k = 0; k < nloc; ++k)
                  for (int l = 0; l < nloc; ++l)
                    A(off + e * nloc + k, off + e * nloc + l) +=
                        wq * vn * bp.value[k] * bp.value[l];
              }
              continue;
            }
            // Interior face: T is the downwind element, Tp the upwind one.
            const int T = vn_axis >= 0.0 ? hi_e : lo_e;
            const int Tp = vn_axis >= 0.0 ? lo_e : hi_e;
            const double vn_T = -std::abs(vn_axis);  // v . n_{e,T}, inflow for T
            BasisPoint bpT = basis_at(sys, T, x, y);
            BasisPoint bpTp = basis_at(sys, Tp, x, y);
            for (int k = 0; k < nloc; ++k)
              for (int l = 0; l < nloc; ++l)
              {
                A(off + Tp * nloc + k, off + Tp * nloc + l) -=
                    wq * vn_T * bpTp.value[k] * bpTp.value[l];
                A(off + T * nloc + k, off + Tp * nloc + l) +=
                    wq * vn_T * bpT.value[k] * bpTp.value[l];
              }
          }
    }
  }

  // Angular scattering coupling: -w_{j'} sigma_s mass block on every column
  // direction j'.
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      const int nqy = mesh.dim_x == 2 ? static_cast<int>(qx.size()) : 1;
      MatrixXd smass = MatrixXd::Zero(nloc, nloc);
      for (std::size_t a = 0; a < qx.size(); ++a)
        for (int b = 0; b < nqy; ++b)
        {
          const double x = mesh.lo[0] + (ix + qx[a]) * hx;
          const double y = mesh.dim_x == 2 ? mesh.lo[1] + (iy + qx[b]) * hy : 0.5;
          const double wq = qw[a] * hx * (mesh.dim_x == 2 ? qw[b] * hy : 1.0);
          BasisPoint bp = basis_at(sys, e, x, y);
          const double ss = sigma_eval(sys.problem.scattering, x, y, mu);
          smass += wq * ss * (bp.value * bp.value.transpose());
        }
      for (int j = 0; j < nd; ++j)
        for (int jp = 0; jp < nd; ++jp)
          A.block(static_cast<Eigen::Index>(j) * nsp + e * nloc,
                  static_cast<Eigen::Index>(jp) * nsp + e * nloc, nloc, nloc) -=
              quad.weights[jp] * smass;
    }
  return A;
}

VectorXd dense_rhs(const FomSystem& sys, const VectorXd& mu)
{
  (void)mu;
  const auto& mesh = sys.mesh;
  const auto& quad = sys.quad;
  const int nsp = sys.n_dof_x();
  const int nloc = sys.space->nloc();
  const int nd = quad.size();
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  const double hx = mesh.h(0);
  const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
  VectorXd b = VectorXd::Zero(static_cast<Eigen::Index>(nd) * nsp);

  std::vector<double> qx, qw;
  gauss01(sys.space->degree() + 6, qx, qw);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      const int nqy = mesh.dim_x == 2 ? static_cast<int>(qx.size()) : 1;
      VectorXd load = VectorXd::Zero(nloc);
      for (std::size_t a = 0; a < qx.size(); ++a)
        for (int bq = 0; bq < nqy; ++bq)
        {
          const double x = mesh.lo[0] + (ix + qx[a]) * hx;
          const double y = mesh.dim_x == 2 ? mesh.lo[1] + (iy + qx[bq]) * hy : 0.5;
          const double wq = qw[a] * hx * (mesh.dim_x == 2 ? qw[bq] * hy : 1.0);
          BasisPoint bp = basis_at(sys, e, x, y);
          load += wq * source_eval(sys.problem, x, y) * bp.value;
        }
      for (int j = 0; j < nd; ++j)
        b.segment(static_cast<Eigen::Index>(j) * nsp + e * nloc, nloc) += load;
    }

  if (mesh.dim_x == 1)
  {
    for (int j = 0; j < nd; ++j)
    {
      const double v = quad.nodes[j][0];
      if (v > 0.0 && sys.problem.inflow_left != 0.0)
      {
        BasisPoint bp = basis_at(sys, 0, mesh.lo[0], 0.5);
        b.segment(static_cast<Eigen::Index>(j) * nsp, nloc) +=
            sys.problem.inflow_left * v * bp.value;
      }
      if (v < 0.0 && sys.problem.inflow_right != 0.0)
      {
        BasisPoint bp = basis_at(sys, nx - 1, mesh.hi[0], 0.5);
        b.segment(static_cast<Eigen::Index>(j) * nsp + (nx - 1) * nloc, nloc) +=
            sys.problem.inflow_right * (-v) * bp.value;
      }
    }
  }
  return b;
}

double function_norm_oracle(const FomSystem& sys, const VectorXd& g)
{
  const auto& mesh = sys.mesh;
  const int nsp = sys.n_dof_x();
  const int nloc = sys.space->nloc();
  const int nx = mesh.cells[0];
  const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
  const double hx = mesh.h(0);
  const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
  std::vector<double> qx, qw;
  gauss01(sys.space->degree() + 2, qx, qw);
  double total = 0.0;
  for (int j = 0; j < sys.quad.size(); ++j)
  {
    double l2sq = 0.0;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
      {
        const int e = ix + nx * iy;
        auto coeffs = g.segment(static_cast<Eigen::Index>(j) * nsp + e * nloc, nloc);
        const int nqy = mesh.dim_x == 2 ? static_cast<int>(qx.size()) : 1;
        for (std::size_t a = 0; a < qx.size(); ++a)
          for (int b = 0; b < nqy; ++b)
          {
            const double x = mesh.lo[0] + (ix + qx[a]) * hx;
            const double y = mesh.dim_x == 2 ? mesh.lo[1] + (iy + qx[b]) * hy : 0.5;
            const double wq = qw[a] * hx * (mesh.dim_x == 2 ? qw[b] * hy : 1.0);
            const double val = coeffs.dot(basis_at(sys, e, x, y).value);
            l2sq += wq * val * val;
          }
      }
    total += sys.quad.weights[j] * l2sq;
  }
  return std::sqrt(total);
}

NodalSystem1d assemble_nodal_1d(const FomSystem& sys, const VectorXd& mu)
{
  const auto& mesh = sys.mesh;
  const auto& quad = sys.quad;
  const int nx = mesh.cells[0];
  const int nv = quad.size();
  const double h = mesh.h(0);
  const int nsp = 2 * nx;
  NodalSystem1d out;
  out.h = h;
  out.nx = nx;
  out.nv = nv;
  out.weights = quad.weights;
  out.A = MatrixXd::Zero(nsp * nv, nsp * nv);
  out.b = VectorXd::Zero(nsp * nv);

  std::vector<double> qx, qw;
  gauss01(4, qx, qw);
  auto hat = [&](int i, double t) { return i == 0 ? 1.0 - t : t; };     // t in [0,1]
  auto dhat = [&](int i) { return (i == 0 ? -1.0 : 1.0) / h; };

  for (int j = 0; j < nv; ++j)
  {
    const double v = quad.nodes[j][0];
    const Eigen::Index off = static_cast<Eigen::Index>(j) * nsp;
    for (int e = 0; e < nx; ++e)
    {
      for (std::size_t a = 0; a < qx.size(); ++a)
      {
        const double x = mesh.lo[0] + (e + qx[a]) * h;
        const double wq = qw[a] * h;
        const double st = sigma_eval(sys.problem.scattering, x, 0.5, mu) +
                          sigma_eval(sys.problem.absorption, x, 0.5, mu);
        const double ss = sigma_eval(sys.problem.scattering, x, 0.5, mu);
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
          {
            out.A(off + 2 * e + k, off + 2 * e + l) +=
                wq * (-v * dhat(k) * hat(l, qx[a]) + st * hat(k, qx[a]) * hat(l, qx[a]));
            for (int jp = 0; jp < nv; ++jp)
              out.A(off + 2 * e + k, static_cast<Eigen::Index>(jp) * nsp + 2 * e + l) -=
                  quad.weights[jp] * wq * ss * hat(k, qx[a]) * hat(l, qx[a]);
          }
        out.b.segment(off + 2 * e, 2) +=
            wq * source_eval(sys.problem, x, 0.5) *
            Eigen::Vector2d(hat(0, qx[a]), hat(1, qx[a]));
      }
      // upwind faces
      if (v >= 0.0)
      {
        // outflow at the right end of e (interior or domain boundary)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            out.A(off + 2 * e + k, off + 2 * e + l) += v * hat(k, 1.0) * hat(l, 1.0);
        if (e > 0)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              out.A(off + 2 * e + k, off + 2 * (e - 1) + l) -=
                  v * hat(k, 0.0) * hat(l, 1.0);
      }
      else
      {
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            out.A(off + 2 * e + k, off + 2 * e + l) += (-v) * hat(k, 0.0) * hat(l, 0.0);
        if (e < nx - 1)
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              out.A(off + 2 * e + k, off + 2 * (e + 1) + l) -=
                  (-v) * hat(k, 1.0) * hat(l, 0.0);
      }
    }
    if (v > 0.0 && sys.problem.inflow_left != 0.0)
      for (int k = 0; k < 2; ++k)
        out.b[off + k] += sys.problem.inflow_left * v * hat(k, 0.0);
    if (v < 0.0 && sys.problem.inflow_right != 0.0)
      for (int k = 0; k < 2; ++k)
        out.b[off + 2 * (nx - 1) + k] += sys.problem.inflow_right * (-v) * hat(k, 1.0);
  }
  return out;
}

double NodalSystem1d::residual_norm(const VectorXd& g_nodal) const
{
  VectorXd r = A * g_nodal - b;
  Eigen::Matrix2d M;
  M << 2.0, 1.0, 1.0, 2.0;
  M *= h / 6.0;
  Eigen::Matrix2d Minv = M.inverse();
  double total = 0.0;
  for (int j = 0; j < nv; ++j)
    for (int e = 0; e < nx; ++e)
    {
      Eigen::Vector2d re = r.segment(static_cast<Eigen::Index>(j) * 2 * nx + 2 * e, 2);
      total += weights[j] * re.dot(Minv * re);
    }
  return std::sqrt(total);
}

VectorXd to_nodal_coords(const FomSystem& sys, const VectorXd& g)
{
  const auto& mesh = sys.mesh;
  const int nx = mesh.cells[0];
  const int nv = sys.quad.size();
  const int nloc = sys.space->nloc();
  VectorXd out(static_cast<Eigen::Index>(nv) * 2 * nx);
  for (int j = 0; j < nv; ++j)
    for (int e = 0; e < nx; ++e)
    {
      auto coeffs = g.segment(static_cast<Eigen::Index>(j) * nloc * nx + e * nloc, nloc);
      const double xl = mesh.lo[0] + e * mesh.h(0);
      const double xr = xl + mesh.h(0);
      out[static_cast<Eigen::Index>(j) * 2 * nx + 2 * e] =
          coeffs.dot(basis_at(sys, e, xl, 0.5).value);
      out[static_cast<Eigen::Index>(j) * 2 * nx + 2 * e + 1] =
          coeffs.dot(basis_at(sys, e, xr, 0.5).value);
    }
  return out;
}

MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  MatrixXd m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      m(r, c) = dist(gen);
  return m;
}

VectorXd random_vector(Eigen::Index n, std::uint64_t seed)
{
  return random_matrix(n, 1, seed).col(0);
}

MatrixXd random_orthonormal(Eigen::Index n, Eigen::Index m, std::uint64_t seed)
{
  Eigen::HouseholderQR<MatrixXd> qr(random_matrix(n, m, seed));
  return qr.householderQ() * MatrixXd::Identity(n, m);
}

ProblemDefinition constant_slab_1d(double sigma_s, double sigma_a, double g_left,
                                   double source)
{
  ProblemDefinition p;
  p.name = "constant-slab";
  p.dim_x = 1;
  p.domain = rte_rbm::Box{{0.0, 0.0}, {1.0, 1.0}};
  if (sigma_s != 0.0)
    p.scattering.push_back({rte_rbm::AffineTheta::constant(sigma_s, 1),
                            rte_rbm::SpatialProfile::One,
                            {{p.domain, 1.0}}});
  if (sigma_a != 0.0)
    p.absorption.push_back({rte_rbm::AffineTheta::constant(sigma_a, 1),
                            rte_rbm::SpatialProfile::One,
                            {{p.domain, 1.0}}});
  if (source != 0.0)
    p.source.push_back({rte_rbm::SourceTerm::Kind::ConstantOnBox, p.domain, source, {}, 0.0});
  p.inflow_left = g_left;
  p.p_lo = VectorXd::Constant(1, 0.0);
  p.p_hi = VectorXd::Constant(1, 1.0);
  p.p_names = {"unused"};
  p.paper = {16, 1, {4, 0, 0}, 1};
  p.quick = p.paper;
  p.train_grid = {3, 1};
  p.test_count = 3;
  p.fom_kind = rte_rbm::FomKind::Direct;
  return p;
}

}  // namespace test_support
