// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/fom_solver.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "rte_rbm/parallel.hpp"

namespace rte_rbm {

namespace {

constexpr int kMaxLoc = 16;

// In-place Gaussian elimination with partial pivoting for the element-local
// systems (nloc <= 16). Throws on a singular block (sigma_t <= 0 pathology).
void small_solve(int n, double* a, double* x)
{
  for (int c = 0; c < n; ++c)
  {
    int p = c;
    double best = std::abs(a[c * n + c]);
    for (int r = c + 1; r < n; ++r)
    {
      double v = std::abs(a[r * n + c]);
      if (v > best)
      {
        best = v;
        p = r;
      }
    }
    if (best < 1e-300)
      throw std::runtime_error("transport sweep: singular element-local block");
    if (p != c)
    {
      for (int k = 0; k < n; ++k)
        std::swap(a[p * n + k], a[c * n + k]);
      std::swap(x[p], x[c]);
    }
    const double inv = 1.0 / a[c * n + c];
    for (int r = c + 1; r < n; ++r)
    {
      const double f = a[r * n + c] * inv;
      if (f != 0.0)
      {
        for (int k = c + 1; k < n; ++k)
          a[r * n + k] -= f * a[c * n + k];
        x[r] -= f * x[c];
      }
    }
  }
  for (int c = n - 1; c >= 0; --c)
  {
    double s = x[c];
    for (int k = c + 1; k < n; ++k)
      s -= a[c * n + k] * x[k];
    x[c] = s / a[c * n + c];
  }
}

// Q1 (P1 in 1D) finite-element diffusion correction with homogeneous
// Dirichlet boundary conditions:
//   -div( (3 sigma_t)^{-1} grad drho ) + sigma_a drho = sigma_s diff.
// Coefficients are element means; the factorization is reused across SI
// iterations at a fixed parameter.
class DsaSolver
{
public:
  DsaSolver(const FomSystem& sys, const MaterialState& mat) : sys_(sys), mat_(mat)
  {
    const SpatialMesh& mesh = sys.mesh;
    for (int e = 0; e < mesh.num_elements(); ++e)
      if (mat.sigma_t_mean[e] <= 0.0)
        throw std::runtime_error("SI-DSA: sigma_t must be positive for the diffusion system");
    if (mesh.dim_x == 1)
      build_1d();
    else
      build_2d();
  }

  Eigen::VectorXd correct(const Eigen::VectorXd& diff_dg) const
  {
    Eigen::VectorXd rhs = assemble_rhs(diff_dg);
    Eigen::VectorXd sol = ldlt_.solve(rhs);
    return project_to_dg(sol);
  }

private:
  void build_1d()
  {
    const SpatialMesh& mesh = sys_.mesh;
    const int nx = mesh.cells[0];
    const double h = mesh.h(0);
    n_interior_ = nx - 1;
    std::vector<Triplet> trips;
    auto interior = [&](int node) { return node >= 1 && node <= nx - 1 ? node - 1 : -1; };
    for (int e = 0; e < nx; ++e)
    {
      const double d = 1.0 / (3.0 * mat_.sigma_t_mean[e]);
      const double sa = mat_.sigma_a_mean[e];
      const double kloc[2][2] = {{d / h + sa * h / 3.0, -d / h + sa * h / 6.0},
                                 {-d / h + sa * h / 6.0, d / h + sa * h / 3.0}};
      const int nodes[2] = {e, e + 1};
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
        {
          int ia = interior(nodes[a]), ib = interior(nodes[b]);
          if (ia >= 0 && ib >= 0)
            trips.emplace_back(ia, ib, kloc[a][b]);
        }
    }
    factor(trips);
  }

  void build_2d()
  {
    const SpatialMesh& mesh = sys_.mesh;
    const int nx = mesh.cells[0], ny = mesh.cells[1];
    const double hx = mesh.h(0), hy = mesh.h(1);
    n_interior_ = (nx - 1) * (ny - 1);
    auto interior = [&](int ix, int iy) {
      return (ix >= 1 && ix <= nx - 1 && iy >= 1 && iy <= ny - 1)
                 ? (ix - 1) + (nx - 1) * (iy - 1)
                 : -1;
    };
    std::vector<double> gx, gw;
    gauss_on_interval(2, -1.0, 1.0, gx, gw);
    std::vector<Triplet> trips;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
      {
        const int e = ix + nx * iy;
        const double d = 1.0 / (3.0 * mat_.sigma_t_mean[e]);
        const double sa = mat_.sigma_a_mean[e];
        double kloc[4][4] = {};
        for (std::size_t qa = 0; qa < gx.size(); ++qa)
          for (std::size_t qb = 0; qb < gx.size(); ++qb)
          {
            const double xi = gx[qa], eta = gx[qb];
            const double w = gw[qa] * gw[qb] * hx * hy / 4.0;
            double Nv[4], Nx[4], Ny[4];
            shape_q1(xi, eta, hx, hy, Nv, Nx, Ny);
            for (int a = 0; a < 4; ++a)
              for (int b = 0; b < 4; ++b)
                kloc[a][b] += w * (d * (Nx[a] * Nx[b] + Ny[a] * Ny[b]) + sa * Nv[a] * Nv[b]);
          }
        const int corners[4][2] = {{ix, iy}, {ix + 1, iy}, {ix, iy + 1}, {ix + 1, iy + 1}};
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b)
          {
            int ia = interior(corners[a][0], corners[a][1]);
            int ib = interior(corners[b][0], corners[b][1]);
            if (ia >= 0 && ib >= 0)
              trips.emplace_back(ia, ib, kloc[a][b]);
          }
      }
    factor(trips);
  }

  static void shape_q1(double xi, double eta, double hx, double hy, double* n, double* dx,
                       double* dy)
  {
    const double sx[4] = {-1.0, 1.0, -1.0, 1.0};
    const double sy[4] = {-1.0, -1.0, 1.0, 1.0};
    for (int a = 0; a < 4; ++a)
    {
      n[a] = 0.25 * (1.0 + sx[a] * xi) * (1.0 + sy[a] * eta);
      dx[a] = 0.25 * sx[a] * (1.0 + sy[a] * eta) * 2.0 / hx;
      dy[a] = 0.25 * sy[a] * (1.0 + sx[a] * xi) * 2.0 / hy;
    }
  }

  void factor(const std::vector<Triplet>& trips)
  {
    Eigen::SparseMatrix<double> A(n_interior_, n_interior_);
    A.setFromTriplets(trips.begin(), trips.end());
    ldlt_.compute(A);
    if (ldlt_.info() != Eigen::Success)
      throw std::runtime_error("SI-DSA: diffusion factorization failed");
  }

  Eigen::VectorXd assemble_rhs(const Eigen::VectorXd& diff_dg) const
  {
    const SpatialMesh& mesh = sys_.mesh;
    const DgSpace& space = *sys_.space;
    const int nloc = space.nloc();
    const int nx = mesh.cells[0];
    const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_interior_);
    std::vector<double> gx, gw;
    gauss_on_interval(space.degree() + 2, -1.0, 1.0, gx, gw);
    const double hx = mesh.h(0);
    const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
      {
        const int e = ix + nx * iy;
        const double ss = mat_.sigma_s_mean[e];
        if (ss == 0.0)
          continue;
        auto coeffs = diff_dg.segment(e * nloc, nloc);
        if (mesh.dim_x == 1)
        {
          for (std::size_t q = 0; q < gx.size(); ++q)
          {
            const double x = mesh.center(0, ix) + 0.5 * hx * gx[q];
            const double w = 0.5 * hx * gw[q];
            const double val = space.eval_function(coeffs, e, x, 0.5);
            const double t = (x - (mesh.lo[0] + ix * hx)) / hx;
            if (ix >= 1)
              rhs[ix - 1] += w * ss * val * (1.0 - t);
            if (ix + 1 <= nx - 1)
              rhs[ix] += w * ss * val * t;
          }
        }
        else
        {
          for (std::size_t qa = 0; qa < gx.size(); ++qa)
            for (std::size_t qb = 0; qb < gx.size(); ++qb)
            {
              const double x = mesh.center(0, ix) + 0.5 * hx * gx[qa];
              const double y = mesh.center(1, iy) + 0.5 * hy * gx[qb];
              const double w = 0.25 * hx * hy * gw[qa] * gw[qb];
              const double val = space.eval_function(coeffs, e, x, y);
              double Nv[4], Nx_[4], Ny_[4];
              shape_q1(gx[qa], gx[qb], hx, hy, Nv, Nx_, Ny_);
              const int corners[4][2] = {
                  {ix, iy}, {ix + 1, iy}, {ix, iy + 1}, {ix + 1, iy + 1}};
              for (int a = 0; a < 4; ++a)
              {
                int cx = corners[a][0], cy = corners[a][1];
                if (cx >= 1 && cx <= nx - 1 && cy >= 1 && cy <= ny - 1)
                  rhs[(cx - 1) + (nx - 1) * (cy - 1)] += w * ss * val * Nv[a];
              }
            }
        }
      }
    return rhs;
  }

  // L2 projection of the continuous correction onto the DG space (exact,
  // since Q1 is contained in the local polynomial space for K >= 1).
  Eigen::VectorXd project_to_dg(const Eigen::VectorXd& interior_sol) const
  {
    const SpatialMesh& mesh = sys_.mesh;
    const DgSpace& space = *sys_.space;
    const int nloc = space.nloc();
    const int nx = mesh.cells[0];
    const int ny = mesh.dim_x == 2 ? mesh.cells[1] : 1;
    Eigen::VectorXd out = Eigen::VectorXd::Zero(space.n_dof_x());
    std::vector<double> gx, gw;
    gauss_on_interval(space.degree() + 2, -1.0, 1.0, gx, gw);
    const double hx = mesh.h(0);
    const double hy = mesh.dim_x == 2 ? mesh.h(1) : 1.0;
    auto nodal = [&](int ix, int iy) {
      if (mesh.dim_x == 1)
        return (ix >= 1 && ix <= nx - 1) ? interior_sol[ix - 1] : 0.0;
      return (ix >= 1 && ix <= nx - 1 && iy >= 1 && iy <= ny - 1)
                 ? interior_sol[(ix - 1) + (nx - 1) * (iy - 1)]
                 : 0.0;
    };
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix)
      {
        const int e = ix + nx * iy;
        if (mesh.dim_x == 1)
        {
          const double v0 = nodal(ix, 0), v1 = nodal(ix + 1, 0);
          for (std::size_t q = 0; q < gx.size(); ++q)
          {
            const double x = mesh.center(0, ix) + 0.5 * hx * gx[q];
            const double t = (x - (mesh.lo[0] + ix * hx)) / hx;
            const double val = v0 * (1.0 - t) + v1 * t;
            out.segment(e * nloc, nloc) +=
                (0.5 * hx * gw[q] * val) * space.eval_basis(e, x, 0.5);
          }
        }
        else
        {
          const double v[4] = {nodal(ix, iy), nodal(ix + 1, iy), nodal(ix, iy + 1),
                               nodal(ix + 1, iy + 1)};
          for (std::size_t qa = 0; qa < gx.size(); ++qa)
            for (std::size_t qb = 0; qb < gx.size(); ++qb)
            {
              double Nv[4], Nx_[4], Ny_[4];
              shape_q1(gx[qa], gx[qb], hx, hy, Nv, Nx_, Ny_);
              double val = 0.0;
              for (int a = 0; a < 4; ++a)
                val += v[a] * Nv[a];
              const double x = mesh.center(0, ix) + 0.5 * hx * gx[qa];
              const double y = mesh.center(1, iy) + 0.5 * hy * gx[qb];
              out.segment(e * nloc, nloc) +=
                  (0.25 * hx * hy * gw[qa] * gw[qb] * val) * space.eval_basis(e, x, y);
            }
        }
      }
    return out;
  }

  const FomSystem& sys_;
  const MaterialState& mat_;
  int n_interior_ = 0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

FomSolution run_si(const FomSystem& sys, const Eigen::VectorXd& mu, const SiConfig& cfg,
                   bool use_dsa)
{
  if (cfg.tol <= 0.0 || cfg.max_iterations < 1)
    throw std::invalid_argument("solve_si: invalid configuration");

  const MaterialState mat = evaluate_materials(sys, mu);
  const Eigen::VectorXd b = sys.b_mu(mu);
  const int nsp = sys.n_dof_x();

  Eigen::VectorXd rho =
      cfg.rho0.size() ? Eigen::VectorXd(cfg.rho0) : Eigen::VectorXd::Zero(nsp);
  const bool pure_absorption = mat.sigma_s_blocks.max_abs() == 0.0;

  std::unique_ptr<DsaSolver> dsa;
  if (use_dsa && !pure_absorption)
    dsa = std::make_unique<DsaSolver>(sys, mat);

  FomSolution sol;
  sol.f.resize(sys.n());
  for (int k = 1; k <= cfg.max_iterations; ++k)
  {
    transport_sweep(sys, mat, rho, b, sol.f, cfg.threads);
    Eigen::VectorXd rho_half = sys.moments(sol.f);
    sol.iterations = k;
    if (pure_absorption)
    {
      // No angular coupling: a single sweep solves the system exactly.
      rho = rho_half;
      sol.final_change = 0.0;
      sol.converged = true;
      break;
    }
    Eigen::VectorXd rho_new = rho_half;
    if (dsa)
      rho_new += dsa->correct(rho_half - rho);
    sol.final_change = (rho_new - rho).lpNorm<Eigen::Infinity>();
    rho = rho_new;
    if (sol.final_change < cfg.tol)
    {
      sol.converged = true;
      break;
    }
  }
  sol.rho = sys.moments(sol.f);
  sol.residual_mh = weighted_residual_norm(sys.ops, sys.weighting, sys.theta_A(mu), b, sol.f);
  return sol;
}

}  // namespace

void transport_sweep(const FomSystem& sys, const MaterialState& mat,
                     const Eigen::VectorXd& rho_prev, const Eigen::VectorXd& b,
                     Eigen::VectorXd& f, int threads)
{
  const SpatialMesh& mesh = sys.mesh;
  const int nsp = sys.n_dof_x();
  const int nloc = sys.space->nloc();
  const int nx = mesh.cells[0];
  const int nd = sys.quad.size();
  if (f.size() != static_cast<Eigen::Index>(nd) * nsp)
    f.resize(static_cast<Eigen::Index>(nd) * nsp);

  // Scattering source, shared across directions.
  Eigen::VectorXd srho = Eigen::VectorXd::Zero(nsp);
  if (mat.sigma_s_blocks.max_abs() != 0.0)
    mat.sigma_s_blocks.apply(rho_prev, srho);

  const TransportOperator& tr = sys.ops.transport;
  parallel_for(nd, threads, [&](std::size_t j0, std::size_t j1) {
    double m[kMaxLoc * kMaxLoc];
    double rhs[kMaxLoc];
    for (std::size_t j = j0; j < j1; ++j)
    {
      const Eigen::MatrixXd& D = tr.diag_block(static_cast<int>(j));
      const Eigen::MatrixXd& Cx = tr.coupling_x(static_cast<int>(j));
      const Eigen::MatrixXd& Cy = tr.coupling_y(static_cast<int>(j));
      const int sx = tr.upwind_step_x(static_cast<int>(j));
      const int sy = tr.upwind_step_y(static_cast<int>(j));
      double* fj = f.data() + j * nsp;
      const double* bj = b.data() + j * nsp;
      for (int e : sys.sweeps[j].order)
      {
        const int ix = e % nx;
        const int iy = e / nx;
        for (int k = 0; k < nloc; ++k)
          rhs[k] = srho[e * nloc + k] + bj[e * nloc + k];
        const int ux = ix - sx;
        if (ux >= 0 && ux < nx)
        {
          const double* fu = fj + (ux + nx * iy) * nloc;
          for (int k = 0; k < nloc; ++k)
            for (int l = 0; l < nloc; ++l)
              rhs[k] -= Cx(k, l) * fu[l];
        }
        if (mesh.dim_x == 2)
        {
          const int uy = iy - sy;
          if (uy >= 0 && uy < mesh.cells[1])
          {
            const double* fu = fj + (ix + nx * uy) * nloc;
            for (int k = 0; k < nloc; ++k)
              for (int l = 0; l < nloc; ++l)
                rhs[k] -= Cy(k, l) * fu[l];
          }
        }
        auto st = mat.sigma_t_blocks.block(e);
        for (int k = 0; k < nloc; ++k)
          for (int l = 0; l < nloc; ++l)
            m[k * nloc + l] = D(k, l) + st(k, l);
        small_solve(nloc, m, rhs);
        for (int k = 0; k < nloc; ++k)
          fj[e * nloc + k] = rhs[k];
      }
    }
  });
}

FomSolution solve_si(const FomSystem& sys, const Eigen::VectorXd& mu, const SiConfig& cfg)
{
  return run_si(sys, mu, cfg, false);
}

FomSolution solve_si_dsa(const FomSystem& sys, const Eigen::VectorXd& mu, const SiConfig& cfg)
{
  return run_si(sys, mu, cfg, true);
}

FomSolution solve_direct(const FomSystem& sys, const Eigen::VectorXd& mu)
{
  Eigen::SparseMatrix<double> A = sys.ops.assemble_sparse(sys.theta_A(mu));
  Eigen::VectorXd b = sys.b_mu(mu);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_direct: singular system matrix");
  FomSolution sol;
  sol.f = lu.solve(b);
  sol.rho = sys.moments(sol.f);
  sol.iterations = 1;
  sol.converged = true;
  sol.residual_mh = weighted_residual_norm(sys.ops, sys.weighting, sys.theta_A(mu), b, sol.f);
  return sol;
}

FomSolution solve_fom(const FomSystem& sys, const Eigen::VectorXd& mu, int threads)
{
  if (sys.problem.fom_kind == FomKind::Direct)
    return solve_direct(sys, mu);
  SiConfig cfg;
  cfg.tol = sys.problem.tol_si;
  cfg.threads = threads;
  return solve_si_dsa(sys, mu, cfg);
}

}  // namespace rte_rbm
