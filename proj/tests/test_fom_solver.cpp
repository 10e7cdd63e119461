// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/SparseLU>

#include "rte_rbm/fom_solver.hpp"
#include "support/test_helpers.hpp"

using namespace rte_rbm;
namespace ts = test_support;

TEST_CASE("pure absorption: one sweep solves the system")
{
  ProblemDefinition p = ts::constant_slab_1d(0.0, 2.0, 1.0, 0.0);
  Discretization d{16, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  SiConfig cfg;
  FomSolution sol = solve_si(sys, Eigen::VectorXd::Zero(1), cfg);
  CHECK(sol.converged);
  CHECK(sol.iterations == 1);
  CHECK(sol.residual_mh < 1e-12);
  FomSolution dsa = solve_si_dsa(sys, Eigen::VectorXd::Zero(1), cfg);
  CHECK(dsa.iterations == 1);
  CHECK((dsa.f - sol.f).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("sweep equals the direct per-direction solve")
{
  ProblemDefinition p = find_problem("two-material-1d");
  Discretization d{16, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu(2);
  mu << 95.0, 1.5;
  MaterialState mat = evaluate_materials(sys, mu);
  Eigen::VectorXd b = sys.b_mu(mu);
  Eigen::VectorXd rho = ts::random_vector(sys.n_dof_x(), 4);
  Eigen::VectorXd f(sys.n());
  transport_sweep(sys, mat, rho, b, f);

  // Reference: dense solve of (D_j + Sigma_t) f_j = Sigma_s rho + b_j.
  const int nsp = sys.n_dof_x();
  Eigen::VectorXd srho(nsp);
  mat.sigma_s_blocks.apply(rho, srho);
  for (int j = 0; j < sys.quad.size(); ++j)
  {
    std::vector<Triplet> trips;
    sys.ops.transport.append_triplets(sys.mesh, j, 0, trips);
    mat.sigma_t_blocks.append_triplets(1.0, 0, 0, trips);
    Eigen::SparseMatrix<double> Aj(nsp, nsp);
    Aj.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(Aj);
    Eigen::VectorXd fj =
        lu.solve(Eigen::VectorXd(srho + b.segment(static_cast<Eigen::Index>(j) * nsp, nsp)));
    CHECK((f.segment(static_cast<Eigen::Index>(j) * nsp, nsp) - fj).cwiseAbs().maxCoeff() <
          1e-12 * (fj.cwiseAbs().maxCoeff() + 1.0));
  }
}

TEST_CASE("manufactured pure-absorption solution converges at second order")
{
  // Exact angular flux exp(-2 x / v) for v > 0 with unit left inflow.
  std::vector<double> errs;
  for (int nx : {8, 16, 32, 64})
  {
    ProblemDefinition p = ts::constant_slab_1d(0.0, 2.0, 1.0, 0.0);
    Discretization d{nx, 1, {4, 0, 0}, 1};
    FomSystem sys = build_fom_system(p, d);
    FomSolution sol = solve_si(sys, Eigen::VectorXd::Zero(1), SiConfig{});
    // L2 error by quadrature against the exact solution.
    std::vector<double> qx, qw;
    gauss_on_interval(4, 0.0, 1.0, qx, qw);
    double err2 = 0.0;
    const int nloc = sys.space->nloc();
    for (int j = 0; j < sys.quad.size(); ++j)
    {
      const double v = sys.quad.nodes[j][0];
      double l2 = 0.0;
      for (int e = 0; e < nx; ++e)
        for (std::size_t q = 0; q < qx.size(); ++q)
        {
          const double x = (e + qx[q]) * sys.mesh.h(0);
          const double exact = v > 0.0 ? std::exp(-2.0 * x / v) : 0.0;
          const double val = sys.space->eval_function(
              sol.f.segment(static_cast<Eigen::Index>(j) * sys.n_dof_x() + e * nloc, nloc),
              e, x, 0.5);
          l2 += qw[q] * sys.mesh.h(0) * (val - exact) * (val - exact);
        }
      err2 += sys.quad.weights[j] * l2;
    }
    errs.push_back(std::sqrt(err2));
  }
  for (std::size_t i = 1; i < errs.size(); ++i)
  {
    const double rate = std::log2(errs[i - 1] / errs[i]);
    CHECK(rate >= 1.8);
  }
}

TEST_CASE("source iteration matches the direct sparse solve")
{
  ProblemDefinition p = find_problem("homogeneous-1d");
  Discretization d{16, 1, {8, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu(2);
  mu << 1.0, 5.0;
  SiConfig cfg;
  cfg.tol = 1e-12;
  FomSolution si = solve_si(sys, mu, cfg);
  FomSolution direct = solve_direct(sys, mu);
  CHECK(si.converged);
  CHECK(sys.norm_h(si.f - direct.f) < 1e-10 * sys.norm_h(direct.f));
  CHECK(direct.residual_mh < 1e-11 * sys.norm_h(sys.b_mu(mu)));
}

TEST_CASE("direct solve of b = 0 gives f = 0")
{
  ProblemDefinition p = ts::constant_slab_1d(0.5, 0.5, 0.0, 0.0);
  Discretization d{8, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  FomSolution sol = solve_direct(sys, Eigen::VectorXd::Zero(1));
  CHECK(sol.f.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("DSA accelerates scattering-dominated source iteration")
{
  ProblemDefinition p = ts::constant_slab_1d(99.0, 1.0, 1.0, 0.0);
  Discretization d{32, 1, {8, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  SiConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iterations = 100000;
  FomSolution plain = solve_si(sys, Eigen::VectorXd::Zero(1), cfg);
  FomSolution dsa = solve_si_dsa(sys, Eigen::VectorXd::Zero(1), cfg);
  CHECK(plain.converged);
  CHECK(dsa.converged);
  CHECK(dsa.iterations < plain.iterations);
  // Plain SI stops ~tol/(1 - rho_iter) from the limit; in this diffusive
  // regime that inflates the iterate gap by roughly the optical depth
  // squared, so only a rate-aware agreement can be asserted.
  CHECK(sys.norm_h(dsa.f - plain.f) < 1e-6 * sys.norm_h(plain.f));
}

TEST_CASE("SI and SI-DSA share the fixed point on the two-material problem")
{
  ProblemDefinition p = find_problem("two-material-1d");
  Discretization d{16, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu(2);
  mu << 90.0, 2.0;
  SiConfig cfg;
  cfg.tol = 1e-12;
  FomSolution dsa = solve_si_dsa(sys, mu, cfg);
  REQUIRE(dsa.converged);

  // Fixed-point equality: one plain-SI step applied to the converged SI-DSA
  // density must reproduce it to within the stopping tolerance. (Running
  // plain SI to the same tolerance is not comparable here: its iterate
  // stalls ~tol/(1 - rho_iter) away from the limit, and 1 - rho_iter is
  // O(1/optical-depth^2) on this diffusive problem.)
  MaterialState mat = evaluate_materials(sys, mu);
  Eigen::VectorXd b = sys.b_mu(mu);
  Eigen::VectorXd f_step(sys.n());
  transport_sweep(sys, mat, dsa.rho, b, f_step);
  CHECK((sys.moments(f_step) - dsa.rho).lpNorm<Eigen::Infinity>() < 10.0 * cfg.tol);
}

TEST_CASE("converged solves satisfy the reported residual bound")
{
  ProblemDefinition p = find_problem("lattice-2d");
  FomSystem sys = build_fom_system(p, p.quick);
  Eigen::VectorXd mu(2);
  mu << 1.0, 10.0;
  SiConfig cfg;
  cfg.tol = 1e-12;
  FomSolution sol = solve_si_dsa(sys, mu, cfg);
  CHECK(sol.converged);
  CHECK(sol.residual_mh < 1e-8);
  CHECK(sol.final_change < 1e-12);
}

TEST_CASE("scalar flux stays positive at element means for benchmark data")
{
  for (const char* name : {"homogeneous-1d", "two-material-1d"})
  {
    ProblemDefinition p = find_problem(name);
    Discretization d{40, 1, {8, 0, 0}, 1};
    FomSystem sys = build_fom_system(p, d);
    Eigen::VectorXd mu = 0.5 * (p.p_lo + p.p_hi);
    FomSolution sol = solve_direct(sys, mu);
    const int nloc = sys.space->nloc();
    for (int e = 0; e < sys.mesh.num_elements(); ++e)
      CHECK(sol.rho[e * nloc] >= -1e-10);  // mean component of the orthonormal basis
  }
  // Unlimited DG discrete ordinates undershoots near strong absorbers (the
  // lattice corners are the classic case), so the 2D problems are held to a
  // relative undershoot bound instead of the roundoff-level one.
  for (const char* name : {"lattice-2d", "pin-cell-2d"})
  {
    ProblemDefinition p = find_problem(name);
    FomSystem sys = build_fom_system(p, p.quick);
    Eigen::VectorXd mu = 0.5 * (p.p_lo + p.p_hi);
    SiConfig cfg;
    cfg.tol = p.tol_si;
    FomSolution sol = solve_si_dsa(sys, mu, cfg);
    REQUIRE(sol.converged);
    const int nloc = sys.space->nloc();
    double min_mean = 0.0, max_mean = 0.0;
    for (int e = 0; e < sys.mesh.num_elements(); ++e)
    {
      min_mean = std::min(min_mean, sol.rho[e * nloc]);
      max_mean = std::max(max_mean, sol.rho[e * nloc]);
    }
    CHECK(min_mean >= -0.01 * max_mean);
  }
}

TEST_CASE("DSA never increases the iteration count on scattering problems")
{
  ProblemDefinition p = find_problem("homogeneous-1d");
  Discretization d{20, 1, {8, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  for (double ms : {1.0, 2.0})
  {
    Eigen::VectorXd mu(2);
    mu << ms, 5.0;
    SiConfig cfg;
    cfg.tol = 1e-12;
    FomSolution plain = solve_si(sys, mu, cfg);
    FomSolution dsa = solve_si_dsa(sys, mu, cfg);
    REQUIRE(plain.converged);
    REQUIRE(dsa.converged);
    CHECK(dsa.iterations <= plain.iterations);
  }
}

TEST_CASE("apply rejects mismatched coordinate vectors")
{
  ProblemDefinition p = find_problem("homogeneous-1d");
  Discretization d{8, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu = 0.5 * (p.p_lo + p.p_hi);
  Eigen::VectorXd wrong = Eigen::VectorXd::Zero(sys.n() - 1);
  CHECK_THROWS_AS(sys.ops.apply(sys.theta_A(mu), wrong), std::invalid_argument);
}

TEST_CASE("DSA rejects vanishing total cross sections")
{
  ProblemDefinition p = ts::constant_slab_1d(1.0, 0.0, 0.0, 1.0);
  p.scattering[0].boxes[0].first.hi[0] = 0.5;  // sigma_t = 0 on half the slab
  Discretization d{8, 1, {4, 0, 0}, 1};
  FomSystem sys = build_fom_system(p, d);
  SiConfig cfg;
  CHECK_THROWS_AS(solve_si_dsa(sys, Eigen::VectorXd::Zero(1), cfg), std::runtime_error);
}

TEST_CASE("2D SI-DSA matches a dense direct solve on a tiny lattice")
{
  ProblemDefinition p = find_problem("lattice-2d");
  Discretization d{7, 7, {0, 4, 1}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu(2);
  mu << 1.2, 9.0;
  SiConfig cfg;
  cfg.tol = 1e-13;
  FomSolution sol = solve_si_dsa(sys, mu, cfg);
  REQUIRE(sol.converged);
  Eigen::MatrixXd Ad = ts::dense_assembly(sys, mu);
  Eigen::VectorXd f = Ad.partialPivLu().solve(sys.b_mu(mu));
  CHECK(sys.norm_h(sol.f - f) < 1e-9 * sys.norm_h(f));
}
