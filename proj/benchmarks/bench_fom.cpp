// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <random>

#include "rte_rbm/fom_solver.hpp"
#include "rte_rbm/reduced_linalg.hpp"

using namespace rte_rbm;

namespace {

void BM_transport_sweep(benchmark::State& state)
{
  ProblemDefinition p = find_problem("lattice-2d");
  Discretization d{21, 21, {0, static_cast<int>(state.range(0)), 2}, 1};
  FomSystem sys = build_fom_system(p, d);
  Eigen::VectorXd mu(2);
  mu << 1.0, 10.0;
  MaterialState mat = evaluate_materials(sys, mu);
  Eigen::VectorXd b = sys.b_mu(mu);
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(sys.n_dof_x());
  Eigen::VectorXd f(sys.n());
  for (auto _ : state)
  {
    transport_sweep(sys, mat, rho, b, f, 1);
    benchmark::DoNotOptimize(f);
  }
  state.SetItemsProcessed(state.iterations() * sys.n());
}
BENCHMARK(BM_transport_sweep)->Arg(8)->Arg(16)->Arg(32);

void BM_si_dsa_solve(benchmark::State& state)
{
  ProblemDefinition p = find_problem("lattice-2d");
  FomSystem sys = build_fom_system(p, p.quick);
  Eigen::VectorXd mu(2);
  mu << 1.0, 10.0;
  SiConfig cfg;
  cfg.tol = 1e-12;
  cfg.threads = 1;
  for (auto _ : state)
  {
    FomSolution sol = solve_si_dsa(sys, mu, cfg);
    benchmark::DoNotOptimize(sol.rho);
  }
}
BENCHMARK(BM_si_dsa_solve);

void BM_cgsr_append(benchmark::State& state)
{
  const Eigen::Index n = state.range(0);
  std::mt19937_64 gen(1);
  std::normal_distribution<double> dist;
  for (auto _ : state)
  {
    state.PauseTiming();
    SnapshotBasis basis;
    Eigen::MatrixXd cols(n, 20);
    for (Eigen::Index c = 0; c < cols.cols(); ++c)
      for (Eigen::Index r = 0; r < n; ++r)
        cols(r, c) = dist(gen);
    state.ResumeTiming();
    for (Eigen::Index c = 0; c < cols.cols(); ++c)
      basis.append(cols.col(c), Eigen::VectorXd::Zero(1));
    benchmark::DoNotOptimize(basis);
  }
}
BENCHMARK(BM_cgsr_append)->Arg(10000)->Arg(100000);

}  // namespace
