// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <map>

#include "rte_rbm/fom_solver.hpp"
#include "rte_rbm/greedy.hpp"

using namespace rte_rbm;

namespace {

struct TrainedRom
{
  std::shared_ptr<FomSystem> sys;
  GreedyState state;
};

// One trained instance per (projection, m), shared across benchmark runs.
const TrainedRom& trained(ProjectionKind proj, int m)
{
  static std::map<std::pair<int, int>, TrainedRom> cache;
  auto key = std::make_pair(static_cast<int>(proj), m);
  auto it = cache.find(key);
  if (it == cache.end())
  {
    ProblemDefinition p = find_problem("homogeneous-1d");
    TrainedRom t;
    t.sys = std::make_shared<FomSystem>(build_fom_system(p, p.paper));
    GreedyConfig cfg;
    cfg.projection = proj;
    cfg.indicator = IndicatorKind::Residual;
    cfg.train = p.training_set();
    cfg.tol_sratio = 1e-300;
    cfg.max_m = m;
    auto& sys = *t.sys;
    t.state = train_greedy(sys, cfg,
                           [&sys](const Eigen::VectorXd& mu) { return solve_direct(sys, mu).f; });
    it = cache.emplace(key, std::move(t)).first;
  }
  return it->second;
}

void BM_galerkin_online(benchmark::State& state)
{
  const TrainedRom& t = trained(ProjectionKind::Galerkin, static_cast<int>(state.range(0)));
  Eigen::VectorXd mu(2);
  mu << 1.3, 5.7;
  const Eigen::VectorXd thA = t.sys->theta_A(mu);
  const Eigen::VectorXd thb = t.sys->theta_b(mu);
  for (auto _ : state)
  {
    Eigen::VectorXd c = galerkin_online(t.state.galerkin, thA, thb);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_galerkin_online)->Arg(5)->Arg(10)->Arg(13);

void BM_lspg_online(benchmark::State& state)
{
  const TrainedRom& t = trained(ProjectionKind::Lspg, static_cast<int>(state.range(0)));
  Eigen::VectorXd mu(2);
  mu << 1.3, 5.7;
  const Eigen::VectorXd thA = t.sys->theta_A(mu);
  const Eigen::VectorXd thb = t.sys->theta_b(mu);
  for (auto _ : state)
  {
    LspgSolve s = lspg_online(t.state.lspg, thA, thb);
    benchmark::DoNotOptimize(s.c);
  }
}
BENCHMARK(BM_lspg_online)->Arg(5)->Arg(10)->Arg(13);

void BM_residual_indicator(benchmark::State& state)
{
  const TrainedRom& t = trained(ProjectionKind::Lspg, static_cast<int>(state.range(0)));
  Eigen::VectorXd mu(2);
  mu << 1.3, 5.7;
  const Eigen::VectorXd thA = t.sys->theta_A(mu);
  const Eigen::VectorXd thb = t.sys->theta_b(mu);
  const Eigen::VectorXd c = lspg_online(t.state.lspg, thA, thb).c;
  for (auto _ : state)
  {
    double r = residual_norm_alg5(t.state.lspg, thA, thb, c);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_residual_indicator)->Arg(5)->Arg(10)->Arg(13);

void BM_l1_indicator(benchmark::State& state)
{
  const TrainedRom& t = trained(ProjectionKind::Galerkin, static_cast<int>(state.range(0)));
  Eigen::VectorXd mu(2);
  mu << 1.3, 5.7;
  const Eigen::VectorXd c =
      galerkin_online(t.state.galerkin, t.sys->theta_A(mu), t.sys->theta_b(mu));
  for (auto _ : state)
  {
    double v = indicator_l1(t.state.basis, c);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_l1_indicator)->Arg(5)->Arg(10)->Arg(13);

}  // namespace

BENCHMARK_MAIN();
