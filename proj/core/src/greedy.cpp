// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/greedy.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "rte_rbm/parallel.hpp"

namespace rte_rbm {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int initial_index(const GreedyConfig& cfg, const ProblemDefinition& problem)
{
  switch (cfg.mu1.kind)
  {
    case Mu1Policy::Kind::Index:
      if (cfg.mu1.index < 0 || cfg.mu1.index >= static_cast<int>(cfg.train.size()))
        throw std::invalid_argument("greedy: mu1 index out of range");
      return cfg.mu1.index;
    case Mu1Policy::Kind::Explicit:
    case Mu1Policy::Kind::Center:
    {
      Eigen::VectorXd target = cfg.mu1.kind == Mu1Policy::Kind::Explicit
                                   ? cfg.mu1.value
                                   : Eigen::VectorXd(0.5 * (problem.p_lo + problem.p_hi));
      int best = 0;
      double bestd = std::numeric_limits<double>::max();
      for (std::size_t i = 0; i < cfg.train.size(); ++i)
      {
        double d = (cfg.train[i] - target).norm();
        if (d < bestd)
        {
          bestd = d;
          best = static_cast<int>(i);
        }
      }
      return best;
    }
  }
  return 0;
}

}  // namespace

double indicator_l1(const SnapshotBasis& basis, const Eigen::VectorXd& c_reduced)
{
  Eigen::VectorXd t =
      basis.R().triangularView<Eigen::Upper>().solve(c_reduced);
  return t.lpNorm<1>();
}

double indicator_residual(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                          const Eigen::VectorXd& theta_b, const Eigen::VectorXd& c_reduced)
{
  return residual_norm_alg5(art, theta_A, theta_b, c_reduced);
}

Eigen::VectorXd GreedyState::rom_solve(const Eigen::VectorXd& mu, Eigen::VectorXd* d_out) const
{
  const Eigen::VectorXd thA = sys->theta_A(mu);
  const Eigen::VectorXd thb = sys->theta_b(mu);
  if (cfg.projection == ProjectionKind::Galerkin)
  {
    if (d_out)
      d_out->resize(0);
    return galerkin_online(galerkin, thA, thb);
  }
  LspgSolve s = lspg_online(lspg, thA, thb);
  if (d_out)
    *d_out = s.d;
  return s.c;
}

double GreedyState::indicator(const Eigen::VectorXd& mu, const Eigen::VectorXd& c,
                              const Eigen::VectorXd& d) const
{
  if (cfg.indicator == IndicatorKind::L1)
    return indicator_l1(basis, c);
  return residual_error(mu, c, d);
}

double GreedyState::residual_error(const Eigen::VectorXd& mu, const Eigen::VectorXd& c,
                                   const Eigen::VectorXd& d) const
{
  if (!has_lspg)
    return std::numeric_limits<double>::quiet_NaN();
  const Eigen::VectorXd thb = sys->theta_b(mu);
  if (lspg.mode == VariantMode::PrimeOffline)
    return residual_norm_variant1(lspg, thb, d).value;
  return residual_norm_alg5(lspg, sys->theta_A(mu), thb, c);
}

GreedyState train_greedy(const FomSystem& sys, const GreedyConfig& cfg, const FomOracle& fom,
                         const IterationHook& hook)
{
  if (cfg.train.empty())
    throw std::invalid_argument("greedy: empty training set");
  if (!(cfg.tol_sratio > 0.0 && cfg.tol_sratio <= 1.0))
    throw std::invalid_argument("greedy: tol_sratio must be in (0, 1]");
  if (cfg.kpoint < 1)
    throw std::invalid_argument("greedy: kpoint must be >= 1");
  if (cfg.kpoint > 1 && cfg.indicator != IndicatorKind::L1)
    throw std::invalid_argument("greedy: the enhanced k-point selection applies to the L1 indicator");
  if (cfg.lspg_mode == VariantMode::PrimeOffline && cfg.projection != ProjectionKind::Lspg)
    throw std::invalid_argument("greedy: PrimeOffline mode requires the LSPG projection");

  GreedyState st;
  st.sys = &sys;
  st.cfg = cfg;
  st.has_galerkin = cfg.projection == ProjectionKind::Galerkin;
  st.has_lspg = cfg.projection == ProjectionKind::Lspg ||
                cfg.indicator == IndicatorKind::Residual || cfg.residual_errors;

  std::vector<char> taken(cfg.train.size(), 0);

  auto rebuild_artifacts = [&]() {
    if (st.has_galerkin)
    {
      if (st.galerkin.m == 0)
        st.galerkin = galerkin_offline(sys, st.basis.U());
      else
        galerkin_extend(st.galerkin, sys, st.basis.U());
    }
    if (st.has_lspg)
    {
      VariantMode mode = cfg.projection == ProjectionKind::Lspg ? cfg.lspg_mode
                                                                : VariantMode::Standard;
      st.lspg = lspg_offline(sys, st.basis.U(), mode, cfg.qr_rank_tol);
    }
  };

  // Initialization: one FOM solve at mu_1.
  const int i1 = initial_index(cfg, sys.problem);
  Eigen::VectorXd f1 = fom(cfg.train[i1]);
  ++st.fom_solve_count;
  if (st.basis.append(f1, cfg.train[i1], cfg.dependence_tol) !=
      SnapshotBasis::AppendStatus::Ok)
    throw std::runtime_error("greedy: the first snapshot is numerically zero");
  st.selected.push_back(i1);
  taken[i1] = 1;
  st.spectral_ratios.push_back(st.basis.spectral_ratio());
  rebuild_artifacts();

  while (true)
  {
    const int m = st.basis.m();
    if (hook)
      hook(st, m);
    if (st.spectral_ratios.back() <= cfg.tol_sratio)
    {
      st.termination = GreedyTermination::SpectralTolerance;
      break;
    }
    if (m >= cfg.max_m)
    {
      st.termination = GreedyTermination::MaxIterations;
      break;
    }
    std::vector<int> candidates;
    for (std::size_t i = 0; i < cfg.train.size(); ++i)
      if (!taken[i])
        candidates.push_back(static_cast<int>(i));
    if (candidates.empty())
    {
      st.termination = GreedyTermination::TrainingExhausted;
      break;
    }

    // Indicator sweep; candidates are independent and the artifacts are
    // immutable, so the loop is parallel over mu with a post-join argmax.
    auto t0 = std::chrono::steady_clock::now();
    std::vector<double> delta(candidates.size());
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t a, std::size_t b) {
      for (std::size_t i = a; i < b; ++i)
      {
        const Eigen::VectorXd& mu = cfg.train[candidates[i]];
        Eigen::VectorXd d;
        Eigen::VectorXd c = st.rom_solve(mu, &d);
        delta[i] = st.indicator(mu, c, d);
      }
    });
    const double t_sweep = seconds_since(t0);

    std::size_t best = 0;
    for (std::size_t i = 1; i < delta.size(); ++i)
      if (delta[i] > delta[best])
        best = i;  // ties resolved toward the lowest training index

    GreedyIterationRecord rec;
    rec.m = m;
    rec.t_sweep = t_sweep;

    t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd f_next;
    int winner_index;
    if (cfg.kpoint == 1)
    {
      winner_index = candidates[best];
      rec.indicator_value = delta[best];
      f_next = fom(cfg.train[winner_index]);
      ++st.fom_solve_count;
      rec.fom_solves = 1;
    }
    else
    {
      // Enhanced k-point selection: among the top k indicator values, pick
      // the candidate with the largest true L2 error; its FOM solution is
      // reused as the snapshot.
      const int k = std::min<int>(cfg.kpoint, static_cast<int>(candidates.size()));
      std::vector<std::size_t> order(candidates.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
      std::partial_sort(order.begin(), order.begin() + k, order.end(),
                        [&](std::size_t a, std::size_t b) {
                          if (delta[a] != delta[b])
                            return delta[a] > delta[b];
                          return a < b;
                        });
      double best_err = -1.0;
      winner_index = candidates[order[0]];
      rec.indicator_value = delta[order[0]];
      for (int t = 0; t < k; ++t)
      {
        const int idx = candidates[order[t]];
        Eigen::VectorXd f = fom(cfg.train[idx]);
        ++st.fom_solve_count;
        Eigen::VectorXd c = st.rom_solve(cfg.train[idx]);
        double err = sys.norm_h(f - st.basis.U() * c);
        if (err > best_err)
        {
          best_err = err;
          winner_index = idx;
          rec.indicator_value = delta[order[t]];
          f_next = std::move(f);
        }
      }
      rec.fom_solves = k;
    }
    rec.t_fom = seconds_since(t0);
    rec.selected_index = winner_index;
    rec.selected_mu = cfg.train[winner_index];

    // Training errors at mu_{m+1}, measured before the snapshot is appended.
    {
      Eigen::VectorXd d;
      Eigen::VectorXd c = st.rom_solve(cfg.train[winner_index], &d);
      rec.e_l2_train = sys.norm_h(f_next - st.basis.U() * c);
      rec.e_res_train = st.residual_error(cfg.train[winner_index], c, d);
    }

    t0 = std::chrono::steady_clock::now();
    if (st.basis.append(f_next, cfg.train[winner_index], cfg.dependence_tol) !=
        SnapshotBasis::AppendStatus::Ok)
    {
      st.termination = GreedyTermination::BasisSaturated;
      st.records.push_back(rec);
      break;
    }
    st.selected.push_back(winner_index);
    taken[winner_index] = 1;
    st.spectral_ratios.push_back(st.basis.spectral_ratio());
    rebuild_artifacts();
    rec.t_update = seconds_since(t0);
    st.records.push_back(rec);
  }
  return st;
}

}  // namespace rte_rbm
