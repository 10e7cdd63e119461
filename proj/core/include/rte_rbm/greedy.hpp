// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "rte_rbm/fom_system.hpp"
#include "rte_rbm/reduced_linalg.hpp"
#include "rte_rbm/rom_galerkin.hpp"
#include "rte_rbm/rom_lspg.hpp"

namespace rte_rbm {

enum class IndicatorKind
{
  L1,
  Residual
};

enum class ProjectionKind
{
  Galerkin,
  Lspg
};

struct Mu1Policy
{
  enum class Kind
  {
    Center,   // training point nearest the geometric center of P
    Explicit, // training point nearest a given value
    Index
  };
  Kind kind = Kind::Center;
  Eigen::VectorXd value;
  int index = 0;
};

struct GreedyConfig
{
  IndicatorKind indicator = IndicatorKind::Residual;
  ProjectionKind projection = ProjectionKind::Galerkin;
  std::vector<Eigen::VectorXd> train;
  double tol_sratio = 1e-8;
  int max_m = 100;
  Mu1Policy mu1;
  int kpoint = 1;  // enhanced k-point L1 selection; 1 = standard
  VariantMode lspg_mode = VariantMode::Standard;
  bool residual_errors = true;  // build residual artifacts even for L1 runs
  double qr_rank_tol = 1e-13;
  double dependence_tol = 1e-13;
  int threads = 0;
};

struct GreedyIterationRecord
{
  int m = 0;  // reduced dimension that performed the selection
  int selected_index = -1;
  Eigen::VectorXd selected_mu;
  double indicator_value = 0.0;
  double e_l2_train = 0.0;
  double e_res_train = 0.0;
  double t_fom = 0.0;
  double t_sweep = 0.0;
  double t_update = 0.0;
  int fom_solves = 0;
};

enum class GreedyTermination
{
  SpectralTolerance,
  MaxIterations,
  BasisSaturated,
  TrainingExhausted
};

struct GreedyState
{
  const FomSystem* sys = nullptr;
  GreedyConfig cfg;
  SnapshotBasis basis;
  GalerkinArtifacts galerkin;
  LspgArtifacts lspg;
  bool has_galerkin = false;
  bool has_lspg = false;
  std::vector<int> selected;
  std::vector<GreedyIterationRecord> records;
  std::vector<double> spectral_ratios;  // r^(m), m = 1..M
  GreedyTermination termination = GreedyTermination::MaxIterations;
  int fom_solve_count = 0;

  // ROM solve with the current artifacts; fills d for LSPG projections.
  Eigen::VectorXd rom_solve(const Eigen::VectorXd& mu, Eigen::VectorXd* d_out = nullptr) const;
  // Configured error indicator at (mu, c); d is required in PrimeOffline mode.
  double indicator(const Eigen::VectorXd& mu, const Eigen::VectorXd& c,
                   const Eigen::VectorXd& d) const;
  // Residual of (mu, c) through the configured evaluation path.
  double residual_error(const Eigen::VectorXd& mu, const Eigen::VectorXd& c,
                        const Eigen::VectorXd& d) const;
};

// L1 importance indicator: l1 norm of R^{-1} c (back-substitution).
double indicator_l1(const SnapshotBasis& basis, const Eigen::VectorXd& c_reduced);
double indicator_residual(const LspgArtifacts& art, const Eigen::VectorXd& theta_A,
                          const Eigen::VectorXd& theta_b, const Eigen::VectorXd& c_reduced);

using FomOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
// Called whenever the artifacts for reduced dimension m are complete,
// including the terminal one.
using IterationHook = std::function<void(const GreedyState&, int m)>;

GreedyState train_greedy(const FomSystem& sys, const GreedyConfig& cfg, const FomOracle& fom,
                         const IterationHook& hook = {});

}  // namespace rte_rbm
