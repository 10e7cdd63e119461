// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>

#include "rte_rbm/greedy.hpp"

namespace rte_rbm {

struct RomKind
{
  ProjectionKind projection = ProjectionKind::Galerkin;
  IndicatorKind indicator = IndicatorKind::L1;
};

RomKind parse_rom_kind(const std::string& name);  // g-l1 | g-res | pg-l1 | pg-res
std::string rom_kind_name(const RomKind& kind);

struct ExperimentPlan
{
  std::string problem_name;
  RomKind rom;
  bool quick_preset = false;
  int nx_override = 0;
  int ny_override = 0;
  std::optional<QuadratureSpec> quad_override;
  std::optional<std::array<int, 2>> train_grid_override;
  double tol_sratio = -1.0;  // <= 0: problem default
  int max_m = -1;            // <= 0: problem default
  int kpoint = 1;
  VariantMode variant = VariantMode::Standard;
  Mu1Policy mu1;
  std::uint64_t seed = 0;
  int test_count = -1;  // < 0: problem default; 0: skip test evaluation
  int threads = 0;
  std::string out_dir;          // empty: nothing written
  bool record_curves = false;   // keep per-mu error curves over m
  bool residual_errors = true;  // build residual artifacts for L1 runs too
};

// One errors.csv row per reduced dimension m.
struct ErrorReportRow
{
  int m = 0;
  double e_l2_train = 0.0;
  double e_res_train = 0.0;
  double e_l2_test = 0.0;
  double e_res_test = 0.0;
  double spectral_ratio = 0.0;
  double max_cond = 0.0;
  double t_fom_s = 0.0;
  double t_sweep_s = 0.0;
  double t_update_s = 0.0;
};

struct ExperimentResult
{
  ProblemDefinition problem;
  Discretization disc;
  ExperimentPlan plan;
  std::shared_ptr<FomSystem> system;  // keeps GreedyState::sys valid
  GreedyState state;
  std::vector<ErrorReportRow> rows;
  std::vector<Eigen::VectorXd> test_set;
  // Curves indexed [m-1][point]; filled when plan.record_curves is set.
  std::vector<std::vector<double>> test_l2_curves;
  std::vector<std::vector<double>> test_res_curves;
  std::vector<std::vector<double>> train_res_curves;
  int test_fom_solves = 0;
  double sigma_a_star = 0.0;
  // Largest ||A f - b||_Mh / ||b||_Mh over every FOM solve in the run.
  double max_fom_residual_ratio = 0.0;
  // Fatal Remark-3 check for PG-Res: residual test error must not increase.
  bool pg_res_monotone = true;
};

Discretization resolve_discretization(const ProblemDefinition& problem,
                                      const ExperimentPlan& plan);

ExperimentResult run_experiment(const ExperimentPlan& plan);

void write_experiment_outputs(const ExperimentResult& result);

// Reduced artifacts reloaded from a run directory (predict/evaluate paths).
struct LoadedRun
{
  ProblemDefinition problem;
  Discretization disc;
  RomKind rom;
  VariantMode variant = VariantMode::Standard;
  int m = 0;
  GalerkinArtifacts galerkin;
  LspgArtifacts lspg;
  bool has_galerkin = false;
  bool has_lspg = false;
  std::vector<Eigen::VectorXd> selected_params;
  std::string dir;

  Eigen::VectorXd rom_solve(const Eigen::VectorXd& mu) const;
  Eigen::MatrixXd load_basis() const;
};

LoadedRun load_run(const std::string& dir);

// Warm-start study: average SI-DSA iteration counts over a test set with the
// zero initial guess versus reduced-density initial guesses from bases
// trained on the solve mesh and on a coarser mesh.
struct DsaStudyRow
{
  int m = 0;
  double iters_zero = 0.0;
  double iters_rom_fine = 0.0;
  double iters_rom_coarse = 0.0;
};

std::vector<DsaStudyRow> rom_initial_guess_study(const ProblemDefinition& problem,
                                                 const Discretization& fine,
                                                 const Discretization& coarse,
                                                 const std::vector<int>& m_values,
                                                 const std::vector<Eigen::VectorXd>& test_set,
                                                 int threads = 0);

// Online/FOM timing sweep over mesh sizes at fixed m (Table-3 style layout).
struct OnlineTimingRow
{
  Eigen::VectorXd mu;
  Eigen::Index n = 0;
  double fom_s = 0.0;
  double g_l1_s = 0.0;
  double g_res_s = 0.0;
  double pg_l1_s = 0.0;
  double pg_res_s = 0.0;
};

std::vector<OnlineTimingRow> bench_online_study(const ProblemDefinition& problem, int m,
                                                const std::vector<Eigen::Index>& n_targets,
                                                const QuadratureSpec& quad, int repeats,
                                                const std::vector<Eigen::VectorXd>& mus,
                                                int threads = 0);

}  // namespace rte_rbm
