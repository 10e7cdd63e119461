// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rte_rbm/fom_solver.hpp"
#include "rte_rbm/io.hpp"
#include "rte_rbm/parallel.hpp"
#include "rte_rbm/rng.hpp"

namespace rte_rbm {

using nlohmann::json;

RomKind parse_rom_kind(const std::string& name)
{
  if (name == "g-l1")
    return {ProjectionKind::Galerkin, IndicatorKind::L1};
  if (name == "g-res")
    return {ProjectionKind::Galerkin, IndicatorKind::Residual};
  if (name == "pg-l1")
    return {ProjectionKind::Lspg, IndicatorKind::L1};
  if (name == "pg-res")
    return {ProjectionKind::Lspg, IndicatorKind::Residual};
  throw std::invalid_argument("unknown ROM kind: " + name +
                              " (expected g-l1, g-res, pg-l1, pg-res)");
}

std::string rom_kind_name(const RomKind& kind)
{
  if (kind.projection == ProjectionKind::Galerkin)
    return kind.indicator == IndicatorKind::L1 ? "g-l1" : "g-res";
  return kind.indicator == IndicatorKind::L1 ? "pg-l1" : "pg-res";
}

Discretization resolve_discretization(const ProblemDefinition& problem,
                                      const ExperimentPlan& plan)
{
  Discretization d = problem.disc(plan.quick_preset);
  if (plan.nx_override > 0)
    d.nx = plan.nx_override;
  if (plan.ny_override > 0)
    d.ny = plan.ny_override;
  if (plan.quad_override)
    d.quad = *plan.quad_override;
  return d;
}

namespace {

const char* variant_name(VariantMode mode)
{
  switch (mode)
  {
    case VariantMode::Standard:
      return "standard";
    case VariantMode::PrimeOffline:
      return "prime";
    case VariantMode::NormalEquation:
      return "normal-eq";
  }
  return "standard";
}

const char* termination_name(GreedyTermination t)
{
  switch (t)
  {
    case GreedyTermination::SpectralTolerance:
      return "spectral-tolerance";
    case GreedyTermination::MaxIterations:
      return "max-iterations";
    case GreedyTermination::BasisSaturated:
      return "basis-saturated";
    case GreedyTermination::TrainingExhausted:
      return "training-exhausted";
  }
  return "unknown";
}

json matrix_to_json(const Eigen::MatrixXd& m)
{
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
  {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j)
{
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = j[r][c].get<double>();
  return m;
}

json vector_to_json(const Eigen::VectorXd& v)
{
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i)
    out.push_back(v[i]);
  return out;
}

Eigen::VectorXd vector_from_json(const json& j)
{
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v[i] = j[i].get<double>();
  return v;
}

double median_of(std::vector<double> v)
{
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan)
{
  if (plan.variant == VariantMode::NormalEquation)
    throw std::invalid_argument(
        "run_experiment: the normal-equation variant is a diagnostic mode, not a training mode");

  ExperimentResult result;
  result.plan = plan;
  result.problem = find_problem(plan.problem_name);
  if (plan.train_grid_override)
    result.problem.train_grid = *plan.train_grid_override;
  result.disc = resolve_discretization(result.problem, plan);
  result.sigma_a_star = result.problem.sigma_a_star();

  result.system = std::make_shared<FomSystem>(build_fom_system(result.problem, result.disc));
  FomSystem& sys = *result.system;

  const int test_count = plan.test_count < 0 ? result.problem.test_count : plan.test_count;
  result.test_set = sample_uniform_box(result.problem.p_lo, result.problem.p_hi, test_count,
                                       plan.seed);

  auto note_residual = [&result, &sys](const FomSolution& sol, const Eigen::VectorXd& mu) {
    const double bnorm = sys.weighting.norm_mh(sys.b_mu(mu));
    if (bnorm > 0.0)
      result.max_fom_residual_ratio =
          std::max(result.max_fom_residual_ratio, sol.residual_mh / bnorm);
  };

  // Test-set ground truth, each parameter solved exactly once and cached.
  std::vector<Eigen::VectorXd> test_fom(test_count);
  std::vector<char> test_ok(test_count, 0);
  for (int i = 0; i < test_count; ++i)
  {
    try
    {
      FomSolution sol = solve_fom(sys, result.test_set[i], plan.threads);
      note_residual(sol, result.test_set[i]);
      test_fom[i] = std::move(sol.f);
      test_ok[i] = 1;
      ++result.test_fom_solves;
    }
    catch (const std::exception&)
    {
      test_ok[i] = 0;  // flagged; the run continues without this point
    }
  }

  GreedyConfig gc;
  gc.indicator = plan.rom.indicator;
  gc.projection = plan.rom.projection;
  gc.train = result.problem.training_set();
  gc.tol_sratio = plan.tol_sratio > 0.0 ? plan.tol_sratio : result.problem.tol_sratio;
  gc.max_m = plan.max_m > 0 ? plan.max_m : result.problem.max_m_default;
  gc.mu1 = plan.mu1;
  gc.kpoint = plan.kpoint;
  gc.lspg_mode = plan.variant;
  gc.residual_errors = plan.residual_errors;
  gc.threads = plan.threads;

  std::vector<double> max_l2(0), max_res(0), max_cond(0);
  auto hook = [&](const GreedyState& st, int m) {
    double ml2 = std::numeric_limits<double>::quiet_NaN();
    double mres = std::numeric_limits<double>::quiet_NaN();
    double mcond = std::numeric_limits<double>::quiet_NaN();
    if (test_count > 0)
    {
      std::vector<double> l2(test_count), res(test_count), cond(test_count);
      parallel_for(test_count, plan.threads, [&](std::size_t a, std::size_t b) {
        for (std::size_t i = a; i < b; ++i)
        {
          const Eigen::VectorXd& mu = result.test_set[i];
          Eigen::VectorXd d;
          Eigen::VectorXd c = st.rom_solve(mu, &d);
          l2[i] = test_ok[i] ? sys.norm_h(test_fom[i] - st.basis.U() * c)
                             : std::numeric_limits<double>::quiet_NaN();
          res[i] = st.residual_error(mu, c, d);
          cond[i] = st.cfg.projection == ProjectionKind::Galerkin
                        ? galerkin_condition(st.galerkin, sys.theta_A(mu))
                        : lspg_condition(st.lspg, sys.theta_A(mu));
        }
      });
      ml2 = mres = mcond = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < test_count; ++i)
      {
        if (test_ok[i])
          ml2 = std::max(ml2, l2[i]);
        if (std::isfinite(res[i]))
          mres = std::max(mres, res[i]);
        mcond = std::max(mcond, cond[i]);
      }
      if (plan.record_curves)
      {
        result.test_l2_curves.push_back(l2);
        result.test_res_curves.push_back(res);
      }
    }
    if (plan.record_curves && st.has_lspg)
    {
      const std::size_t nt = gc.train.size();
      std::vector<double> tres(nt);
      parallel_for(nt, plan.threads, [&](std::size_t a, std::size_t b) {
        for (std::size_t i = a; i < b; ++i)
        {
          Eigen::VectorXd d;
          Eigen::VectorXd c = st.rom_solve(gc.train[i], &d);
          tres[i] = st.residual_error(gc.train[i], c, d);
        }
      });
      result.train_res_curves.push_back(std::move(tres));
    }
    max_l2.push_back(ml2);
    max_res.push_back(mres);
    max_cond.push_back(mcond);
    (void)m;
  };

  FomOracle oracle = [&](const Eigen::VectorXd& mu) {
    FomSolution sol = solve_fom(sys, mu, plan.threads);
    note_residual(sol, mu);
    return sol.f;
  };
  result.state = train_greedy(sys, gc, oracle, hook);

  const int M = result.state.basis.m();
  result.rows.resize(M);
  for (int m = 1; m <= M; ++m)
  {
    ErrorReportRow& row = result.rows[m - 1];
    row.m = m;
    row.spectral_ratio = result.state.spectral_ratios[m - 1];
    row.e_l2_test = m - 1 < static_cast<int>(max_l2.size())
                        ? max_l2[m - 1]
                        : std::numeric_limits<double>::quiet_NaN();
    row.e_res_test = m - 1 < static_cast<int>(max_res.size())
                         ? max_res[m - 1]
                         : std::numeric_limits<double>::quiet_NaN();
    row.max_cond = m - 1 < static_cast<int>(max_cond.size())
                       ? max_cond[m - 1]
                       : std::numeric_limits<double>::quiet_NaN();
    if (m - 1 < static_cast<int>(result.state.records.size()))
    {
      const GreedyIterationRecord& rec = result.state.records[m - 1];
      row.e_l2_train = rec.e_l2_train;
      row.e_res_train = rec.e_res_train;
      row.t_fom_s = rec.t_fom;
      row.t_sweep_s = rec.t_sweep;
      row.t_update_s = rec.t_update;
    }
    else
    {
      row.e_l2_train = row.e_res_train = std::numeric_limits<double>::quiet_NaN();
    }
  }

  // Spectral-ratio monotonicity is an observed property: warn, never fail.
  for (std::size_t i = 1; i < result.state.spectral_ratios.size(); ++i)
    if (result.state.spectral_ratios[i] >
        result.state.spectral_ratios[i - 1] * (1.0 + 1e-12))
      std::cerr << "warning: spectral ratio increased at m = " << i + 1 << "\n";

  // Remark-3 fatal check: PG-Res residual test error is non-increasing. The
  // online residual evaluation carries a cond(B) * eps noise floor, so rows
  // already at or below 1e-8 of the scale are outside its resolution and are
  // not compared.
  if (plan.rom.projection == ProjectionKind::Lspg &&
      plan.rom.indicator == IndicatorKind::Residual && test_count > 0 && M >= 2)
  {
    double scale = 0.0;
    for (const auto& row : result.rows)
      if (std::isfinite(row.e_res_test))
        scale = std::max(scale, row.e_res_test);
    for (int m = 2; m <= M; ++m)
    {
      const double prev = result.rows[m - 2].e_res_test;
      const double cur = result.rows[m - 1].e_res_test;
      if (cur <= 1e-8 * scale && prev <= 1e-8 * scale)
        continue;
      if (cur > prev + 1e-12 * scale)
        result.pg_res_monotone = false;
    }
  }

  if (!plan.out_dir.empty())
    write_experiment_outputs(result);
  return result;
}

void write_experiment_outputs(const ExperimentResult& result)
{
  namespace fs = std::filesystem;
  const std::string dir = result.plan.out_dir;
  fs::create_directories(dir);

  CsvTable errors;
  errors.header = {"m",          "e_l2_train",    "e_res_train", "e_l2_test", "e_res_test",
                   "spectral_ratio", "max_cond",  "t_fom_s",     "t_sweep_s", "t_update_s"};
  for (const auto& r : result.rows)
    errors.rows.push_back({std::to_string(r.m), format_g17(r.e_l2_train),
                           format_g17(r.e_res_train), format_g17(r.e_l2_test),
                           format_g17(r.e_res_test), format_g17(r.spectral_ratio),
                           format_g17(r.max_cond), format_g17(r.t_fom_s),
                           format_g17(r.t_sweep_s), format_g17(r.t_update_s)});
  write_csv(dir + "/errors.csv", errors);

  const int d = result.problem.n_params();
  CsvTable glog;
  glog.header = {"m", "selected_index"};
  for (int i = 0; i < d; ++i)
    glog.header.push_back("mu_" + std::to_string(i));
  glog.header.insert(glog.header.end(),
                     {"indicator", "spectral_ratio_after", "fom_solves", "t_fom_s",
                      "t_sweep_s", "t_update_s"});
  for (std::size_t i = 0; i < result.state.records.size(); ++i)
  {
    const auto& rec = result.state.records[i];
    std::vector<std::string> row = {std::to_string(rec.m), std::to_string(rec.selected_index)};
    for (int k = 0; k < d; ++k)
      row.push_back(format_g17(rec.selected_mu[k]));
    const double r_after = i + 1 < result.state.spectral_ratios.size()
                               ? result.state.spectral_ratios[i + 1]
                               : std::numeric_limits<double>::quiet_NaN();
    row.push_back(format_g17(rec.indicator_value));
    row.push_back(format_g17(r_after));
    row.push_back(std::to_string(rec.fom_solves));
    row.push_back(format_g17(rec.t_fom));
    row.push_back(format_g17(rec.t_sweep));
    row.push_back(format_g17(rec.t_update));
    glog.rows.push_back(std::move(row));
  }
  write_csv(dir + "/greedy_log.csv", glog);

  CsvTable sel;
  sel.header = {"m"};
  for (int i = 0; i < d; ++i)
    sel.header.push_back("mu_" + std::to_string(i));
  const auto& params = result.state.basis.parameters();
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    std::vector<std::string> row = {std::to_string(i + 1)};
    for (int k = 0; k < d; ++k)
      row.push_back(format_g17(params[i][k]));
    sel.rows.push_back(std::move(row));
  }
  write_csv(dir + "/selected_params.csv", sel);

  json meta;
  meta["problem"] = result.problem.name;
  meta["rom"] = rom_kind_name(result.plan.rom);
  meta["variant"] = variant_name(result.plan.variant);
  meta["preset"] = result.plan.quick_preset ? "quick" : "paper";
  meta["nx"] = result.disc.nx;
  meta["ny"] = result.disc.ny;
  meta["degree"] = result.disc.degree;
  if (result.problem.dim_x == 1)
    meta["quad"] = {{"n_slab", result.disc.quad.n_slab}};
  else
    meta["quad"] = {{"n_theta", result.disc.quad.n_theta}, {"n_xi", result.disc.quad.n_xi}};
  meta["train_grid"] = {result.problem.train_grid[0], result.problem.train_grid[1]};
  meta["test_count"] = static_cast<int>(result.test_set.size());
  meta["seed"] = result.plan.seed;
  meta["tol_sratio"] =
      result.plan.tol_sratio > 0 ? result.plan.tol_sratio : result.problem.tol_sratio;
  meta["kpoint"] = result.plan.kpoint;
  meta["m"] = result.state.basis.m();
  meta["termination"] = termination_name(result.state.termination);
  meta["fom_solves"] = result.state.fom_solve_count;
  meta["test_fom_solves"] = result.test_fom_solves;
  meta["sigma_a_star"] = result.sigma_a_star;
  meta["max_fom_residual_ratio"] = result.max_fom_residual_ratio;
  meta["pg_res_monotone"] = result.pg_res_monotone;
  meta["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                          std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION);
  write_text_file(dir + "/basis.meta", meta.dump(2) + "\n");

  json art;
  art["rom"] = rom_kind_name(result.plan.rom);
  art["variant"] = variant_name(result.plan.variant);
  art["m"] = result.state.basis.m();
  art["R"] = matrix_to_json(result.state.basis.R());
  json sel_params = json::array();
  for (const auto& p : params)
    sel_params.push_back(vector_to_json(p));
  art["selected_params"] = sel_params;
  if (result.state.has_galerkin)
  {
    json g;
    g["Ahat"] = json::array();
    for (const auto& a : result.state.galerkin.Ahat)
      g["Ahat"].push_back(matrix_to_json(a));
    g["bhat"] = json::array();
    for (const auto& b : result.state.galerkin.bhat)
      g["bhat"].push_back(vector_to_json(b));
    art["galerkin"] = g;
  }
  if (result.state.has_lspg)
  {
    const LspgArtifacts& l = result.state.lspg;
    json pg;
    pg["mode"] = variant_name(l.mode);
    pg["rank"] = l.rank;
    pg["q_A"] = l.q_A;
    pg["q_b"] = l.q_b;
    pg["Y"] = json::array();
    for (const auto& y : l.Y)
      pg["Y"].push_back(matrix_to_json(y));
    pg["btilde"] = json::array();
    for (const auto& b : l.btilde)
      pg["btilde"].push_back(vector_to_json(b));
    pg["G_res"] = matrix_to_json(l.G_res);
    pg["bbar_gram"] = matrix_to_json(l.bbar_gram);
    art["lspg"] = pg;
  }
  write_text_file(dir + "/artifacts.json", art.dump() + "\n");

  save_matrix_bin(dir + "/basis.bin", result.state.basis.U());
}

Eigen::VectorXd LoadedRun::rom_solve(const Eigen::VectorXd& mu) const
{
  const Eigen::VectorXd thA = problem.theta_A(mu);
  const Eigen::VectorXd thb = problem.theta_b(mu);
  if (rom.projection == ProjectionKind::Galerkin)
    return galerkin_online(galerkin, thA, thb);
  return lspg_online(lspg, thA, thb).c;
}

Eigen::MatrixXd LoadedRun::load_basis() const { return load_matrix_bin(dir + "/basis.bin"); }

LoadedRun load_run(const std::string& dir)
{
  std::ifstream meta_in(dir + "/basis.meta");
  if (!meta_in)
    throw std::runtime_error("load_run: missing " + dir + "/basis.meta");
  json meta = json::parse(meta_in);
  std::ifstream art_in(dir + "/artifacts.json");
  if (!art_in)
    throw std::runtime_error("load_run: missing " + dir + "/artifacts.json");
  json art = json::parse(art_in);

  LoadedRun run;
  run.dir = dir;
  run.problem = find_problem(meta["problem"].get<std::string>());
  run.disc.nx = meta["nx"].get<int>();
  run.disc.ny = meta["ny"].get<int>();
  run.disc.degree = meta["degree"].get<int>();
  if (run.problem.dim_x == 1)
    run.disc.quad.n_slab = meta["quad"]["n_slab"].get<int>();
  else
  {
    run.disc.quad.n_theta = meta["quad"]["n_theta"].get<int>();
    run.disc.quad.n_xi = meta["quad"]["n_xi"].get<int>();
  }
  run.rom = parse_rom_kind(art["rom"].get<std::string>());
  run.m = art["m"].get<int>();
  for (const auto& p : art["selected_params"])
    run.selected_params.push_back(vector_from_json(p));
  if (art.contains("galerkin"))
  {
    run.has_galerkin = true;
    for (const auto& a : art["galerkin"]["Ahat"])
      run.galerkin.Ahat.push_back(matrix_from_json(a));
    for (const auto& b : art["galerkin"]["bhat"])
      run.galerkin.bhat.push_back(vector_from_json(b));
    run.galerkin.m = run.m;
  }
  if (art.contains("lspg"))
  {
    run.has_lspg = true;
    const json& pg = art["lspg"];
    std::string mode = pg["mode"].get<std::string>();
    run.lspg.mode = mode == "prime" ? VariantMode::PrimeOffline : VariantMode::Standard;
    run.variant = run.lspg.mode;
    run.lspg.m = run.m;
    run.lspg.rank = pg["rank"].get<int>();
    run.lspg.q_A = pg["q_A"].get<int>();
    run.lspg.q_b = pg["q_b"].get<int>();
    for (const auto& y : pg["Y"])
      run.lspg.Y.push_back(matrix_from_json(y));
    for (const auto& b : pg["btilde"])
      run.lspg.btilde.push_back(vector_from_json(b));
    run.lspg.G_res = matrix_from_json(pg["G_res"]);
    run.lspg.bbar_gram = matrix_from_json(pg["bbar_gram"]);
  }
  return run;
}

namespace {

// L2 projection of a DG scalar field between nested meshes of the same
// domain (coarse basis evaluated at the fine elements' quadrature points).
Eigen::VectorXd transfer_dg_scalar(const DgSpace& from, const DgSpace& to,
                                   const Eigen::VectorXd& v)
{
  const SpatialMesh& mf = to.mesh();
  const SpatialMesh& mc = from.mesh();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(to.n_dof_x());
  std::vector<double> gx, gw;
  gauss_on_interval(to.degree() + 2, -1.0, 1.0, gx, gw);
  const int nloc = to.nloc();
  const int nx = mf.cells[0];
  const int ny = mf.dim_x == 2 ? mf.cells[1] : 1;
  auto locate = [&](int axis, double x) {
    int i = static_cast<int>((x - mc.lo[axis]) / mc.h(axis));
    return std::clamp(i, 0, mc.cells[axis] - 1);
  };
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
    {
      const int e = ix + nx * iy;
      const double hx = mf.h(0);
      const double hy = mf.dim_x == 2 ? mf.h(1) : 1.0;
      const int nqy = mf.dim_x == 2 ? static_cast<int>(gx.size()) : 1;
      for (std::size_t qa = 0; qa < gx.size(); ++qa)
        for (int qb = 0; qb < nqy; ++qb)
        {
          const double x = mf.center(0, ix) + 0.5 * hx * gx[qa];
          const double y = mf.dim_x == 2 ? mf.center(1, iy) + 0.5 * hy * gx[qb] : 0.5;
          const double w =
              0.5 * hx * gw[qa] * (mf.dim_x == 2 ? 0.5 * hy * gw[qb] : 1.0);
          const int ec = mc.dim_x == 2
                             ? locate(0, x) + mc.cells[0] * locate(1, y)
                             : locate(0, x);
          const double val =
              from.eval_function(v.segment(ec * from.nloc(), from.nloc()), ec, x, y);
          out.segment(e * nloc, nloc) += (w * val) * to.eval_basis(e, x, y);
        }
    }
  return out;
}

GreedyState train_fixed_dimension(const FomSystem& sys, const RomKind& rom, int m,
                                  int threads)
{
  GreedyConfig gc;
  gc.indicator = rom.indicator;
  gc.projection = rom.projection;
  gc.train = sys.problem.training_set();
  gc.tol_sratio = 1e-300;  // run to the requested dimension
  gc.max_m = m;
  gc.residual_errors = rom.indicator == IndicatorKind::Residual;
  gc.threads = threads;
  FomOracle oracle = [&](const Eigen::VectorXd& mu) { return solve_fom(sys, mu, threads).f; };
  return train_greedy(sys, gc, oracle);
}

}  // namespace

std::vector<DsaStudyRow> rom_initial_guess_study(const ProblemDefinition& problem,
                                                 const Discretization& fine,
                                                 const Discretization& coarse,
                                                 const std::vector<int>& m_values,
                                                 const std::vector<Eigen::VectorXd>& test_set,
                                                 int threads)
{
  const int m_max = *std::max_element(m_values.begin(), m_values.end());
  FomSystem sys_f = build_fom_system(problem, fine);
  FomSystem sys_c = build_fom_system(problem, coarse);
  const RomKind gl1{ProjectionKind::Galerkin, IndicatorKind::L1};
  GreedyState rom_f = train_fixed_dimension(sys_f, gl1, m_max, threads);
  GreedyState rom_c = train_fixed_dimension(sys_c, gl1, m_max, threads);

  std::vector<DsaStudyRow> rows;
  double zero_sum = 0.0;
  std::vector<double> fine_sum(m_values.size(), 0.0), coarse_sum(m_values.size(), 0.0);
  for (const auto& mu : test_set)
  {
    SiConfig cfg;
    cfg.tol = problem.tol_si;
    cfg.threads = threads;
    zero_sum += solve_si_dsa(sys_f, mu, cfg).iterations;
    for (std::size_t k = 0; k < m_values.size(); ++k)
    {
      const int m = m_values[k];
      Eigen::VectorXd cf =
          galerkin_online(rom_f.galerkin, sys_f.theta_A(mu), sys_f.theta_b(mu), m);
      SiConfig warm = cfg;
      warm.rho0 = sys_f.moments(rom_f.basis.U().leftCols(m) * cf);
      fine_sum[k] += solve_si_dsa(sys_f, mu, warm).iterations;

      Eigen::VectorXd cc =
          galerkin_online(rom_c.galerkin, sys_c.theta_A(mu), sys_c.theta_b(mu), m);
      Eigen::VectorXd rho_c = sys_c.moments(rom_c.basis.U().leftCols(m) * cc);
      SiConfig warm_c = cfg;
      warm_c.rho0 = transfer_dg_scalar(*sys_c.space, *sys_f.space, rho_c);
      coarse_sum[k] += solve_si_dsa(sys_f, mu, warm_c).iterations;
    }
  }
  const double nt = static_cast<double>(test_set.size());
  for (std::size_t k = 0; k < m_values.size(); ++k)
    rows.push_back({m_values[k], zero_sum / nt, fine_sum[k] / nt, coarse_sum[k] / nt});
  return rows;
}

std::vector<OnlineTimingRow> bench_online_study(const ProblemDefinition& problem, int m,
                                                const std::vector<Eigen::Index>& n_targets,
                                                const QuadratureSpec& quad, int repeats,
                                                const std::vector<Eigen::VectorXd>& mus,
                                                int threads)
{
  // Smallest cell count per axis that keeps every material/source interface
  // element-aligned.
  auto alignment_base = [&]() {
    auto aligned = [&](int a) {
      auto edge_ok = [&](double t, int axis) {
        double lo = problem.domain.lo[axis], hi = problem.domain.hi[axis];
        double rel = (std::clamp(t, lo, hi) - lo) / (hi - lo) * a;
        return std::abs(rel - std::round(rel)) < 1e-9;
      };
      auto boxes_ok = [&](const std::vector<MaterialTerm>& terms) {
        for (const auto& term : terms)
          for (const auto& [box, w] : term.boxes)
            for (int axis = 0; axis < problem.dim_x; ++axis)
              if (!edge_ok(box.lo[axis], axis) || !edge_ok(box.hi[axis], axis))
                return false;
        return true;
      };
      if (!boxes_ok(problem.scattering) || !boxes_ok(problem.absorption))
        return false;
      for (const auto& s : problem.source)
        if (s.kind == SourceTerm::Kind::ConstantOnBox)
          for (int axis = 0; axis < problem.dim_x; ++axis)
            if (!edge_ok(s.box.lo[axis], axis) || !edge_ok(s.box.hi[axis], axis))
              return false;
      return true;
    };
    for (int a = 1; a <= 64; ++a)
      if (aligned(a))
        return a;
    return 1;
  }();

  std::vector<OnlineTimingRow> rows;
  for (Eigen::Index target : n_targets)
  {
    Discretization disc;
    disc.quad = quad;
    disc.degree = 1;
    const int nd = problem.dim_x == 1 ? quad.n_slab : quad.n_theta * quad.n_xi;
    const int nloc1d = disc.degree + 1;
    if (problem.dim_x == 1)
    {
      int nx = static_cast<int>(std::llround(static_cast<double>(target) / (nloc1d * nd)));
      disc.nx = std::max(alignment_base,
                         static_cast<int>(std::llround(static_cast<double>(nx) /
                                                       alignment_base)) *
                             alignment_base);
      disc.ny = 1;
    }
    else
    {
      double nxf = std::sqrt(static_cast<double>(target) / (nloc1d * nloc1d * nd));
      int nx = std::max(1, static_cast<int>(std::llround(nxf / alignment_base))) *
               alignment_base;
      disc.nx = disc.ny = nx;
    }

    FomSystem sys = build_fom_system(problem, disc);
    const std::vector<RomKind> kinds = {{ProjectionKind::Galerkin, IndicatorKind::L1},
                                        {ProjectionKind::Galerkin, IndicatorKind::Residual},
                                        {ProjectionKind::Lspg, IndicatorKind::L1},
                                        {ProjectionKind::Lspg, IndicatorKind::Residual}};
    std::vector<GreedyState> trained;
    trained.reserve(kinds.size());
    for (const auto& kind : kinds)
      trained.push_back(train_fixed_dimension(sys, kind, m, threads));

    for (const auto& mu : mus)
    {
      OnlineTimingRow row;
      row.mu = mu;
      row.n = sys.n();
      auto t0 = std::chrono::steady_clock::now();
      solve_fom(sys, mu, threads);
      row.fom_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      const Eigen::VectorXd thA = sys.theta_A(mu);
      const Eigen::VectorXd thb = sys.theta_b(mu);
      double* slots[4] = {&row.g_l1_s, &row.g_res_s, &row.pg_l1_s, &row.pg_res_s};
      for (int k = 0; k < 4; ++k)
      {
        std::vector<double> times(repeats);
        for (int r = 0; r < repeats; ++r)
        {
          auto t1 = std::chrono::steady_clock::now();
          if (kinds[k].projection == ProjectionKind::Galerkin)
          {
            volatile double sink =
                galerkin_online(trained[k].galerkin, thA, thb).sum();
            (void)sink;
          }
          else
          {
            volatile double sink = lspg_online(trained[k].lspg, thA, thb).c.sum();
            (void)sink;
          }
          times[r] =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();
        }
        *slots[k] = median_of(times);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace rte_rbm
