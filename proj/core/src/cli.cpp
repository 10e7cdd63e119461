// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#include "rte_rbm/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rte_rbm/experiment.hpp"
#include "rte_rbm/fom_solver.hpp"
#include "rte_rbm/io.hpp"
#include "rte_rbm/rng.hpp"

namespace rte_rbm {

namespace {

Eigen::VectorXd parse_vector(const std::string& text)
{
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    vals.push_back(std::stod(tok));
  Eigen::VectorXd v(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = vals[i];
  return v;
}

std::vector<int> parse_int_list(const std::string& text)
{
  std::vector<int> vals;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    vals.push_back(std::stoi(tok));
  return vals;
}

Eigen::Index parse_size_suffixed(std::string tok)
{
  double scale = 1.0;
  if (!tok.empty() && (tok.back() == 'k' || tok.back() == 'K'))
  {
    scale = 1e3;
    tok.pop_back();
  }
  else if (!tok.empty() && tok.back() == 'M')
  {
    scale = 1e6;
    tok.pop_back();
  }
  return static_cast<Eigen::Index>(std::llround(std::stod(tok) * scale));
}

std::vector<Eigen::Index> parse_n_list(const std::string& text)
{
  std::vector<Eigen::Index> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    out.push_back(parse_size_suffixed(tok));
  return out;
}

QuadratureSpec parse_quad(const std::string& text, int dim_x)
{
  QuadratureSpec q;
  std::vector<int> vals = parse_int_list(text);
  if (dim_x == 1)
  {
    if (vals.size() != 1)
      throw CLI::ValidationError("--quad", "1D problems take a single Gauss-Legendre count");
    q.n_slab = vals[0];
  }
  else
  {
    if (vals.size() != 2)
      throw CLI::ValidationError("--quad", "2D problems take n_theta,n_xi");
    q.n_theta = vals[0];
    q.n_xi = vals[1];
  }
  return q;
}

Mu1Policy parse_mu1(const std::string& text)
{
  Mu1Policy p;
  if (text == "center" || text.empty())
  {
    p.kind = Mu1Policy::Kind::Center;
    return p;
  }
  p.kind = Mu1Policy::Kind::Explicit;
  p.value = parse_vector(text);
  return p;
}

VariantMode parse_variant(const std::string& text)
{
  if (text == "standard")
    return VariantMode::Standard;
  if (text == "prime")
    return VariantMode::PrimeOffline;
  if (text == "normal-eq")
    return VariantMode::NormalEquation;
  throw CLI::ValidationError("--variant", "expected standard, prime, or normal-eq");
}

int cmd_train(const ExperimentPlan& plan)
{
  ExperimentResult result = run_experiment(plan);
  std::cout << "problem=" << result.problem.name << " rom=" << rom_kind_name(plan.rom)
            << " m=" << result.state.basis.m()
            << " spectral_ratio=" << format_g17(result.state.spectral_ratios.back())
            << " fom_solves=" << result.state.fom_solve_count << "\n";
  if (!result.pg_res_monotone)
  {
    std::cerr << "fatal: PG-Res residual test error increased with m\n";
    return 2;
  }
  return 0;
}

int cmd_predict(const std::string& artifacts_dir, const std::string& mu_text,
                const std::string& lift_path)
{
  LoadedRun run = load_run(artifacts_dir);
  Eigen::VectorXd mu = parse_vector(mu_text);
  if (mu.size() != run.problem.n_params())
    throw std::invalid_argument("predict: parameter dimension mismatch");
  Eigen::VectorXd c = run.rom_solve(mu);
  for (Eigen::Index i = 0; i < c.size(); ++i)
    std::cout << format_g17(c[i]) << "\n";
  if (!lift_path.empty())
  {
    Eigen::MatrixXd U = run.load_basis();
    Eigen::VectorXd f = U * c;
    std::ostringstream body;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      body << format_g17(f[i]) << "\n";
    write_text_file(lift_path, body.str());
    std::cout << "# lifted coordinate vector (" << f.size() << " entries) -> " << lift_path
              << "\n";
  }
  return 0;
}

int cmd_evaluate(const std::string& artifacts_dir, int test_count, std::uint64_t seed,
                 bool normal_eq, int threads, const std::string& out)
{
  LoadedRun run = load_run(artifacts_dir);
  FomSystem sys = build_fom_system(run.problem, run.disc);
  const int count = test_count > 0 ? test_count : run.problem.test_count;
  auto test_set = sample_uniform_box(run.problem.p_lo, run.problem.p_hi, count, seed);
  const Eigen::MatrixXd U = run.load_basis();

  CsvTable table;
  table.header = {};
  for (int i = 0; i < run.problem.n_params(); ++i)
    table.header.push_back("mu_" + std::to_string(i));
  table.header.insert(table.header.end(), {"e_l2", "e_res", "cond"});
  if (normal_eq)
    table.header.push_back("cond_normal_eq");

  for (const auto& mu : test_set)
  {
    FomSolution fs = solve_fom(sys, mu, threads);
    Eigen::VectorXd c = run.rom_solve(mu);
    const double e_l2 = sys.norm_h(fs.f - U * c);
    double e_res = std::numeric_limits<double>::quiet_NaN();
    if (run.has_lspg && run.lspg.mode == VariantMode::Standard)
      e_res = residual_norm_alg5(run.lspg, sys.theta_A(mu), sys.theta_b(mu), c);
    double cond = run.rom.projection == ProjectionKind::Galerkin
                      ? galerkin_condition(run.galerkin, sys.theta_A(mu))
                      : lspg_condition(run.lspg, sys.theta_A(mu));
    std::vector<std::string> row;
    for (int i = 0; i < run.problem.n_params(); ++i)
      row.push_back(format_g17(mu[i]));
    row.push_back(format_g17(e_l2));
    row.push_back(format_g17(e_res));
    row.push_back(format_g17(cond));
    if (normal_eq)
    {
      double cond_ne = 0.0;
      normal_equation_solve(sys, U, mu, &cond_ne);
      row.push_back(format_g17(cond_ne));
    }
    table.rows.push_back(std::move(row));
  }
  const std::string path = out.empty() ? artifacts_dir + "/evaluate.csv" : out;
  write_csv(path, table);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_bench_online(const std::string& problem_name, const std::string& artifacts_dir, int m,
                     const std::string& n_list, int repeat, const std::string& quad_text,
                     const std::string& mus_text, std::uint64_t seed, int threads,
                     const std::string& out_dir)
{
  std::string pname = problem_name;
  int m_use = m;
  if (pname.empty() && !artifacts_dir.empty())
  {
    LoadedRun run = load_run(artifacts_dir);
    pname = run.problem.name;
    if (m_use <= 0)
      m_use = run.m;
  }
  if (pname.empty())
    throw std::invalid_argument("bench-online: need --problem or --artifacts");
  if (m_use <= 0)
    m_use = 15;
  ProblemDefinition problem = find_problem(pname);
  QuadratureSpec quad = quad_text.empty()
                            ? (problem.dim_x == 1 ? QuadratureSpec{16, 0, 0}
                                                  : QuadratureSpec{0, 20, 6})
                            : parse_quad(quad_text, problem.dim_x);

  std::vector<Eigen::VectorXd> mus;
  if (!mus_text.empty())
  {
    std::stringstream ss(mus_text);
    std::string tok;
    while (std::getline(ss, tok, ';'))
      mus.push_back(parse_vector(tok));
  }
  else
  {
    mus = sample_uniform_box(problem.p_lo, problem.p_hi, 2, seed);
  }

  auto rows = bench_online_study(problem, m_use, parse_n_list(n_list), quad, repeat, mus,
                                 threads);
  CsvTable table;
  table.header = {};
  for (int i = 0; i < problem.n_params(); ++i)
    table.header.push_back("mu_" + std::to_string(i));
  table.header.insert(table.header.end(), {"n", "fom_s", "g_l1_s", "g_res_s", "pg_l1_s",
                                           "pg_res_s"});
  for (const auto& r : rows)
  {
    std::vector<std::string> row;
    for (int i = 0; i < problem.n_params(); ++i)
      row.push_back(format_g17(r.mu[i]));
    row.push_back(std::to_string(r.n));
    row.push_back(format_g17(r.fom_s));
    row.push_back(format_g17(r.g_l1_s));
    row.push_back(format_g17(r.g_res_s));
    row.push_back(format_g17(r.pg_l1_s));
    row.push_back(format_g17(r.pg_res_s));
    table.rows.push_back(std::move(row));
  }
  std::filesystem::create_directories(out_dir);
  write_csv(out_dir + "/timing.csv", table);
  std::cout << "wrote " << out_dir << "/timing.csv\n";
  return 0;
}

int cmd_dsa_study(const std::string& problem_name, const std::string& m_list, int fine_nx,
                  int coarse_nx, const std::string& quad_text, int test_count,
                  std::uint64_t seed, int threads, const std::string& out_dir)
{
  ProblemDefinition problem = find_problem(problem_name);
  if (problem.fom_kind != FomKind::SiDsa)
    throw std::invalid_argument("dsa-study: problem is not solved by SI-DSA");
  Discretization fine = problem.paper;
  Discretization coarse = problem.paper;
  if (fine_nx > 0)
    fine.nx = fine.ny = fine_nx;
  if (coarse_nx > 0)
    coarse.nx = coarse.ny = coarse_nx;
  if (!quad_text.empty())
    fine.quad = coarse.quad = parse_quad(quad_text, problem.dim_x);

  const int count = test_count > 0 ? test_count : 5;
  auto test_set = sample_uniform_box(problem.p_lo, problem.p_hi, count, seed);
  auto rows = rom_initial_guess_study(problem, fine, coarse, parse_int_list(m_list), test_set,
                                      threads);
  CsvTable table;
  table.header = {"m", "iters_zero_guess", "iters_rom_fine", "iters_rom_coarse"};
  for (const auto& r : rows)
    table.rows.push_back({std::to_string(r.m), format_g17(r.iters_zero),
                          format_g17(r.iters_rom_fine), format_g17(r.iters_rom_coarse)});
  std::filesystem::create_directories(out_dir);
  write_csv(out_dir + "/dsa_iterations.csv", table);
  std::cout << "wrote " << out_dir << "/dsa_iterations.csv\n";
  return 0;
}

int cmd_registry_dump(const std::string& filter)
{
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : registry())
  {
    if (!filter.empty() && p.name != filter)
      continue;
    nlohmann::json j;
    j["name"] = p.name;
    j["dim_x"] = p.dim_x;
    j["domain"] = {{"lo", {p.domain.lo[0], p.domain.lo[1]}},
                   {"hi", {p.domain.hi[0], p.domain.hi[1]}}};
    j["parameters"] = nlohmann::json::array();
    for (int i = 0; i < p.n_params(); ++i)
      j["parameters"].push_back(
          {{"name", p.p_names[i]}, {"lo", p.p_lo[i]}, {"hi", p.p_hi[i]}});
    j["q_A"] = 1 + p.scattering.size() + p.absorption.size();
    j["q_b"] = 1;
    auto term_to_json = [](const MaterialTerm& t) {
      nlohmann::json jt;
      jt["theta_c0"] = t.theta.c0;
      nlohmann::json coeff = nlohmann::json::array();
      for (Eigen::Index i = 0; i < t.theta.coeff.size(); ++i)
        coeff.push_back(t.theta.coeff[i]);
      jt["theta_coeff"] = coeff;
      jt["profile"] = t.profile == SpatialProfile::CoordX ? "x" : "1";
      nlohmann::json boxes = nlohmann::json::array();
      for (const auto& [box, w] : t.boxes)
        boxes.push_back({{"lo", {box.lo[0], box.lo[1]}},
                         {"hi", {box.hi[0], box.hi[1]}},
                         {"weight", w}});
      jt["boxes"] = boxes;
      return jt;
    };
    j["scattering"] = nlohmann::json::array();
    for (const auto& t : p.scattering)
      j["scattering"].push_back(term_to_json(t));
    j["absorption"] = nlohmann::json::array();
    for (const auto& t : p.absorption)
      j["absorption"].push_back(term_to_json(t));
    j["paper"] = {{"nx", p.paper.nx}, {"ny", p.paper.ny}};
    j["quick"] = {{"nx", p.quick.nx}, {"ny", p.quick.ny}};
    if (p.dim_x == 1)
      j["paper"]["n_slab"] = p.paper.quad.n_slab;
    else
      j["paper"]["cl"] = {p.paper.quad.n_theta, p.paper.quad.n_xi};
    j["train_grid"] = {p.train_grid[0], p.train_grid[1]};
    j["test_count"] = p.test_count;
    j["tol_sratio"] = p.tol_sratio;
    j["fom"] = p.fom_kind == FomKind::Direct ? "direct" : "si-dsa";
    j["tol_si"] = p.tol_si;
    out.push_back(std::move(j));
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args)
{
  CLI::App app{"Greedy reduced-basis solvers for the parametric steady-state RTE"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Run the offline greedy stage and save artifacts");
  std::string problem, rom = "g-l1", preset = "paper", mu1 = "center", variant = "standard";
  std::string out_dir, quad_text, train_grid_text;
  double tol_sratio = -1.0;
  int max_m = -1, kpoint = 1, threads = 0, test_count = -1, nx = 0, ny = 0;
  std::uint64_t seed = 0;
  train->add_option("--problem", problem, "Problem name (see registry-dump)")->required();
  train->add_option("--rom", rom, "ROM kind: g-l1 | g-res | pg-l1 | pg-res");
  train->add_option("--preset", preset, "paper | quick")
      ->check(CLI::IsMember({"paper", "quick"}));
  train->add_option("--tol-sratio", tol_sratio, "Spectral-ratio stopping tolerance");
  train->add_option("--max-m", max_m, "Maximum number of greedy iterations");
  train->add_option("--kpoint", kpoint, "Enhanced k-point L1 selection (k >= 1)");
  train->add_option("--mu1", mu1, "center or comma-separated parameter value");
  train->add_option("--variant", variant, "standard | prime | normal-eq");
  train->add_option("--seed", seed, "Test-set sampling seed");
  train->add_option("--test-count", test_count, "Test-set size (0 disables evaluation)");
  train->add_option("--out", out_dir, "Output directory")->required();
  train->add_option("--threads", threads, "Worker threads (RTE_RBM_THREADS overrides)");
  train->add_option("--nx", nx, "Override cell count in x");
  train->add_option("--ny", ny, "Override cell count in y");
  train->add_option("--quad", quad_text, "Quadrature: n (1D) or n_theta,n_xi (2D)");
  train->add_option("--train-grid", train_grid_text, "Override training grid, e.g. 21,21");

  // predict
  auto* predict = app.add_subcommand("predict", "Reduced solve at one parameter value");
  std::string artifacts, mu_text, lift_path;
  predict->add_option("--artifacts", artifacts, "Run directory")->required();
  predict->add_option("--mu", mu_text, "Comma-separated parameter value")->required();
  predict->add_option("--lift", lift_path, "Write the lifted coordinate vector here");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Errors of saved artifacts on a test set");
  std::string eval_artifacts, eval_out;
  int eval_test_count = -1, eval_threads = 0;
  std::uint64_t eval_seed = 0;
  bool eval_normal_eq = false;
  evaluate->add_option("--artifacts", eval_artifacts, "Run directory")->required();
  evaluate->add_option("--test-count", eval_test_count, "Test-set size");
  evaluate->add_option("--seed", eval_seed, "Test-set sampling seed");
  evaluate->add_flag("--normal-eq", eval_normal_eq,
                     "Also report the normal-equation condition number");
  evaluate->add_option("--threads", eval_threads, "Worker threads");
  evaluate->add_option("--out", eval_out, "Output CSV path");

  // bench-online
  auto* bench = app.add_subcommand("bench-online", "FOM vs ROM online timings over mesh sizes");
  std::string bench_problem, bench_artifacts, n_list, bench_quad, bench_mus, bench_out = ".";
  int bench_m = -1, bench_repeat = 10, bench_threads = 0;
  std::uint64_t bench_seed = 0;
  bench->add_option("--problem", bench_problem, "Problem name");
  bench->add_option("--artifacts", bench_artifacts, "Run directory supplying problem and m");
  bench->add_option("--m", bench_m, "Reduced dimension");
  bench->add_option("--n-list", n_list, "Target full dimensions, e.g. 212k,847k,1.9M")
      ->required();
  bench->add_option("--repeat", bench_repeat, "Online-solve repetitions per timing");
  bench->add_option("--quad", bench_quad, "Quadrature override");
  bench->add_option("--mus", bench_mus, "Semicolon-separated parameter values");
  bench->add_option("--seed", bench_seed, "Seed for default parameter sampling");
  bench->add_option("--threads", bench_threads, "Worker threads");
  bench->add_option("--out", bench_out, "Output directory");

  // dsa-study
  auto* dsa = app.add_subcommand("dsa-study", "SI-DSA warm starts from reduced densities");
  std::string dsa_problem = "pin-cell-2d", m_list = "5,10,15", dsa_quad, dsa_out = ".";
  int fine_nx = 0, coarse_nx = 0, dsa_test_count = 0, dsa_threads = 0;
  std::uint64_t dsa_seed = 0;
  dsa->add_option("--problem", dsa_problem, "Problem name");
  dsa->add_option("--m-list", m_list, "Reduced dimensions, e.g. 5,10,15");
  dsa->add_option("--fine-nx", fine_nx, "Solve/training mesh cells per axis");
  dsa->add_option("--coarse-nx", coarse_nx, "Coarse training mesh cells per axis");
  dsa->add_option("--quad", dsa_quad, "Quadrature override");
  dsa->add_option("--test-count", dsa_test_count, "Test-set size");
  dsa->add_option("--seed", dsa_seed, "Test-set sampling seed");
  dsa->add_option("--threads", dsa_threads, "Worker threads");
  dsa->add_option("--out", dsa_out, "Output directory");

  // registry-dump
  auto* dump = app.add_subcommand("registry-dump", "Print the benchmark problem definitions");
  std::string dump_problem;
  dump->add_option("--problem", dump_problem, "Restrict to one problem");

  std::vector<const char*> argv;
  argv.push_back("rte_rbm");
  for (const auto& a : args)
    argv.push_back(a.c_str());
  try
  {
    app.parse(static_cast<int>(argv.size()), argv.data());
  }
  catch (const CLI::ParseError& e)
  {
    return app.exit(e);
  }

  try
  {
    if (*train)
    {
      ExperimentPlan plan;
      plan.problem_name = problem;
      plan.rom = parse_rom_kind(rom);
      plan.quick_preset = preset == "quick";
      plan.tol_sratio = tol_sratio;
      plan.max_m = max_m;
      plan.kpoint = kpoint;
      plan.mu1 = parse_mu1(mu1);
      plan.variant = parse_variant(variant);
      plan.seed = seed;
      plan.test_count = test_count;
      plan.out_dir = out_dir;
      plan.threads = threads;
      plan.nx_override = nx;
      plan.ny_override = ny;
      if (!quad_text.empty())
        plan.quad_override = parse_quad(quad_text, find_problem(problem).dim_x);
      if (!train_grid_text.empty())
      {
        auto g = parse_int_list(train_grid_text);
        plan.train_grid_override = std::array<int, 2>{g[0], g.size() > 1 ? g[1] : 1};
      }
      return cmd_train(plan);
    }
    if (*predict)
      return cmd_predict(artifacts, mu_text, lift_path);
    if (*evaluate)
      return cmd_evaluate(eval_artifacts, eval_test_count, eval_seed, eval_normal_eq,
                          eval_threads, eval_out);
    if (*bench)
      return cmd_bench_online(bench_problem, bench_artifacts, bench_m, n_list, bench_repeat,
                              bench_quad, bench_mus, bench_seed, bench_threads, bench_out);
    if (*dsa)
      return cmd_dsa_study(dsa_problem, m_list, fine_nx, coarse_nx, dsa_quad, dsa_test_count,
                           dsa_seed, dsa_threads, dsa_out);
    if (*dump)
      return cmd_registry_dump(dump_problem);
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace rte_rbm
