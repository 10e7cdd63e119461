// Copyright (c) 2026 the rte-rbm authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rte_rbm/cli.hpp"
#include "rte_rbm/experiment.hpp"
#include "rte_rbm/fom_solver.hpp"

using namespace rte_rbm;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path)
{
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// errors.csv without the wall-time columns (the only non-reproducible part).
std::string strip_timings(const std::string& csv)
{
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line))
  {
    std::stringstream ls(line);
    std::string cell;
    int col = 0;
    while (std::getline(ls, cell, ','))
    {
      if (col >= 7)
        break;
      out << (col ? "," : "") << cell;
      ++col;
    }
    out << "\n";
  }
  return out.str();
}

std::string tmpdir(const std::string& tag)
{
  std::string d = (fs::temp_directory_path() / ("rte_rbm_test_" + tag)).string();
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("registry carries the benchmark defaults")
{
  auto probs = registry();
  REQUIRE(probs.size() == 6);

  ProblemDefinition h = find_problem("homogeneous-1d");
  CHECK(h.paper.nx == 80);
  CHECK(h.paper.quad.n_slab == 16);
  CHECK(h.train_grid == std::array<int, 2>{21, 21});
  CHECK(h.tol_sratio == 1e-8);
  CHECK(h.sigma_a_star() == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(h.fom_kind == FomKind::Direct);

  ProblemDefinition tm = find_problem("two-material-1d");
  CHECK(tm.paper.nx == 120);
  CHECK(tm.train_grid == std::array<int, 2>{101, 21});
  CHECK(tm.tol_sratio == 1e-10);
  CHECK(tm.inflow_left == 5.0);
  CHECK(tm.p_lo[0] == 90.0);
  CHECK(tm.p_hi[1] == 2.0);

  ProblemDefinition vs = find_problem("varying-scattering-1d");
  CHECK(vs.train_grid == std::array<int, 2>{101, 101});
  CHECK(vs.tol_sratio == 1e-14);
  // sigma_s(x; mu) = mu1 + mu2 x: at mu = (95, 97), x = 2 -> 289.
  Eigen::VectorXd mu(2);
  mu << 95.0, 97.0;
  Eigen::VectorXd th = vs.theta_A(mu);
  REQUIRE(th.size() == 3);
  CHECK(th[1] == 95.0);
  CHECK(th[2] == 97.0);

  ProblemDefinition lat = find_problem("lattice-2d");
  CHECK(lat.paper.nx == 70);
  CHECK(lat.paper.quad.n_theta == 40);
  CHECK(lat.p_lo[0] == 0.5);
  CHECK(lat.p_hi[1] == 12.0);
  CHECK(lat.tol_sratio == 1e-9);

  ProblemDefinition line = find_problem("line-source-2d");
  CHECK(line.n_params() == 1);
  CHECK(line.train_grid[0] == 101);
  CHECK(line.test_count == 20);

  ProblemDefinition pin = find_problem("pin-cell-2d");
  CHECK(pin.paper.nx == 80);
  CHECK(pin.paper.quad.n_theta == 30);
  CHECK(pin.train_grid == std::array<int, 2>{19, 19});
  CHECK(pin.tol_sratio == 1e-9);

  CHECK_THROWS_AS(find_problem("no-such-problem"), std::invalid_argument);
}

TEST_CASE("training grids are uniform with the first component fastest")
{
  ProblemDefinition h = find_problem("homogeneous-1d");
  h.train_grid = {3, 2};
  auto train = h.training_set();
  REQUIRE(train.size() == 6);
  CHECK(train[0][0] == 1.0);
  CHECK(train[1][0] == 1.5);
  CHECK(train[2][0] == 2.0);
  CHECK(train[0][1] == 5.0);
  CHECK(train[3][1] == 6.0);
}

TEST_CASE("train subcommand writes the run contract files")
{
  std::string out = tmpdir("smoke");
  int rc = run_cli({"train", "--problem", "homogeneous-1d", "--rom", "g-l1",
                    "--tol-sratio", "1e-6", "--max-m", "6", "--test-count", "4",
                    "--out", out});
  CHECK(rc == 0);
  for (const char* f : {"errors.csv", "greedy_log.csv", "selected_params.csv", "basis.meta",
                        "artifacts.json", "basis.bin"})
    CHECK(fs::exists(out + "/" + f));
  // errors.csv has the fixed column layout.
  std::string first_line = slurp(out + "/errors.csv").substr(0, 200);
  CHECK(first_line.rfind("m,e_l2_train,e_res_train,e_l2_test,e_res_test,spectral_ratio,"
                         "max_cond,t_fom_s,t_sweep_s,t_update_s",
                         0) == 0);
}

TEST_CASE("identical runs produce identical outputs apart from wall times")
{
  std::string out1 = tmpdir("rep1");
  std::string out2 = tmpdir("rep2");
  std::vector<std::string> args = {"train",   "--problem", "two-material-1d",
                                   "--rom",   "pg-res",    "--max-m",
                                   "5",       "--nx",      "24",
                                   "--test-count", "6",    "--seed",
                                   "42",      "--out",     ""};
  args.back() = out1;
  REQUIRE(run_cli(args) == 0);
  args.back() = out2;
  REQUIRE(run_cli(args) == 0);
  CHECK(strip_timings(slurp(out1 + "/errors.csv")) ==
        strip_timings(slurp(out2 + "/errors.csv")));
  CHECK(slurp(out1 + "/selected_params.csv") == slurp(out2 + "/selected_params.csv"));
  CHECK(slurp(out1 + "/artifacts.json") == slurp(out2 + "/artifacts.json"));
}

TEST_CASE("predict reprints the reduced coefficients and lifts on request")
{
  std::string out = tmpdir("predict");
  REQUIRE(run_cli({"train", "--problem", "homogeneous-1d", "--rom", "pg-res", "--max-m",
                   "4", "--test-count", "0", "--out", out}) == 0);
  std::string lift = out + "/lifted.txt";
  CHECK(run_cli({"predict", "--artifacts", out, "--mu", "1.3,5.2", "--lift", lift}) == 0);
  REQUIRE(fs::exists(lift));

  // The lifted vector satisfies the reduced optimality within tolerance:
  // compare against a fresh in-process solve.
  LoadedRun run = load_run(out);
  Eigen::VectorXd mu(2);
  mu << 1.3, 5.2;
  Eigen::VectorXd c = run.rom_solve(mu);
  std::ifstream in(lift);
  Eigen::VectorXd f(run.load_basis().rows());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    in >> f[i];
  CHECK((run.load_basis() * c - f).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("loaded artifacts reproduce the in-process online solve")
{
  ExperimentPlan plan;
  plan.problem_name = "two-material-1d";
  plan.rom = parse_rom_kind("g-res");
  plan.max_m = 5;
  plan.nx_override = 24;
  plan.test_count = 0;
  plan.out_dir = tmpdir("roundtrip");
  ExperimentResult result = run_experiment(plan);
  LoadedRun run = load_run(plan.out_dir);
  Eigen::VectorXd mu(2);
  mu << 97.0, 1.7;
  Eigen::VectorXd c_mem = galerkin_online(result.state.galerkin,
                                          result.problem.theta_A(mu),
                                          result.problem.theta_b(mu));
  Eigen::VectorXd c_disk = run.rom_solve(mu);
  CHECK((c_mem - c_disk).cwiseAbs().maxCoeff() < 1e-13 * c_mem.cwiseAbs().maxCoeff());
}

TEST_CASE("test-set ground truth is solved exactly once per parameter")
{
  ExperimentPlan plan;
  plan.problem_name = "homogeneous-1d";
  plan.rom = parse_rom_kind("g-l1");
  plan.max_m = 4;
  plan.test_count = 7;
  ExperimentResult result = run_experiment(plan);
  CHECK(result.test_fom_solves == 7);
  CHECK(result.rows.size() == 4);
}

TEST_CASE("errors at selected parameters stay at solver precision")
{
  ExperimentPlan plan;
  plan.problem_name = "homogeneous-1d";
  plan.rom = parse_rom_kind("pg-res");
  plan.max_m = 5;
  plan.test_count = 0;
  ExperimentResult result = run_experiment(plan);
  const FomSystem& sys = *result.system;
  for (int j : result.state.selected)
  {
    const Eigen::VectorXd& mu = result.state.cfg.train[j];
    Eigen::VectorXd d;
    Eigen::VectorXd c = result.state.rom_solve(mu, &d);
    Eigen::VectorXd f = solve_direct(sys, mu).f;
    CHECK(sys.norm_h(f - result.state.basis.U() * c) <= 1e-9 * sys.norm_h(f));
  }
}

TEST_CASE("bench-online produces a timing table on a tiny problem")
{
  std::string out = tmpdir("bench");
  int rc = run_cli({"bench-online", "--problem", "homogeneous-1d", "--m", "3", "--n-list",
                    "1k,2k", "--repeat", "3", "--mus", "1.2,5.4", "--out", out});
  CHECK(rc == 0);
  std::string csv = slurp(out + "/timing.csv");
  CHECK(csv.rfind("mu_0,mu_1,n,fom_s,g_l1_s,g_res_s,pg_l1_s,pg_res_s", 0) == 0);
  // one row per (mu, n)
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("dsa-study reports average iteration counts per reduced dimension")
{
  std::string out = tmpdir("dsa");
  int rc = run_cli({"dsa-study", "--problem", "pin-cell-2d", "--m-list", "1,2", "--fine-nx",
                    "8", "--coarse-nx", "4", "--quad", "4,1", "--test-count", "2", "--out",
                    out});
  CHECK(rc == 0);
  std::string csv = slurp(out + "/dsa_iterations.csv");
  CHECK(csv.rfind("m,iters_zero_guess,iters_rom_fine,iters_rom_coarse", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("registry-dump succeeds and unknown subcommands fail")
{
  CHECK(run_cli({"registry-dump", "--problem", "lattice-2d"}) == 0);
  CHECK(run_cli({"no-such-command"}) != 0);
  CHECK(run_cli({"train", "--problem", "no-such-problem", "--rom", "g-l1", "--out",
                 tmpdir("bad")}) != 0);
}
