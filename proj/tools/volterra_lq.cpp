// volterra-lq: solve / simulate / validate / reduce-sde driver.
// Exit codes: 0 success, 1 usage or config error, 2 solver regularity
// failure, 3 validation failure.
#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "vlq/grid.hpp"
#include "vlq/lifted.hpp"
#include "vlq/oracle.hpp"
#include "vlq/problem.hpp"
#include "vlq/riccati.hpp"
#include "vlq/sde_reduce.hpp"
#include "vlq/serialize.hpp"
#include "vlq/simulate.hpp"

namespace fs = std::filesystem;
using namespace vlq;

namespace {

struct Prepared {
  RunConfig cfg;
  TimeGrid grid;
  SampledCoefficients coeffs;
  LiftedSystem lifted;
  DiscretePath chi0;
};

Prepared prepare(const std::string& config_path, const std::string& out_override) {
  Prepared p;
  p.cfg = load_config(config_path);
  if (!out_override.empty()) p.cfg.out_dir = out_override;
  // shape/domain check only; positivity failures surface through the
  // solvers (exit 2) or the validation suite (exit 3)
  auto report = validate_spec(p.cfg.problem, ValidationMode::ConvexOnly);
  if (!report.ok()) {
    std::string msg = "problem spec invalid:";
    for (const auto& v : report.violations) msg += "\n  " + v.what;
    throw std::invalid_argument(msg);
  }
  p.grid = build_grid(p.cfg.problem.t0, p.cfg.problem.T, p.cfg.N);
  p.coeffs = sample_spec(p.cfg.problem, p.grid);
  p.lifted = build_lifted(p.coeffs, p.grid);
  p.chi0 = discretize_path(p.cfg.problem.free_path, p.grid, 0);
  fs::create_directories(p.cfg.out_dir);
  return p;
}

void write_json(const fs::path& path, const Json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

RiccatiSolution run_solver(const Prepared& p, int* picard_iters, double* picard_residual) {
  if (p.cfg.solver_method == "picard") {
    PicardTrace trace;
    RiccatiSolution sol =
        picard_solve(p.lifted, p.coeffs, p.cfg.picard_tol, p.cfg.picard_max_iter, &trace);
    if (picard_iters) *picard_iters = trace.iterations;
    if (picard_residual) *picard_residual = trace.residuals.empty() ? 0.0 : trace.residuals.back();
    return sol;
  }
  return solve_dp(p.lifted, p.coeffs);
}

int cmd_solve(const std::string& config_path, const std::string& out_override) {
  Prepared p = prepare(config_path, out_override);
  int iters = 0;
  double residual = 0.0;
  RiccatiSolution sol = run_solver(p, &iters, &residual);
  write_json(fs::path(p.cfg.out_dir) / "riccati.json", riccati_to_json(sol, p.grid));
  Json summary;
  summary["value_at_start"] = to_hex(value_at(sol, 0, p.chi0));
  summary["regularity_margin"] = to_hex(sol.regularity_margin);
  if (p.cfg.solver_method == "picard") {
    summary["picard_iterations"] = iters;
    summary["picard_residual"] = to_hex(residual);
  }
  write_json(fs::path(p.cfg.out_dir) / "summary.json", summary);
  std::ofstream csv(fs::path(p.cfg.out_dir) / "riccati_summary.csv");
  csv << "k,s_k,trace_P,theta_norm\n";
  for (int k = 0; k <= sol.N; ++k) {
    csv << k << "," << p.grid.nodes[k] << "," << sol.P[k].trace() << ",";
    csv << (k < sol.N ? sol.Theta[k].norm() : 0.0) << "\n";
  }
  std::cout << "value_at_start " << value_at(sol, 0, p.chi0) << ", regularity_margin "
            << sol.regularity_margin << "\n";
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& out_override, int threads) {
  Prepared p = prepare(config_path, out_override);
  RiccatiSolution sol = run_solver(p, nullptr, nullptr);
  if (p.cfg.paths < 1 && !p.cfg.exhaustive) throw std::invalid_argument("paths must be positive");
  NoiseDriver driver;
  driver.kind =
      p.cfg.driver == "two-point" ? NoiseDriver::Kind::TwoPoint : NoiseDriver::Kind::Gaussian;
  driver.seed = p.cfg.seed;
  bool exhaustive = p.cfg.exhaustive && p.cfg.N <= 12;
  if (exhaustive) driver.kind = NoiseDriver::Kind::TwoPoint;
  SimReport rep = simulate_closed_loop(p.coeffs, p.lifted, p.grid, sol.Theta, p.chi0, driver,
                                       p.cfg.paths, exhaustive, threads);
  write_json(fs::path(p.cfg.out_dir) / "sim_report.json", sim_report_to_json(rep));
  std::ofstream csv(fs::path(p.cfg.out_dir) / "path_costs.csv");
  csv << "path,cost\n";
  for (std::size_t i = 0; i < rep.per_path_costs.size(); ++i)
    csv << i << "," << to_hex(rep.per_path_costs[i]) << "\n";
  std::cout << "cost_mean " << rep.cost_mean << " +- " << rep.cost_stderr << " over " << rep.paths
            << " paths\n";
  return 0;
}

int cmd_validate(const std::string& config_path, const std::string& out_override) {
  Prepared p = prepare(config_path, out_override);
  if (!p.cfg.oracle_enabled)
    throw std::invalid_argument("validate requires oracle.enabled = true in the config");
  if (p.cfg.N > 12) throw std::invalid_argument("validate requires N <= 12");

  Json checks = Json::array();
  bool all_pass = true;
  auto add_check = [&](const std::string& name, double residual, double threshold) {
    bool pass = residual <= threshold;
    all_pass = all_pass && pass;
    checks.push_back({{"name", name},
                      {"residual", residual},
                      {"threshold", threshold},
                      {"pass", pass}});
  };

  ScenarioTree tree{p.cfg.N, p.grid.h};
  auto finish = [&](bool ok) {
    Json out;
    out["checks"] = checks;
    out["all_pass"] = ok;
    write_json(fs::path(p.cfg.out_dir) / "validation.json", out);
    for (const auto& c : checks)
      std::cout << (c["pass"].get<bool>() ? "pass " : "FAIL ") << c["name"].get<std::string>()
                << " residual " << c["residual"].get<double>() << " threshold "
                << c["threshold"].get<double>() << "\n";
    return ok ? 0 : 3;
  };

  RiccatiSolution sol;
  try {
    sol = solve_dp(p.lifted, p.coeffs);
  } catch (const RegularityError& e) {
    add_check("discrete_strong_regularity", -e.min_eig(), 0.0);
    try {
      solve_adapted_qp(p.coeffs, p.grid, tree, p.chi0);
      add_check("qp_convexity", 0.0, 0.0);
    } catch (const std::runtime_error&) {
      add_check("qp_convexity", 1.0, 0.0);
    }
    return finish(false);
  }

  double dp_value = value_at(sol, 0, p.chi0);
  try {
    QpSolution qp = solve_adapted_qp(p.coeffs, p.grid, tree, p.chi0);
    add_check("dp_vs_qp_value", std::abs(dp_value - qp.value), 1e-8 * (1.0 + std::abs(dp_value)));
  } catch (const std::runtime_error& e) {
    add_check("qp_convexity", 1.0, 0.0);
  }

  AdaptedControl ubar = replay_feedback(p.lifted, sol.Theta, p.chi0, tree);
  std::vector<NodeField> chi = propagate_tree(p.lifted, p.chi0, ubar, tree);
  BsvieSystem bsys = solve_optimality_bsvies(p.coeffs, p.grid, tree, chi, ubar);
  double unorm = 0.0;
  for (const auto& level : ubar.u)
    for (const auto& u : level) unorm = std::max(unorm, u.cwiseAbs().maxCoeff());
  StationarityReport st = check_stationarity(bsys, p.coeffs, ubar);
  add_check("stationarity_direct", st.direct.max_residual, 1e-8 * (1.0 + unorm));
  add_check("stationarity_type3_bridge", st.form_gap, 1e-12 * (1.0 + unorm));

  // martingale-decomposition condition of the adjoint field
  double m_res = 0.0;
  for (int j = 0; j < tree.N; ++j) {
    NodeField w = bsys.Y[j];
    for (int l = j - 1; l >= 0; --l) w = tree_project(w, l);
    for (int pth = 0; pth < tree.leaves(); ++pth) {
      Vector rec = w[0];
      for (int r = 0; r < j; ++r)
        rec += bsys.Z[j][r][ScenarioTree::ancestor(pth, r)] * tree.xi(pth, r);
      m_res = std::max(m_res,
                       (rec - bsys.Y[j][ScenarioTree::ancestor(pth, j)]).cwiseAbs().maxCoeff());
    }
  }
  add_check("m_solution_condition", m_res, 1e-12 * (1.0 + unorm));

  ResidualReport dual = check_dual_representation(bsys, sol, tree, chi);
  add_check("dual_representation", dual.max_residual, 1e-8);

  PicardTrace trace;
  RiccatiSolution psol = picard_solve(p.lifted, p.coeffs, 1e-10, 60, &trace);
  double mono = 0.0;
  for (double mg : trace.monotonicity_margins) mono = std::min(mono, mg);
  add_check("picard_monotonicity", -mono, 1e-10);
  double pd = 0.0;
  for (int k = 0; k <= sol.N; ++k)
    pd = std::max(pd, (psol.P[k] - sol.P[k]).cwiseAbs().maxCoeff());
  add_check("picard_vs_dp", pd, 1e-7);

  if (p.cfg.problem.B.is_zero()) {
    double col = 0.0;
    for (int k = 0; k < sol.N; ++k)
      if (sol.Theta[k].cols() > p.coeffs.n)
        col = std::max(col, sol.Theta[k].rightCols(sol.Theta[k].cols() - p.coeffs.n)
                                .cwiseAbs()
                                .maxCoeff());
    add_check("markovian_feedback_columns_zero", col, 1e-12);
  }

  NoiseDriver driver;
  driver.kind = NoiseDriver::Kind::TwoPoint;
  driver.seed = p.cfg.seed;
  SimReport rep =
      simulate_closed_loop(p.coeffs, p.lifted, p.grid, sol.Theta, p.chi0, driver, 0, true);
  add_check("exhaustive_sim_matches_value", std::abs(rep.cost_mean - dp_value),
            1e-10 * (1.0 + std::abs(dp_value)));

  return finish(all_pass);
}

int cmd_reduce_sde(const std::string& config_path, const std::string& out_override) {
  Prepared p = prepare(config_path, out_override);
  const ProblemSpec& spec = p.cfg.problem;
  for (const Kernel* k : {&spec.A, &spec.B, &spec.C, &spec.D})
    if (k->kind() != KernelKind::Constant)
      throw std::invalid_argument(
          "reduce-sde needs constant kernels: the classical comparison only applies when the "
          "dynamics have no memory");
  if (!spec.Q.is_constant() || !spec.R.is_constant())
    throw std::invalid_argument("reduce-sde needs constant weights");

  auto run = [&](int N) {
    TimeGrid grid = build_grid(spec.t0, spec.T, N);
    SampledCoefficients coeffs = sample_spec(spec, grid);
    LiftedSystem lifted = build_lifted(coeffs, grid);
    RiccatiSolution sol = solve_dp(lifted, coeffs);
    int steps = N * std::max(1, (2000 + N - 1) / N);
    SdeRiccatiCurve curve = integrate_riccati_ode(
        spec.A.constant_value(), spec.B.constant_value(), spec.C.constant_value(),
        spec.D.constant_value(), spec.Q.at(spec.t0), spec.R.at(spec.t0), spec.G,
        spec.T - spec.t0, steps);
    for (auto& t : curve.times) t += spec.t0;
    return compare_with_volterra(sol, curve, spec.free_path.at(spec.t0));
  };
  ReductionTable coarse = run(p.cfg.N);
  ReductionTable fine = run(2 * p.cfg.N);

  auto dump = [&](const fs::path& path, const ReductionTable& t) {
    std::ofstream csv(path);
    csv << "k,s_k,volterra_value,ode_value,abs_err\n";
    for (const auto& r : t.rows)
      csv << r.k << "," << r.s << "," << r.volterra_value << "," << r.ode_value << ","
          << r.abs_err << "\n";
  };
  dump(fs::path(p.cfg.out_dir) / "reduction.csv", coarse);
  dump(fs::path(p.cfg.out_dir) / "reduction_fine.csv", fine);
  Json summary;
  summary["max_err_coarse"] = coarse.max_err;
  summary["max_err_fine"] = fine.max_err;
  bool exact = coarse.max_err < 1e-13 && fine.max_err < 1e-13;
  if (exact)
    summary["ratio"] = "exact";
  else
    summary["ratio"] = coarse.max_err / fine.max_err;
  write_json(fs::path(p.cfg.out_dir) / "reduction_summary.json", summary);
  std::cout << "max_err N=" << p.cfg.N << ": " << coarse.max_err << ", N=" << 2 * p.cfg.N << ": "
            << fine.max_err << ", ratio "
            << (exact ? std::string("exact") : std::to_string(coarse.max_err / fine.max_err))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear-quadratic control of stochastic Volterra equations"};
  app.require_subcommand(1);
  std::string config_path, out_dir;
  int threads = 1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config JSON file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--threads", threads, "worker threads for simulation");
  };
  auto* solve = app.add_subcommand("solve", "solve the Riccati recursion and write the solution");
  auto* simulate = app.add_subcommand("simulate", "closed-loop Monte Carlo under the feedback law");
  auto* validate = app.add_subcommand("validate", "run the exact-oracle identity suite");
  auto* reduce = app.add_subcommand("reduce-sde", "compare against the classical Riccati ODE");
  for (auto* sub : {solve, simulate, validate, reduce}) add_common(sub);

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return cmd_solve(config_path, out_dir);
    if (simulate->parsed()) return cmd_simulate(config_path, out_dir, threads);
    if (validate->parsed()) return cmd_validate(config_path, out_dir);
    if (reduce->parsed()) return cmd_reduce_sde(config_path, out_dir);
  } catch (const RegularityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
