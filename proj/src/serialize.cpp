#include "vlq/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace vlq {

std::string to_hex(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", x);
  return buf;
}

double from_hex(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw std::invalid_argument("bad numeric literal: " + s);
  return v;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw std::invalid_argument("matrix must be a non-empty array of rows");
  const auto rows = j.size(), cols = j[0].size();
  Matrix M(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j[r].size() != cols) throw std::invalid_argument("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) M(r, c) = j[r][c].get<double>();
  }
  return M;
}

Json matrix_to_json(const Matrix& M) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(row);
  }
  return rows;
}

Kernel kernel_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return Kernel::constant(matrix_from_json(j.at("value")));
  if (kind == "separable-sum") {
    std::vector<SeparableTerm> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({matrix_from_json(t.at("coeff")), t.at("f_poly").get<std::vector<double>>(),
                       t.at("g_poly").get<std::vector<double>>()});
    return Kernel::separable(std::move(terms));
  }
  if (kind == "convolution-exponential-sum") {
    std::vector<ExponentialTerm> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({matrix_from_json(t.at("coeff")), t.at("rate").get<double>()});
    return Kernel::exponential(std::move(terms));
  }
  if (kind == "convolution-fractional") {
    double clamp = j.value("diagonal_clamp", 1e-8);
    return Kernel::fractional(j.at("alpha").get<double>(), matrix_from_json(j.at("scale")), clamp);
  }
  if (kind == "tabulated") {
    std::vector<Matrix> values;
    for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v));
    return Kernel::tabulated(j.at("s_nodes").get<std::vector<double>>(),
                             j.at("tau_nodes").get<std::vector<double>>(), std::move(values));
  }
  throw std::invalid_argument("unknown kernel kind: " + kind);
}

TimeWeight weight_from_json(const Json& j) {
  if (j.is_array()) return TimeWeight::constant(matrix_from_json(j));
  if (j.contains("constant")) return TimeWeight::constant(matrix_from_json(j.at("constant")));
  std::vector<Matrix> values;
  for (const auto& v : j.at("values")) values.push_back(matrix_from_json(v));
  return TimeWeight::tabulated(j.at("times").get<std::vector<double>>(), std::move(values));
}

ProblemSpec problem_from_json(const Json& j) {
  ProblemSpec spec;
  spec.n = j.at("n").get<int>();
  spec.m = j.at("m").get<int>();
  spec.t0 = j.at("t0").get<double>();
  spec.T = j.at("T").get<double>();
  spec.A = kernel_from_json(j.at("A"));
  spec.B = kernel_from_json(j.at("B"));
  spec.C = kernel_from_json(j.at("C"));
  spec.D = kernel_from_json(j.at("D"));
  spec.Q = weight_from_json(j.at("Q"));
  spec.R = weight_from_json(j.at("R"));
  spec.G = matrix_from_json(j.at("G"));
  const auto& fp = j.at("free_path");
  spec.free_path.times = fp.at("times").get<std::vector<double>>();
  for (const auto& v : fp.at("values")) {
    std::vector<double> entries = v.get<std::vector<double>>();
    spec.free_path.values.push_back(Eigen::Map<Vector>(entries.data(), entries.size()));
  }
  return spec;
}

RunConfig config_from_json(const Json& j) {
  if (j.value("schema", 0) != 1) throw std::invalid_argument("unsupported config schema version");
  RunConfig cfg;
  cfg.problem = problem_from_json(j.at("problem"));
  cfg.N = j.at("grid").at("N").get<int>();
  if (cfg.N < 1) throw std::invalid_argument("grid.N must be at least 1");
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    cfg.solver_method = s.value("method", "dp");
    if (cfg.solver_method != "dp" && cfg.solver_method != "picard")
      throw std::invalid_argument("solver.method must be dp or picard");
    cfg.picard_tol = s.value("tol", cfg.picard_tol);
    cfg.picard_max_iter = s.value("max_iter", cfg.picard_max_iter);
  }
  if (j.contains("simulate")) {
    const auto& s = j.at("simulate");
    cfg.driver = s.value("driver", "gaussian");
    if (cfg.driver != "gaussian" && cfg.driver != "two-point")
      throw std::invalid_argument("simulate.driver must be gaussian or two-point");
    cfg.paths = s.value("paths", cfg.paths);
    cfg.seed = s.value("seed", cfg.seed);
    cfg.exhaustive = s.value("exhaustive", false);
  }
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    cfg.oracle_enabled = o.value("enabled", false);
    cfg.oracle_max_depth = o.value("max_depth", 12);
    if (cfg.oracle_enabled && cfg.N > cfg.oracle_max_depth)
      throw std::invalid_argument("oracle runs need N <= oracle.max_depth");
  }
  if (j.contains("outputs")) cfg.out_dir = j.at("outputs").value("dir", ".");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  Json j = Json::parse(in);  // throws with byte position on malformed input
  return config_from_json(j);
}

namespace {

Json lower_triangle_hex(const Matrix& P) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < P.rows(); ++r)
    for (Eigen::Index c = 0; c <= r; ++c) out.push_back(to_hex(P(r, c)));
  return out;
}

Matrix lower_triangle_from_hex(const Json& j, Eigen::Index d) {
  Matrix P(d, d);
  std::size_t idx = 0;
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c <= r; ++c) {
      double v = from_hex(j.at(idx++).get<std::string>());
      P(r, c) = v;
      P(c, r) = v;
    }
  return P;
}

}  // namespace

Json riccati_to_json(const RiccatiSolution& sol, const TimeGrid& grid) {
  Json j;
  j["version"] = 1;
  j["n"] = sol.n;
  j["m"] = sol.m;
  j["grid"] = {{"t0", to_hex(grid.t0)}, {"T", to_hex(grid.T)}, {"N", grid.N}};
  Json P = Json::array();
  for (const auto& Pk : sol.P) P.push_back(lower_triangle_hex(Pk));
  j["P"] = std::move(P);
  Json Theta = Json::array();
  for (const auto& Tk : sol.Theta) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < Tk.rows(); ++r)
      for (Eigen::Index c = 0; c < Tk.cols(); ++c) rows.push_back(to_hex(Tk(r, c)));
    Theta.push_back(std::move(rows));
  }
  j["Theta"] = std::move(Theta);
  j["regularity_margin"] = to_hex(sol.regularity_margin);
  return j;
}

RiccatiSolution riccati_from_json(const Json& j, TimeGrid* grid_out) {
  if (j.value("version", 0) != 1) throw std::invalid_argument("unsupported solution version");
  RiccatiSolution sol;
  sol.n = j.at("n").get<int>();
  sol.m = j.at("m").get<int>();
  sol.N = j.at("grid").at("N").get<int>();
  const double t0 = from_hex(j.at("grid").at("t0").get<std::string>());
  const double T = from_hex(j.at("grid").at("T").get<std::string>());
  sol.h = (T - t0) / sol.N;
  if (grid_out) *grid_out = build_grid(t0, T, sol.N);
  for (int k = 0; k <= sol.N; ++k)
    sol.P.push_back(lower_triangle_from_hex(j.at("P").at(k), (sol.N - k + 1) * sol.n));
  for (int k = 0; k < sol.N; ++k) {
    const auto& flat = j.at("Theta").at(k);
    const Eigen::Index cols = (sol.N - k + 1) * sol.n;
    Matrix Tk(sol.m, cols);
    std::size_t idx = 0;
    for (Eigen::Index r = 0; r < sol.m; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) Tk(r, c) = from_hex(flat.at(idx++).get<std::string>());
    sol.Theta.push_back(std::move(Tk));
  }
  sol.regularity_margin = from_hex(j.at("regularity_margin").get<std::string>());
  return sol;
}

Json sim_report_to_json(const SimReport& rep, bool include_paths) {
  Json j;
  j["paths"] = rep.paths;
  j["cost_mean"] = to_hex(rep.cost_mean);
  j["cost_stderr"] = to_hex(rep.cost_stderr);
  j["terminal_second_moment"] = to_hex(rep.terminal_second_moment);
  Json cn = Json::array();
  for (double c : rep.control_norms) cn.push_back(to_hex(c));
  j["control_norms"] = std::move(cn);
  if (include_paths) {
    Json pc = Json::array();
    for (double c : rep.per_path_costs) pc.push_back(to_hex(c));
    j["per_path_costs"] = std::move(pc);
  }
  return j;
}

}  // namespace vlq
