#pragma once

#include <json.hpp>
#include <string>

#include "vlq/grid.hpp"
#include "vlq/problem.hpp"
#include "vlq/riccati.hpp"
#include "vlq/simulate.hpp"
#include "vlq/types.hpp"

namespace vlq {

using Json = nlohmann::ordered_json;

// lossless double <-> string via the C hex-float format
std::string to_hex(double x);
double from_hex(const std::string& s);

Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& M);

Kernel kernel_from_json(const Json& j);
TimeWeight weight_from_json(const Json& j);
ProblemSpec problem_from_json(const Json& j);

/// Top-level run configuration (schema version 1).
struct RunConfig {
  ProblemSpec problem;
  int N = 1;
  std::string solver_method = "dp";  // "dp" | "picard"
  double picard_tol = 1e-10;
  int picard_max_iter = 30;
  std::string driver = "gaussian";  // "gaussian" | "two-point"
  std::int64_t paths = 1000;
  std::uint64_t seed = 0;
  bool exhaustive = false;
  bool oracle_enabled = false;
  int oracle_max_depth = 12;
  std::string out_dir = ".";
};

RunConfig config_from_json(const Json& j);
RunConfig load_config(const std::string& path);

/// Versioned solution document; every number is a hex-float string, so
/// the round trip is bit-exact. P entries store the lower triangle
/// row-major; Theta stores full matrices row-major.
Json riccati_to_json(const RiccatiSolution& sol, const TimeGrid& grid);
RiccatiSolution riccati_from_json(const Json& j, TimeGrid* grid_out = nullptr);

Json sim_report_to_json(const SimReport& rep, bool include_paths = false);

}  // namespace vlq
