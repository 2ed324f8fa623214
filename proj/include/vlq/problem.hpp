#pragma once

#include <string>
#include <vector>

#include "vlq/kernel.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Continuous-time LQ problem for a controlled linear Volterra state
/// equation: kernels A, C (n x n) and B, D (n x m) on the lower triangle
/// t0 <= tau <= s <= T, weights Q(s), R(s), terminal G, and the free path.
struct ProblemSpec {
  int n = 0;
  int m = 0;
  double t0 = 0.0;
  double T = 0.0;
  Kernel A, B, C, D;
  TimeWeight Q, R;
  Matrix G;
  SampledPath free_path;

  // Kernel value with lower-triangle domain check; `which` in {'A','B','C','D'}.
  Matrix eval_kernel(char which, double s, double tau) const;
};

enum class ValidationMode { StrictH4, ConvexOnly };

struct Violation {
  std::string what;
  double location = 0.0;
  double margin = 0.0;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;
  double r_margin = 0.0;  // min eigenvalue of R over the sample set
  double q_margin = 0.0;
  double g_margin = 0.0;

  bool ok() const { return violations.empty(); }
};

/// Checks shapes/domain always; in StrictH4 mode additionally checks
/// R(s) uniformly positive and Q(s), G positive semidefinite on a uniform
/// sample of [t0, T].
ValidationReport validate_spec(const ProblemSpec& spec, ValidationMode mode, int samples = 65);

}  // namespace vlq
