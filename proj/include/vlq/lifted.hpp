#pragma once

#include <vector>

#include "vlq/grid.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// One-step matrices of the lifted forecast dynamics
///   chi_{k+1} = F_k chi_k + Gu_k u_k + (H_k chi_k + L_k u_k) xi_k,
/// where chi_k in R^{(N-k+1) n} stacks the forecasts of X(s_j) made at s_k
/// for j = k..N. F_k drops the first block and adds the drift update,
/// so dimensions shrink by n each step.
struct LiftedSystem {
  int n = 0;
  int m = 0;
  int N = 0;
  double h = 0.0;
  std::vector<Matrix> F;   // (N-k)n x (N-k+1)n
  std::vector<Matrix> Gu;  // (N-k)n x m
  std::vector<Matrix> H;   // (N-k)n x (N-k+1)n, only the first n columns nonzero
  std::vector<Matrix> L;   // (N-k)n x m

  int dim(int k) const { return (N - k + 1) * n; }
};

LiftedSystem build_lifted(const SampledCoefficients& coeffs, const TimeGrid& grid);

}  // namespace vlq
