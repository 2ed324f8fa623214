#pragma once

#include <vector>

#include "vlq/problem.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Uniform grid s_k = t0 + k h, k = 0..N, with s_N pinned to T exactly.
struct TimeGrid {
  double t0 = 0.0;
  double T = 0.0;
  int N = 0;
  double h = 0.0;
  std::vector<double> nodes;
};

TimeGrid build_grid(double t0, double T, int N);

/// Grid path starting at step k: stacks x(s_k), ..., x(s_N) block-wise.
struct DiscretePath {
  int start = 0;
  int n = 0;
  Vector values;

  int blocks() const { return static_cast<int>(values.size()) / n; }
  Eigen::VectorBlock<const Vector> block(int j) const {
    return values.segment((j - start) * n, n);
  }
  // sup norm: max over blocks of the entrywise max magnitude
  double sup_norm() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
};

DiscretePath discretize_path(const SampledPath& x, const TimeGrid& grid, int k);

// drop the first block: the restriction map from start k to start k+1
DiscretePath restrict_path(const DiscretePath& path);

/// All kernel/weight data tabulated on the grid. Kernel samples for source
/// step k are stored stacked over targets j = k..N, so A(s_j, s_k) is
/// Astack[k].middleRows((j - k) * n, n).
struct SampledCoefficients {
  int n = 0;
  int m = 0;
  int N = 0;
  std::vector<Matrix> Astack, Bstack, Cstack, Dstack;  // index k = 0..N-1
  std::vector<Matrix> Q, R;                            // at s_k, k = 0..N-1
  Matrix G;

  Eigen::Block<const Matrix> A(int j, int k) const { return Astack[k].middleRows((j - k) * n, n); }
  Eigen::Block<const Matrix> B(int j, int k) const { return Bstack[k].middleRows((j - k) * n, n); }
  Eigen::Block<const Matrix> C(int j, int k) const { return Cstack[k].middleRows((j - k) * n, n); }
  Eigen::Block<const Matrix> D(int j, int k) const { return Dstack[k].middleRows((j - k) * n, n); }
};

SampledCoefficients sample_spec(const ProblemSpec& spec, const TimeGrid& grid);

}  // namespace vlq
