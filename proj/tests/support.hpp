#pragma once

#include <random>

#include "vlq/grid.hpp"
#include "vlq/lifted.hpp"
#include "vlq/problem.hpp"

namespace vlq::testing {

inline Matrix random_matrix(std::mt19937_64& rng, int rows, int cols, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Matrix M(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) M(r, c) = dist(rng);
  return M;
}

inline Matrix random_psd(std::mt19937_64& rng, int d) {
  Matrix M = random_matrix(rng, d, d);
  return M.transpose() * M;
}

struct Instance {
  ProblemSpec spec;
  TimeGrid grid;
  SampledCoefficients coeffs;
  LiftedSystem lifted;
  DiscretePath chi0;
};

/// Random constant-kernel instance satisfying the standard positivity
/// assumptions: kernel entries uniform in [-1,1], R = I + diag(U[0,1]),
/// Q and G random PSD, constant free path.
inline Instance random_h4_instance(std::mt19937_64& rng, int n, int m, int N, double T = 1.0,
                                   bool zero_B = false) {
  Instance inst;
  ProblemSpec& spec = inst.spec;
  spec.n = n;
  spec.m = m;
  spec.t0 = 0.0;
  spec.T = T;
  spec.A = Kernel::constant(random_matrix(rng, n, n));
  spec.B = Kernel::constant(zero_B ? Matrix::Zero(n, m) : random_matrix(rng, n, m));
  spec.C = Kernel::constant(random_matrix(rng, n, n));
  spec.D = Kernel::constant(random_matrix(rng, n, m));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Matrix R = Matrix::Identity(m, m);
  for (int i = 0; i < m; ++i) R(i, i) += unit(rng);
  spec.Q = TimeWeight::constant(random_psd(rng, n));
  spec.R = TimeWeight::constant(R);
  spec.G = random_psd(rng, n);
  spec.free_path.times = {0.0, T};
  Vector x = random_matrix(rng, n, 1);
  spec.free_path.values = {x, x};
  inst.grid = build_grid(0.0, T, N);
  inst.coeffs = sample_spec(spec, inst.grid);
  inst.lifted = build_lifted(inst.coeffs, inst.grid);
  inst.chi0 = discretize_path(spec.free_path, inst.grid, 0);
  return inst;
}

}  // namespace vlq::testing
