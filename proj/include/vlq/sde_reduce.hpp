#pragma once

#include <vector>

#include "vlq/riccati.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Solution curve of the classical matrix Riccati ODE on [0, T].
struct SdeRiccatiCurve {
  std::vector<double> times;
  std::vector<Matrix> Sigma;  // symmetric n x n, Sigma.back() = G
};

/// Backward RK4 integration of
///   Sigma' + Sigma A + A' Sigma + C' Sigma C + Q
///     - (Sigma B + C' Sigma D)(R + D' Sigma D)^{-1}(B' Sigma + D' Sigma C) = 0
/// from Sigma(T) = G, symmetrizing each step.
SdeRiccatiCurve integrate_riccati_ode(const Matrix& A, const Matrix& B, const Matrix& C,
                                      const Matrix& D, const Matrix& Q, const Matrix& R,
                                      const Matrix& G, double T, int steps);

struct ReductionRow {
  int k = 0;
  double s = 0.0;
  double volterra_value = 0.0;
  double ode_value = 0.0;
  double abs_err = 0.0;
};

struct ReductionTable {
  std::vector<ReductionRow> rows;
  double max_err = 0.0;
};

/// Compares 1/2 chi_k' P_k chi_k (constant path x repeated) against
/// 1/2 x' Sigma(s_k) x. `curve.times` must contain every grid node, so
/// pass an ODE step count that is a multiple of the grid N.
ReductionTable compare_with_volterra(const RiccatiSolution& sol, const SdeRiccatiCurve& curve,
                                     const Vector& x);

}  // namespace vlq
