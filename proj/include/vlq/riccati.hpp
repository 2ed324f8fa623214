#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vlq/grid.hpp"
#include "vlq/lifted.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Raised when R_hat_k = h R_k + Gu' P Gu + h L' P L loses strict positive
/// definiteness, i.e. the discrete strong-regularity condition fails.
class RegularityError : public std::runtime_error {
 public:
  RegularityError(int step, double eig)
      : std::runtime_error("regularity failure at step " + std::to_string(step) +
                           ": min eigenvalue " + std::to_string(eig)),
        step_(step),
        min_eig_(eig) {}
  int step() const { return step_; }
  double min_eig() const { return min_eig_; }

 private:
  int step_;
  double min_eig_;
};

/// Backward-recursion solution: value kernels P_k (symmetric, size
/// (N-k+1)n) with V_k(chi) = 1/2 chi' P_k chi, feedback gains Theta_k
/// (m x (N-k+1)n), and the smallest eigenvalue of R_hat_k / h over k.
struct RiccatiSolution {
  int n = 0;
  int m = 0;
  int N = 0;
  double h = 0.0;
  std::vector<Matrix> P;      // k = 0..N
  std::vector<Matrix> Theta;  // k = 0..N-1
  double regularity_margin = 0.0;
};

RiccatiSolution solve_dp(const LiftedSystem& lifted, const SampledCoefficients& coeffs);

/// Closed-loop value kernels for the fixed feedback u = -Psi chi.
std::vector<Matrix> lyapunov_step(const LiftedSystem& lifted, const SampledCoefficients& coeffs,
                                  const std::vector<Matrix>& Psi);

struct PicardTrace {
  std::vector<double> residuals;            // max over k of spectral-norm update
  std::vector<double> monotonicity_margins; // min over k of lambda_min(P_i - P_{i+1})
  int iterations = 0;
};

RiccatiSolution picard_solve(const LiftedSystem& lifted, const SampledCoefficients& coeffs,
                             double tol, int max_iter, PicardTrace* trace = nullptr);

Vector feedback_control(const RiccatiSolution& sol, int k, const DiscretePath& chi);
double value_at(const RiccatiSolution& sol, int k, const DiscretePath& chi);

/// Enumerated norms of the form induced by P over the unit sup-norm ball.
/// first: max over x in {-1,0,1}^d of |x' P x| (zeros included so the
/// polarization bound below is exact); second: max over sign vertices
/// (sigma, tau) of |sigma' P tau|. The pair always satisfies
/// first <= second <= 2 * first.
std::pair<double, double> bilinear_norms(const Matrix& P);

}  // namespace vlq
