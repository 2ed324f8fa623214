#include "vlq/riccati.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace vlq {

namespace {

Matrix symmetrize(const Matrix& P) { return 0.5 * (P + P.transpose()); }

// R_hat and S of the step-k quadratic in u given the next kernel P.
void step_terms(const LiftedSystem& sys, const SampledCoefficients& coeffs, int k, const Matrix& P,
                Matrix& R_hat, Matrix& S) {
  const double h = sys.h;
  R_hat = h * coeffs.R[k] + sys.Gu[k].transpose() * P * sys.Gu[k] +
          h * sys.L[k].transpose() * P * sys.L[k];
  R_hat = symmetrize(R_hat);
  S = sys.Gu[k].transpose() * P * sys.F[k] + h * sys.L[k].transpose() * P * sys.H[k];
}

}  // namespace

RiccatiSolution solve_dp(const LiftedSystem& sys, const SampledCoefficients& coeffs) {
  RiccatiSolution sol;
  sol.n = sys.n;
  sol.m = sys.m;
  sol.N = sys.N;
  sol.h = sys.h;
  sol.P.resize(sys.N + 1);
  sol.Theta.resize(sys.N);
  sol.P[sys.N] = coeffs.G;
  sol.regularity_margin = std::numeric_limits<double>::infinity();
  const double h = sys.h;
  for (int k = sys.N - 1; k >= 0; --k) {
    Matrix R_hat, S;
    step_terms(sys, coeffs, k, sol.P[k + 1], R_hat, S);
    Eigen::SelfAdjointEigenSolver<Matrix> es(R_hat);
    const double eig = es.eigenvalues().minCoeff();
    if (eig <= 0.0) throw RegularityError(k, eig);
    sol.regularity_margin = std::min(sol.regularity_margin, eig / h);
    Eigen::LLT<Matrix> llt(R_hat);
    sol.Theta[k] = -llt.solve(S);
    Matrix P = sys.F[k].transpose() * sol.P[k + 1] * sys.F[k] +
               h * sys.H[k].transpose() * sol.P[k + 1] * sys.H[k] + S.transpose() * sol.Theta[k];
    P.topLeftCorner(sys.n, sys.n) += h * coeffs.Q[k];
    sol.P[k] = symmetrize(P);
  }
  return sol;
}

std::vector<Matrix> lyapunov_step(const LiftedSystem& sys, const SampledCoefficients& coeffs,
                                  const std::vector<Matrix>& Psi) {
  std::vector<Matrix> P(sys.N + 1);
  P[sys.N] = coeffs.G;
  const double h = sys.h;
  for (int k = sys.N - 1; k >= 0; --k) {
    Matrix Fc = sys.F[k] - sys.Gu[k] * Psi[k];
    Matrix Hc = sys.H[k] - sys.L[k] * Psi[k];
    Matrix Pk = Fc.transpose() * P[k + 1] * Fc + h * Hc.transpose() * P[k + 1] * Hc +
                h * Psi[k].transpose() * coeffs.R[k] * Psi[k];
    Pk.topLeftCorner(sys.n, sys.n) += h * coeffs.Q[k];
    P[k] = symmetrize(Pk);
  }
  return P;
}

RiccatiSolution picard_solve(const LiftedSystem& sys, const SampledCoefficients& coeffs,
                             double tol, int max_iter, PicardTrace* trace) {
  std::vector<Matrix> Psi(sys.N);
  for (int k = 0; k < sys.N; ++k) Psi[k] = Matrix::Zero(sys.m, sys.dim(k));
  std::vector<Matrix> P_prev;
  RiccatiSolution sol;
  sol.n = sys.n;
  sol.m = sys.m;
  sol.N = sys.N;
  sol.h = sys.h;
  sol.Theta.resize(sys.N);
  for (int it = 0; it < max_iter; ++it) {
    std::vector<Matrix> P = lyapunov_step(sys, coeffs, Psi);
    sol.regularity_margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < sys.N; ++k) {
      Matrix R_hat, S;
      step_terms(sys, coeffs, k, P[k + 1], R_hat, S);
      Eigen::SelfAdjointEigenSolver<Matrix> es(R_hat);
      const double eig = es.eigenvalues().minCoeff();
      if (eig <= 0.0) throw RegularityError(k, eig);
      sol.regularity_margin = std::min(sol.regularity_margin, eig / sys.h);
      Psi[k] = Eigen::LLT<Matrix>(R_hat).solve(S);
      sol.Theta[k] = -Psi[k];
    }
    double residual = std::numeric_limits<double>::infinity();
    if (!P_prev.empty()) {
      residual = 0.0;
      double margin = std::numeric_limits<double>::infinity();
      for (int k = 0; k <= sys.N; ++k) {
        Matrix diff = P_prev[k] - P[k];
        Eigen::SelfAdjointEigenSolver<Matrix> es(diff);
        const auto& ev = es.eigenvalues();
        residual = std::max(residual, std::max(std::abs(ev.minCoeff()), std::abs(ev.maxCoeff())));
        margin = std::min(margin, ev.minCoeff());
      }
      if (trace) {
        trace->residuals.push_back(residual);
        trace->monotonicity_margins.push_back(margin);
      }
    }
    P_prev = std::move(P);
    if (trace) trace->iterations = it + 1;
    if (residual <= tol) {
      sol.P = std::move(P_prev);
      return sol;
    }
  }
  throw std::runtime_error("Picard iteration did not converge in " + std::to_string(max_iter) +
                           " iterations");
}

Vector feedback_control(const RiccatiSolution& sol, int k, const DiscretePath& chi) {
  if (chi.start != k) throw std::invalid_argument("path start index must equal the step");
  if (chi.values.size() != sol.Theta[k].cols())
    throw std::invalid_argument("path dimension mismatch with feedback gain");
  return sol.Theta[k] * chi.values;
}

double value_at(const RiccatiSolution& sol, int k, const DiscretePath& chi) {
  if (k < 0 || k > sol.N) throw std::invalid_argument("step outside the grid");
  if (chi.values.size() != sol.P[k].rows())
    throw std::invalid_argument("path dimension mismatch with value kernel");
  return 0.5 * chi.values.dot(sol.P[k] * chi.values);
}

namespace {

// max of |x' P x| over x in {-1, 0, 1}^d by backtracking; w carries P x
// for the coordinates assigned so far. Zeros must be included: polarization
// writes sigma' P tau as a difference of two such forms, which is what makes
// the factor-two bound against the bilinear norm exact. Vertex-only
// enumeration would undershoot whenever P has negative diagonal mass.
void quad_max_rec(const Matrix& P, Vector& x, Vector& w, int i, double& best) {
  const int d = static_cast<int>(P.rows());
  if (i == d) {
    best = std::max(best, std::abs(x.dot(w)));
    return;
  }
  for (double v : {0.0, 1.0, -1.0}) {
    x(i) = v;
    if (v != 0.0) w += v * P.col(i);
    quad_max_rec(P, x, w, i + 1, best);
    if (v != 0.0) w -= v * P.col(i);
  }
  x(i) = 0.0;
}

}  // namespace

std::pair<double, double> bilinear_norms(const Matrix& P) {
  const int d = static_cast<int>(P.rows());
  if (P.cols() != d) throw std::invalid_argument("bilinear norms need a square matrix");
  if (d > 14) throw std::invalid_argument("dimension too large for sign enumeration; sample instead");
  if (d == 0) return {0.0, 0.0};
  double quad = 0.0;
  Vector x = Vector::Zero(d), w = Vector::Zero(d);
  quad_max_rec(P, x, w, 0, quad);
  double bilin = 0.0;
  Vector sigma(d);
  // bilinear part is affine per argument, so sign vertices are exact;
  // fix the first sign by symmetry and use max_tau |sigma' P tau| = ||P sigma||_1
  const std::uint64_t half = 1ull << (d - 1);
  for (std::uint64_t bits = 0; bits < half; ++bits) {
    sigma(0) = 1.0;
    for (int i = 1; i < d; ++i) sigma(i) = (bits >> (i - 1)) & 1 ? 1.0 : -1.0;
    bilin = std::max(bilin, (P * sigma).cwiseAbs().sum());
  }
  return {quad, bilin};
}

}  // namespace vlq
