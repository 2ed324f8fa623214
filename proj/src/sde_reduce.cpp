#include "vlq/sde_reduce.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace vlq {

namespace {

Matrix riccati_rhs(const Matrix& S, const Matrix& A, const Matrix& B, const Matrix& C,
                   const Matrix& D, const Matrix& Q, const Matrix& R, double t) {
  Matrix Rd = R + D.transpose() * S * D;
  Eigen::LLT<Matrix> llt(0.5 * (Rd + Rd.transpose()));
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("R + D' Sigma D lost positive definiteness at t=" + std::to_string(t));
  Matrix K = S * B + C.transpose() * S * D;
  // Sigma' = -(Sigma A + A' Sigma + C' Sigma C + Q) + K Rd^{-1} K'
  return -(S * A + A.transpose() * S + C.transpose() * S * C + Q) +
         K * llt.solve(K.transpose());
}

}  // namespace

SdeRiccatiCurve integrate_riccati_ode(const Matrix& A, const Matrix& B, const Matrix& C,
                                      const Matrix& D, const Matrix& Q, const Matrix& R,
                                      const Matrix& G, double T, int steps) {
  if (steps < 1) throw std::invalid_argument("ODE integration needs at least one step");
  const double dt = T / steps;
  SdeRiccatiCurve curve;
  curve.times.resize(steps + 1);
  curve.Sigma.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) curve.times[i] = (i == steps) ? T : i * dt;
  curve.Sigma[steps] = 0.5 * (G + G.transpose());
  for (int i = steps - 1; i >= 0; --i) {
    const double t = curve.times[i + 1];
    const Matrix& S = curve.Sigma[i + 1];
    // backward step of size dt
    Matrix k1 = riccati_rhs(S, A, B, C, D, Q, R, t);
    Matrix k2 = riccati_rhs(S - 0.5 * dt * k1, A, B, C, D, Q, R, t - 0.5 * dt);
    Matrix k3 = riccati_rhs(S - 0.5 * dt * k2, A, B, C, D, Q, R, t - 0.5 * dt);
    Matrix k4 = riccati_rhs(S - dt * k3, A, B, C, D, Q, R, t - dt);
    Matrix next = S - (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    curve.Sigma[i] = 0.5 * (next + next.transpose());
  }
  return curve;
}

ReductionTable compare_with_volterra(const RiccatiSolution& sol, const SdeRiccatiCurve& curve,
                                     const Vector& x) {
  if (x.size() != sol.n) throw std::invalid_argument("initial point dimension mismatch");
  const int N = sol.N;
  const int steps = static_cast<int>(curve.times.size()) - 1;
  if (steps % N != 0)
    throw std::invalid_argument("ODE step count must be a multiple of the grid step count");
  const int stride = steps / N;
  ReductionTable table;
  for (int k = 0; k <= N; ++k) {
    ReductionRow row;
    row.k = k;
    row.s = curve.times[k * stride];
    Vector chi = x.replicate(N - k + 1, 1);
    row.volterra_value = 0.5 * chi.dot(sol.P[k] * chi);
    row.ode_value = 0.5 * x.dot(curve.Sigma[k * stride] * x);
    row.abs_err = std::abs(row.volterra_value - row.ode_value);
    table.max_err = std::max(table.max_err, row.abs_err);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace vlq
