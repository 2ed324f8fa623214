#pragma once

#include <string>
#include <vector>

#include "vlq/types.hpp"

namespace vlq {

/// Two-time coefficient kernel K(s, tau) defined on the lower triangle
/// tau <= s. Five concrete evaluation forms cover every instance this
/// suite works with.
enum class KernelKind { Constant, SeparableSum, ExponentialSum, Fractional, Tabulated };

struct SeparableTerm {
  Matrix coeff;                 // matrix factor
  std::vector<double> f_poly;   // polynomial in s, coefficients low->high
  std::vector<double> g_poly;   // polynomial in tau
};

struct ExponentialTerm {
  Matrix coeff;
  double rate = 0.0;  // decay lambda in coeff * exp(-lambda (s - tau))
};

class Kernel {
 public:
  Kernel() = default;

  static Kernel constant(Matrix value);
  static Kernel separable(std::vector<SeparableTerm> terms);
  static Kernel exponential(std::vector<ExponentialTerm> terms);
  // scale * (s - tau)^(alpha - 1); the difference is clamped below at
  // `diagonal_clamp` so the near-diagonal singularity stays finite.
  static Kernel fractional(double alpha, Matrix scale, double diagonal_clamp);
  static Kernel tabulated(std::vector<double> s_nodes, std::vector<double> tau_nodes,
                          std::vector<Matrix> values);  // values[i * tau_nodes.size() + j]

  Matrix eval(double s, double tau) const;

  KernelKind kind() const { return kind_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_zero() const;
  // true when the kernel violates the boundedness assumption near the diagonal
  bool nonconforming() const { return kind_ == KernelKind::Fractional; }
  // kernels depending on (s, tau) through s - tau only
  bool shift_invariant() const {
    return kind_ == KernelKind::Constant || kind_ == KernelKind::ExponentialSum ||
           kind_ == KernelKind::Fractional;
  }

  void set_diagonal_clamp(double clamp) { clamp_ = clamp; }
  double diagonal_clamp() const { return clamp_; }
  double fractional_alpha() const { return alpha_; }

  const Matrix& constant_value() const { return constant_; }
  const std::vector<SeparableTerm>& separable_terms() const { return separable_; }
  const std::vector<ExponentialTerm>& exponential_terms() const { return exponential_; }
  const Matrix& fractional_scale() const { return constant_; }
  const std::vector<double>& table_s_nodes() const { return s_nodes_; }
  const std::vector<double>& table_tau_nodes() const { return tau_nodes_; }
  const std::vector<Matrix>& table_values() const { return table_; }

 private:
  KernelKind kind_ = KernelKind::Constant;
  int rows_ = 0, cols_ = 0;
  Matrix constant_;  // Constant value, or Fractional scale
  std::vector<SeparableTerm> separable_;
  std::vector<ExponentialTerm> exponential_;
  double alpha_ = 1.0;
  double clamp_ = 1e-8;
  std::vector<double> s_nodes_, tau_nodes_;
  std::vector<Matrix> table_;
};

/// Time-indexed symmetric weight, constant or linearly interpolated table.
class TimeWeight {
 public:
  TimeWeight() = default;
  static TimeWeight constant(Matrix value);
  static TimeWeight tabulated(std::vector<double> times, std::vector<Matrix> values);

  Matrix at(double t) const;
  int dim() const { return dim_; }
  bool is_constant() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Matrix>& values() const { return values_; }

 private:
  int dim_ = 0;
  Matrix constant_;
  std::vector<double> times_;
  std::vector<Matrix> values_;
};

/// Piecewise-linear sampled path [t0, T] -> R^n.
struct SampledPath {
  std::vector<double> times;
  std::vector<Vector> values;

  Vector at(double t) const;
  int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
};

double eval_poly(const std::vector<double>& coeffs, double x);

}  // namespace vlq
