#include "vlq/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vlq {

double eval_poly(const std::vector<double>& coeffs, double x) {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
  return v;
}

Kernel Kernel::constant(Matrix value) {
  Kernel k;
  k.kind_ = KernelKind::Constant;
  k.rows_ = static_cast<int>(value.rows());
  k.cols_ = static_cast<int>(value.cols());
  k.constant_ = std::move(value);
  return k;
}

Kernel Kernel::separable(std::vector<SeparableTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("separable kernel needs at least one term");
  Kernel k;
  k.kind_ = KernelKind::SeparableSum;
  k.rows_ = static_cast<int>(terms.front().coeff.rows());
  k.cols_ = static_cast<int>(terms.front().coeff.cols());
  for (const auto& t : terms)
    if (t.coeff.rows() != k.rows_ || t.coeff.cols() != k.cols_)
      throw std::invalid_argument("separable kernel terms have mismatched shapes");
  k.separable_ = std::move(terms);
  return k;
}

Kernel Kernel::exponential(std::vector<ExponentialTerm> terms) {
  if (terms.empty()) throw std::invalid_argument("exponential kernel needs at least one term");
  Kernel k;
  k.kind_ = KernelKind::ExponentialSum;
  k.rows_ = static_cast<int>(terms.front().coeff.rows());
  k.cols_ = static_cast<int>(terms.front().coeff.cols());
  for (const auto& t : terms)
    if (t.coeff.rows() != k.rows_ || t.coeff.cols() != k.cols_)
      throw std::invalid_argument("exponential kernel terms have mismatched shapes");
  k.exponential_ = std::move(terms);
  return k;
}

Kernel Kernel::fractional(double alpha, Matrix scale, double diagonal_clamp) {
  if (alpha <= 0.0 || alpha > 1.0) throw std::invalid_argument("fractional exponent must be in (0, 1]");
  if (diagonal_clamp <= 0.0) throw std::invalid_argument("diagonal clamp must be positive");
  Kernel k;
  k.kind_ = KernelKind::Fractional;
  k.rows_ = static_cast<int>(scale.rows());
  k.cols_ = static_cast<int>(scale.cols());
  k.constant_ = std::move(scale);
  k.alpha_ = alpha;
  k.clamp_ = diagonal_clamp;
  return k;
}

Kernel Kernel::tabulated(std::vector<double> s_nodes, std::vector<double> tau_nodes,
                         std::vector<Matrix> values) {
  if (s_nodes.size() < 2 || tau_nodes.size() < 2)
    throw std::invalid_argument("tabulated kernel needs at least a 2x2 grid");
  if (values.size() != s_nodes.size() * tau_nodes.size())
    throw std::invalid_argument("tabulated kernel value count mismatch");
  Kernel k;
  k.kind_ = KernelKind::Tabulated;
  k.rows_ = static_cast<int>(values.front().rows());
  k.cols_ = static_cast<int>(values.front().cols());
  k.s_nodes_ = std::move(s_nodes);
  k.tau_nodes_ = std::move(tau_nodes);
  k.table_ = std::move(values);
  return k;
}

namespace {

// index of the cell containing x, clamped to the table range
std::pair<std::size_t, double> locate(const std::vector<double>& nodes, double x) {
  if (x <= nodes.front()) return {0, 0.0};
  if (x >= nodes.back()) return {nodes.size() - 2, 1.0};
  auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
  std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
  double w = (x - nodes[i]) / (nodes[i + 1] - nodes[i]);
  return {i, w};
}

}  // namespace

Matrix Kernel::eval(double s, double tau) const {
  switch (kind_) {
    case KernelKind::Constant:
      return constant_;
    case KernelKind::SeparableSum: {
      Matrix out = Matrix::Zero(rows_, cols_);
      for (const auto& t : separable_) out += eval_poly(t.f_poly, s) * eval_poly(t.g_poly, tau) * t.coeff;
      return out;
    }
    case KernelKind::ExponentialSum: {
      Matrix out = Matrix::Zero(rows_, cols_);
      for (const auto& t : exponential_) out += std::exp(-t.rate * (s - tau)) * t.coeff;
      return out;
    }
    case KernelKind::Fractional: {
      double gap = std::max(s - tau, clamp_);
      return std::pow(gap, alpha_ - 1.0) * constant_;
    }
    case KernelKind::Tabulated: {
      auto [i, ws] = locate(s_nodes_, s);
      auto [j, wt] = locate(tau_nodes_, tau);
      const std::size_t nt = tau_nodes_.size();
      return (1 - ws) * (1 - wt) * table_[i * nt + j] + (1 - ws) * wt * table_[i * nt + j + 1] +
             ws * (1 - wt) * table_[(i + 1) * nt + j] + ws * wt * table_[(i + 1) * nt + j + 1];
    }
  }
  throw std::logic_error("unreachable kernel kind");
}

bool Kernel::is_zero() const {
  if (kind_ == KernelKind::Constant) return constant_.isZero(0.0);
  return false;
}

TimeWeight TimeWeight::constant(Matrix value) {
  if (value.rows() != value.cols()) throw std::invalid_argument("weight must be square");
  TimeWeight w;
  w.dim_ = static_cast<int>(value.rows());
  w.constant_ = 0.5 * (value + value.transpose());
  return w;
}

TimeWeight TimeWeight::tabulated(std::vector<double> times, std::vector<Matrix> values) {
  if (times.size() != values.size() || times.size() < 2)
    throw std::invalid_argument("tabulated weight needs matching times/values, at least two");
  TimeWeight w;
  w.dim_ = static_cast<int>(values.front().rows());
  for (auto& v : values) {
    if (v.rows() != w.dim_ || v.cols() != w.dim_)
      throw std::invalid_argument("tabulated weight shape mismatch");
    v = 0.5 * (v + v.transpose()).eval();
  }
  w.times_ = std::move(times);
  w.values_ = std::move(values);
  return w;
}

Matrix TimeWeight::at(double t) const {
  if (is_constant()) return constant_;
  auto [i, w] = locate(times_, t);
  return (1 - w) * values_[i] + w * values_[i + 1];
}

Vector SampledPath::at(double t) const {
  if (times.empty()) throw std::invalid_argument("empty sample set in free path");
  if (times.size() != values.size()) throw std::invalid_argument("free path times/values mismatch");
  if (times.size() == 1) return values.front();
  auto [i, w] = locate(times, t);
  return (1 - w) * values[i] + w * values[i + 1];
}

}  // namespace vlq
