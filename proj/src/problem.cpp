#include "vlq/problem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vlq {

Matrix ProblemSpec::eval_kernel(char which, double s, double tau) const {
  if (!(t0 <= tau && tau <= s && s <= T))
    throw std::domain_error("kernel evaluation outside the lower triangle of [t0, T]");
  switch (which) {
    case 'A': return A.eval(s, tau);
    case 'B': return B.eval(s, tau);
    case 'C': return C.eval(s, tau);
    case 'D': return D.eval(s, tau);
    default: throw std::invalid_argument("kernel selector must be one of A, B, C, D");
  }
}

namespace {

double min_eig(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (sym + sym.transpose()));
  return es.eigenvalues().minCoeff();
}

void check_shape(ValidationReport& rep, const char* name, const Kernel& k, int rows, int cols) {
  if (k.rows() != rows || k.cols() != cols) {
    rep.violations.push_back({std::string(name) + " kernel shape mismatch", 0.0, 0.0});
  }
}

}  // namespace

ValidationReport validate_spec(const ProblemSpec& spec, ValidationMode mode, int samples) {
  ValidationReport rep;
  if (spec.n < 1 || spec.m < 1) {
    rep.violations.push_back({"state/control dimensions must be positive", 0.0, 0.0});
    return rep;
  }
  if (!(spec.t0 < spec.T)) {
    rep.violations.push_back({"horizon requires t0 < T", spec.t0, 0.0});
    return rep;
  }
  check_shape(rep, "A", spec.A, spec.n, spec.n);
  check_shape(rep, "B", spec.B, spec.n, spec.m);
  check_shape(rep, "C", spec.C, spec.n, spec.n);
  check_shape(rep, "D", spec.D, spec.n, spec.m);
  if (spec.Q.dim() != spec.n) rep.violations.push_back({"Q dimension mismatch", 0.0, 0.0});
  if (spec.R.dim() != spec.m) rep.violations.push_back({"R dimension mismatch", 0.0, 0.0});
  if (spec.G.rows() != spec.n || spec.G.cols() != spec.n)
    rep.violations.push_back({"G shape mismatch", 0.0, 0.0});
  if (spec.free_path.times.empty())
    rep.violations.push_back({"free path has no samples", 0.0, 0.0});
  else if (spec.free_path.dim() != spec.n)
    rep.violations.push_back({"free path dimension mismatch", 0.0, 0.0});
  if (!rep.ok()) return rep;

  for (const Kernel* k : {&spec.A, &spec.B, &spec.C, &spec.D}) {
    if (k->nonconforming()) {
      rep.warnings.push_back("kernel nonconforming with H1 (unbounded near diagonal)");
      break;
    }
  }

  if (mode == ValidationMode::ConvexOnly) return rep;

  constexpr double kPsdTol = 1e-10;
  rep.r_margin = std::numeric_limits<double>::infinity();
  rep.q_margin = std::numeric_limits<double>::infinity();
  if (samples < 2) samples = 2;
  for (int i = 0; i < samples; ++i) {
    double s = spec.t0 + (spec.T - spec.t0) * i / (samples - 1);
    double r_eig = min_eig(spec.R.at(s));
    double q_eig = min_eig(spec.Q.at(s));
    if (r_eig < rep.r_margin) rep.r_margin = r_eig;
    if (q_eig < rep.q_margin) rep.q_margin = q_eig;
    if (r_eig <= 0.0)
      rep.violations.push_back({"R not uniformly positive at s=" + std::to_string(s), s, r_eig});
    if (q_eig < -kPsdTol)
      rep.violations.push_back({"Q not positive semidefinite at s=" + std::to_string(s), s, q_eig});
  }
  rep.g_margin = min_eig(spec.G);
  if (rep.g_margin < -kPsdTol)
    rep.violations.push_back({"G not positive semidefinite", spec.T, rep.g_margin});
  return rep;
}

}  // namespace vlq
