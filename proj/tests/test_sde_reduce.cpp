#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "vlq/riccati.hpp"
#include "vlq/sde_reduce.hpp"

using namespace vlq;
using vlq::testing::Instance;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

Instance constant_instance(double a, double b, double c, double d, double q, double r, double g,
                           int N) {
  ProblemSpec spec;
  spec.n = spec.m = 1;
  spec.t0 = 0.0;
  spec.T = 1.0;
  spec.A = Kernel::constant(scalar(a));
  spec.B = Kernel::constant(scalar(b));
  spec.C = Kernel::constant(scalar(c));
  spec.D = Kernel::constant(scalar(d));
  spec.Q = TimeWeight::constant(scalar(q));
  spec.R = TimeWeight::constant(scalar(r));
  spec.G = scalar(g);
  spec.free_path.times = {0.0, 1.0};
  spec.free_path.values = {Vector::Ones(1), Vector::Ones(1)};
  Instance inst;
  inst.spec = spec;
  inst.grid = build_grid(0.0, 1.0, N);
  inst.coeffs = sample_spec(spec, inst.grid);
  inst.lifted = build_lifted(inst.coeffs, inst.grid);
  inst.chi0 = discretize_path(spec.free_path, inst.grid, 0);
  return inst;
}

}  // namespace

TEST_CASE("degenerate coefficients keep the curve constant") {
  SdeRiccatiCurve c1 = integrate_riccati_ode(scalar(0), scalar(0), scalar(0), scalar(0),
                                             scalar(0), scalar(1), scalar(1.5), 1.0, 100);
  for (const auto& S : c1.Sigma) CHECK(S(0, 0) == doctest::Approx(1.5));
  SdeRiccatiCurve c2 = integrate_riccati_ode(scalar(0), scalar(0), scalar(0), scalar(1),
                                             scalar(0), scalar(1), scalar(1), 1.0, 100);
  for (const auto& S : c2.Sigma) CHECK(S(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("integrator self-converges at the benchmark constants") {
  auto run = [](int steps) {
    return integrate_riccati_ode(scalar(0.3), scalar(0.5), scalar(0.2), scalar(0.4), scalar(1),
                                 scalar(1), scalar(1), 1.0, steps)
        .Sigma.front()(0, 0);
  };
  CHECK(std::abs(run(2000) - run(4000)) <= 1e-9);
}

TEST_CASE("doubling the step count shrinks the defect like fourth order") {
  auto run = [](int steps) {
    return integrate_riccati_ode(scalar(0.3), scalar(0.5), scalar(0.2), scalar(0.4), scalar(1),
                                 scalar(1), scalar(1), 1.0, steps)
        .Sigma.front()(0, 0);
  };
  double ref = run(4096);
  double e1 = std::abs(run(16) - ref);
  double e2 = std::abs(run(32) - ref);
  CHECK(e1 / e2 > 8.0);  // comfortably super-quadratic
}

TEST_CASE("positivity is preserved along the curve") {
  SdeRiccatiCurve c = integrate_riccati_ode(scalar(0.3), scalar(0.5), scalar(0.2), scalar(0.4),
                                            scalar(1), scalar(1), scalar(1), 1.0, 512);
  for (const auto& S : c.Sigma) CHECK(S(0, 0) >= 0.0);
}

TEST_CASE("zero dynamics agree exactly with the kernel solver") {
  Instance inst = constant_instance(0, 0, 0, 0, 0, 1, 1.5, 8);
  RiccatiSolution sol = solve_dp(inst.lifted, inst.coeffs);
  SdeRiccatiCurve curve = integrate_riccati_ode(scalar(0), scalar(0), scalar(0), scalar(0),
                                                scalar(0), scalar(1), scalar(1.5), 1.0, 64);
  ReductionTable table = compare_with_volterra(sol, curve, Vector::Ones(1));
  CHECK(table.max_err <= 1e-12);
}

TEST_CASE("kernel solver converges first order to the classical curve") {
  auto max_err = [](int N) {
    Instance inst = constant_instance(0.3, 0.5, 0.2, 0.4, 1, 1, 1, N);
    RiccatiSolution sol = solve_dp(inst.lifted, inst.coeffs);
    SdeRiccatiCurve curve =
        integrate_riccati_ode(scalar(0.3), scalar(0.5), scalar(0.2), scalar(0.4), scalar(1),
                              scalar(1), scalar(1), 1.0, 16 * N);
    return compare_with_volterra(sol, curve, Vector::Ones(1)).max_err;
  };
  double e64 = max_err(64), e128 = max_err(128);
  double ratio = e64 / e128;
  CHECK(ratio >= 1.7);
  CHECK(ratio <= 2.3);
}

TEST_CASE("state-feedback gain approaches the classical gain") {
  // with B = 0 the first-column gain must converge to -(r + d S d)^{-1} d S c
  const double c = 0.4, d = 0.6, q = 1.0, r = 1.0, g = 1.0;
  auto gain_at_zero = [&](int N) {
    Instance inst = constant_instance(0.2, 0.0, c, d, q, r, g, N);
    RiccatiSolution sol = solve_dp(inst.lifted, inst.coeffs);
    return sol.Theta[0](0, 0);
  };
  SdeRiccatiCurve curve = integrate_riccati_ode(scalar(0.2), scalar(0), scalar(c), scalar(d),
                                                scalar(q), scalar(r), scalar(g), 1.0, 4096);
  double S0 = curve.Sigma.front()(0, 0);
  double ode_gain = -(d * S0 * c) / (r + d * S0 * d);
  double err64 = std::abs(gain_at_zero(64) - ode_gain);
  double err128 = std::abs(gain_at_zero(128) - ode_gain);
  CHECK(err128 < err64);
  CHECK(err128 <= 0.05 * std::abs(ode_gain));
}

TEST_CASE("usage errors are rejected") {
  Instance inst = constant_instance(0, 0, 0, 0, 0, 1, 1, 7);
  RiccatiSolution sol = solve_dp(inst.lifted, inst.coeffs);
  SdeRiccatiCurve curve = integrate_riccati_ode(scalar(0), scalar(0), scalar(0), scalar(0),
                                                scalar(0), scalar(1), scalar(1), 1.0, 100);
  CHECK_THROWS_AS(compare_with_volterra(sol, curve, Vector::Ones(1)), std::invalid_argument);
  CHECK_THROWS_AS(integrate_riccati_ode(scalar(0), scalar(0), scalar(0), scalar(0), scalar(0),
                                        scalar(1), scalar(1), 1.0, 0),
                  std::invalid_argument);
}
