#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vlq/kernel.hpp"

using namespace vlq;

TEST_CASE("constant kernel returns its value everywhere") {
  Kernel k = Kernel::constant(Matrix::Constant(1, 1, 2.5));
  CHECK(k.eval(0.7, 0.1)(0, 0) == 2.5);
  CHECK(k.eval(1.0, 1.0)(0, 0) == 2.5);
}

TEST_CASE("exponential sum with zero rate degenerates to a constant") {
  Kernel k = Kernel::exponential({{Matrix::Constant(1, 1, 1.0), 0.0}});
  CHECK(k.eval(1.0, 0.3)(0, 0) == 1.0);
}

TEST_CASE("exponential sum matches the reference scalar exponential") {
  Kernel k = Kernel::exponential({{Matrix::Constant(1, 1, 2.0), 1.0}});
  CHECK(k.eval(1.0, 0.0)(0, 0) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-15));
}

TEST_CASE("separable kernel evaluates the factor product") {
  // A(s, tau) = s * tau
  Kernel k = Kernel::separable({{Matrix::Identity(1, 1), {0.0, 1.0}, {0.0, 1.0}}});
  CHECK(k.eval(1.0, 0.5)(0, 0) == doctest::Approx(0.5));
  CHECK(k.eval(0.5, 0.5)(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("evaluation is pure: repeated calls are bit-identical") {
  Kernel k = Kernel::exponential({{Matrix::Constant(2, 2, 0.3), 0.7}});
  Matrix a = k.eval(0.9, 0.2), b = k.eval(0.9, 0.2);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("convolution kinds are shift invariant on random triples") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Kernel exp_k = Kernel::exponential({{Matrix::Constant(1, 1, 1.3), 0.4}});
  Kernel frac_k = Kernel::fractional(0.7, Matrix::Identity(1, 1), 1e-8);
  for (int i = 0; i < 50; ++i) {
    double tau = dist(rng), gap = dist(rng), delta = dist(rng);
    double s = tau + gap;
    for (const Kernel* k : {&exp_k, &frac_k})
      CHECK(k->eval(s, tau)(0, 0) ==
            doctest::Approx(k->eval(s + delta, tau + delta)(0, 0)).epsilon(1e-14));
  }
}

TEST_CASE("fractional kernel is clamped at the diagonal and flagged") {
  Kernel k = Kernel::fractional(0.7, Matrix::Identity(1, 1), 1e-4);
  CHECK(k.nonconforming());
  CHECK(k.eval(0.5, 0.5)(0, 0) == doctest::Approx(std::pow(1e-4, -0.3)));
  CHECK(k.eval(0.5, 0.25)(0, 0) == doctest::Approx(std::pow(0.25, -0.3)));
}

TEST_CASE("tabulated kernel bilinearly interpolates") {
  // values v(s, tau) = s + 2 tau on a 2x2 grid
  std::vector<Matrix> vals = {Matrix::Constant(1, 1, 0.0), Matrix::Constant(1, 1, 2.0),
                              Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 3.0)};
  Kernel k = Kernel::tabulated({0.0, 1.0}, {0.0, 1.0}, vals);
  CHECK(k.eval(0.5, 0.5)(0, 0) == doctest::Approx(1.5));
  CHECK(k.eval(1.0, 0.0)(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("time weights are symmetrized on ingest and interpolate") {
  Matrix skew(2, 2);
  skew << 1.0, 2.0, 0.0, 1.0;
  TimeWeight w = TimeWeight::constant(skew);
  CHECK(w.at(0.3)(0, 1) == doctest::Approx(1.0));
  TimeWeight tab = TimeWeight::tabulated({0.0, 1.0}, {Matrix::Zero(1, 1), Matrix::Identity(1, 1)});
  CHECK(tab.at(0.25)(0, 0) == doctest::Approx(0.25));
}

TEST_CASE("sampled paths interpolate linearly and reject empty data") {
  SampledPath p;
  CHECK_THROWS_AS(p.at(0.0), std::invalid_argument);
  p.times = {0.0, 1.0};
  p.values = {Vector::Zero(1), Vector::Ones(1)};
  CHECK(p.at(0.5)(0) == doctest::Approx(0.5));
  CHECK(p.at(2.0)(0) == doctest::Approx(1.0));  // clamped beyond the last sample
}
