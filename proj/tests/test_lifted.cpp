#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "vlq/lifted.hpp"

using namespace vlq;
using vlq::testing::Instance;

namespace {

Instance constant_instance(double a, double b, double c, double d, int N, double T = 1.0) {
  ProblemSpec spec;
  spec.n = spec.m = 1;
  spec.t0 = 0.0;
  spec.T = T;
  spec.A = Kernel::constant(Matrix::Constant(1, 1, a));
  spec.B = Kernel::constant(Matrix::Constant(1, 1, b));
  spec.C = Kernel::constant(Matrix::Constant(1, 1, c));
  spec.D = Kernel::constant(Matrix::Constant(1, 1, d));
  spec.Q = TimeWeight::constant(Matrix::Identity(1, 1));
  spec.R = TimeWeight::constant(Matrix::Identity(1, 1));
  spec.G = Matrix::Identity(1, 1);
  spec.free_path.times = {0.0, T};
  spec.free_path.values = {Vector::Ones(1), Vector::Ones(1)};
  Instance inst;
  inst.spec = spec;
  inst.grid = build_grid(0.0, T, N);
  inst.coeffs = sample_spec(spec, inst.grid);
  inst.lifted = build_lifted(inst.coeffs, inst.grid);
  inst.chi0 = discretize_path(spec.free_path, inst.grid, 0);
  return inst;
}

}  // namespace

TEST_CASE("zero dynamics give a pure prefix drop") {
  Instance inst = constant_instance(0, 0, 0, 0, 2);
  Matrix expect(2, 3);
  expect << 0, 1, 0, 0, 0, 1;
  CHECK((inst.lifted.F[0] - expect).cwiseAbs().maxCoeff() == 0.0);
  CHECK(inst.lifted.Gu[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(inst.lifted.H[0].cwiseAbs().maxCoeff() == 0.0);
  CHECK(inst.lifted.L[0].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one-step drift attaches the kernel to the current state") {
  const double a = 0.7;
  Instance inst = constant_instance(a, 0, 0, 0, 1);  // h = 1
  Matrix expect(1, 2);
  expect << a, 1;
  CHECK((inst.lifted.F[0] - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("diffusion loading stacks the kernel column") {
  const double d = 0.4;
  Instance inst = constant_instance(0, 0, 0, d, 2);
  Matrix expect(2, 1);
  expect << d, d;
  CHECK((inst.lifted.L[0] - expect).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("only the first column block of H is nonzero") {
  std::mt19937_64 rng(11);
  Instance inst = vlq::testing::random_h4_instance(rng, 2, 2, 3);
  for (int k = 0; k < 3; ++k) {
    const Matrix& H = inst.lifted.H[k];
    CHECK(H.rightCols(H.cols() - inst.spec.n).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("dimensions shrink by one block per step") {
  std::mt19937_64 rng(13);
  Instance inst = vlq::testing::random_h4_instance(rng, 2, 1, 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(inst.lifted.F[k].rows() == inst.lifted.dim(k + 1));
    CHECK(inst.lifted.F[k].cols() == inst.lifted.dim(k));
    CHECK(inst.lifted.Gu[k].cols() == 1);
  }
}
