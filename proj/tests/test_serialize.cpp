#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "support.hpp"
#include "vlq/riccati.hpp"
#include "vlq/serialize.hpp"

using namespace vlq;
using vlq::testing::random_h4_instance;

TEST_CASE("hex-float round trip is bit exact") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 200; ++i) {
    double x = dist(rng);
    CHECK(from_hex(to_hex(x)) == x);
  }
  CHECK(from_hex(to_hex(0.1)) == 0.1);
  CHECK(from_hex(to_hex(-0.0)) == 0.0);
}

TEST_CASE("matrices and kernels parse from JSON") {
  Json j = Json::parse(R"([[1.0, 2.0], [3.0, 4.0]])");
  Matrix M = matrix_from_json(j);
  CHECK(M(1, 0) == 3.0);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[1],[2,3]]")), std::invalid_argument);

  Json k = Json::parse(R"({"kind": "convolution-exponential-sum",
                           "terms": [{"coeff": [[2.0]], "rate": 1.0}]})");
  Kernel kern = kernel_from_json(k);
  CHECK(kern.eval(1.0, 0.0)(0, 0) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK_THROWS_AS(kernel_from_json(Json::parse(R"({"kind": "mystery"})")),
                  std::invalid_argument);
}

TEST_CASE("configs are schema checked") {
  Json good = Json::parse(R"({
    "schema": 1,
    "problem": {
      "n": 1, "m": 1, "t0": 0.0, "T": 1.0,
      "A": {"kind": "constant", "value": [[0.3]]},
      "B": {"kind": "constant", "value": [[0.5]]},
      "C": {"kind": "constant", "value": [[0.2]]},
      "D": {"kind": "constant", "value": [[0.4]]},
      "Q": [[1.0]], "R": [[1.0]], "G": [[1.0]],
      "free_path": {"times": [0.0, 1.0], "values": [[1.0], [1.0]]}
    },
    "grid": {"N": 4},
    "solver": {"method": "picard", "tol": 1e-9, "max_iter": 25}
  })");
  RunConfig cfg = config_from_json(good);
  CHECK(cfg.N == 4);
  CHECK(cfg.solver_method == "picard");
  CHECK(cfg.picard_max_iter == 25);
  CHECK(cfg.problem.A.eval(0.5, 0.0)(0, 0) == 0.3);

  Json bad = good;
  bad["schema"] = 2;
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
  bad = good;
  bad["grid"]["N"] = 0;
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
  bad = good;
  bad["solver"]["method"] = "newton";
  CHECK_THROWS_AS(config_from_json(bad), std::invalid_argument);
}

TEST_CASE("solution documents round trip losslessly") {
  std::mt19937_64 rng(2);
  auto inst = random_h4_instance(rng, 2, 1, 4);
  RiccatiSolution sol = solve_dp(inst.lifted, inst.coeffs);
  Json doc = riccati_to_json(sol, inst.grid);
  TimeGrid grid2;
  RiccatiSolution back = riccati_from_json(doc, &grid2);
  CHECK(back.n == sol.n);
  CHECK(back.N == sol.N);
  CHECK(grid2.T == inst.grid.T);
  CHECK(back.regularity_margin == sol.regularity_margin);
  for (int k = 0; k <= 4; ++k)
    CHECK((back.P[k] - sol.P[k]).cwiseAbs().maxCoeff() == 0.0);
  for (int k = 0; k < 4; ++k)
    CHECK((back.Theta[k] - sol.Theta[k]).cwiseAbs().maxCoeff() == 0.0);
  // serialization is deterministic byte-for-byte
  CHECK(doc.dump(2) == riccati_to_json(sol, inst.grid).dump(2));
}
