#pragma once

#include <cstdint>
#include <vector>

#include "vlq/grid.hpp"
#include "vlq/lifted.hpp"
#include "vlq/riccati.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Counter-based noise stream: the variate for (path, step) is a pure
/// function of (seed, path, step), so results do not depend on scheduling.
/// Both kinds have mean 0 and variance h.
struct NoiseDriver {
  enum class Kind { Gaussian, TwoPoint };
  Kind kind = Kind::Gaussian;
  std::uint64_t seed = 0;

  double draw(std::uint64_t path, std::uint64_t step, double h) const;
};

struct SimReport {
  std::int64_t paths = 0;
  double cost_mean = 0.0;
  double cost_stderr = 0.0;
  std::vector<double> control_norms;  // per step, mean |u_k| over paths
  double terminal_second_moment = 0.0;
  std::vector<double> per_path_costs;
};

Vector propagate_aux(const Vector& chi, const Vector& u, double xi, const LiftedSystem& lifted,
                     int k);

/// Closed-loop simulation of u_k = Theta_k chi_k. With `exhaustive` the
/// two-point driver runs all 2^N sign sequences with equal weight, which
/// evaluates the discrete expectation exactly.
SimReport simulate_closed_loop(const SampledCoefficients& coeffs, const LiftedSystem& lifted,
                               const TimeGrid& grid, const std::vector<Matrix>& policy,
                               const DiscretePath& chi0, const NoiseDriver& driver,
                               std::int64_t paths, bool exhaustive = false, int threads = 1);

/// Open-loop simulation with externally supplied controls[path][step] in R^m.
SimReport simulate_open_loop(const SampledCoefficients& coeffs, const LiftedSystem& lifted,
                             const TimeGrid& grid, const std::vector<std::vector<Vector>>& controls,
                             const DiscretePath& chi0, const NoiseDriver& driver,
                             bool exhaustive = false, int threads = 1);

}  // namespace vlq
