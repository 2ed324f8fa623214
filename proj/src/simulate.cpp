#include "vlq/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace vlq {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits) {  // (0, 1)
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

double NoiseDriver::draw(std::uint64_t path, std::uint64_t step, double h) const {
  std::uint64_t x = splitmix64(seed ^ splitmix64(path ^ splitmix64(step)));
  if (kind == Kind::TwoPoint) return (x & 1) ? std::sqrt(h) : -std::sqrt(h);
  std::uint64_t y = splitmix64(x);
  double u1 = to_unit(x), u2 = to_unit(y);
  return std::sqrt(h) * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

Vector propagate_aux(const Vector& chi, const Vector& u, double xi, const LiftedSystem& sys,
                     int k) {
  if (chi.size() != sys.dim(k)) throw std::invalid_argument("auxiliary state dimension mismatch");
  if (u.size() != sys.m) throw std::invalid_argument("control dimension mismatch");
  return sys.F[k] * chi + sys.Gu[k] * u + xi * (sys.H[k] * chi + sys.L[k] * u);
}

namespace {

struct PathResult {
  double cost = 0.0;
  double terminal_sq = 0.0;
  std::vector<double> control_norms;
};

// One closed- or open-loop trajectory. `controls` may be null for feedback.
PathResult run_path(const SampledCoefficients& coeffs, const LiftedSystem& sys,
                    const std::vector<Matrix>* policy, const std::vector<Vector>* controls,
                    const Vector& chi0, std::int64_t p, const NoiseDriver& driver,
                    bool exhaustive, double h) {
  const int n = sys.n, N = sys.N;
  PathResult out;
  out.control_norms.resize(N);
  Vector chi = chi0;
  double cost = 0.0;
  for (int k = 0; k < N; ++k) {
    Vector X = chi.head(n);
    Vector u = controls ? (*controls)[k] : (*policy)[k] * chi;
    cost += h * (X.dot(coeffs.Q[k] * X) + u.dot(coeffs.R[k] * u));
    out.control_norms[k] = u.norm();
    double xi = exhaustive ? (((p >> k) & 1) ? std::sqrt(h) : -std::sqrt(h))
                           : driver.draw(static_cast<std::uint64_t>(p), k, h);
    chi = propagate_aux(chi, u, xi, sys, k);
    if (!chi.allFinite())
      throw std::runtime_error("non-finite state on path " + std::to_string(p) + " at step " +
                               std::to_string(k + 1));
  }
  Vector XT = chi.head(n);
  cost += XT.dot(coeffs.G * XT);
  out.cost = 0.5 * cost;
  out.terminal_sq = XT.squaredNorm();
  return out;
}

SimReport reduce_paths(std::vector<PathResult>& results, int N) {
  SimReport rep;
  rep.paths = static_cast<std::int64_t>(results.size());
  rep.per_path_costs.reserve(results.size());
  rep.control_norms.assign(N, 0.0);
  double sum = 0.0;
  for (const auto& r : results) {
    rep.per_path_costs.push_back(r.cost);
    sum += r.cost;
    rep.terminal_second_moment += r.terminal_sq;
    for (int k = 0; k < N; ++k) rep.control_norms[k] += r.control_norms[k];
  }
  rep.cost_mean = sum / rep.paths;
  rep.terminal_second_moment /= rep.paths;
  for (auto& c : rep.control_norms) c /= rep.paths;
  double m2 = 0.0;
  for (const auto& r : results) m2 += (r.cost - rep.cost_mean) * (r.cost - rep.cost_mean);
  if (rep.paths > 1)
    rep.cost_stderr = std::sqrt(m2 / (rep.paths - 1)) / std::sqrt(static_cast<double>(rep.paths));
  return rep;
}

SimReport simulate_impl(const SampledCoefficients& coeffs, const LiftedSystem& sys,
                        const TimeGrid& grid, const std::vector<Matrix>* policy,
                        const std::vector<std::vector<Vector>>* controls, const DiscretePath& chi0,
                        const NoiseDriver& driver, std::int64_t paths, bool exhaustive,
                        int threads) {
  if (chi0.start != 0 || chi0.values.size() != sys.dim(0))
    throw std::invalid_argument("initial path must start at step 0 with full dimension");
  if (exhaustive) {
    if (driver.kind != NoiseDriver::Kind::TwoPoint)
      throw std::invalid_argument("exhaustive mode requires the two-point driver");
    if (sys.N > 20) throw std::invalid_argument("exhaustive mode limited to N <= 20");
    paths = std::int64_t{1} << sys.N;
    if (controls && static_cast<std::int64_t>(controls->size()) != paths)
      throw std::invalid_argument("exhaustive open-loop mode needs one control sequence per sign path");
  }
  if (paths < 1) throw std::invalid_argument("path count must be positive");
  std::vector<PathResult> results(static_cast<std::size_t>(paths));
  auto worker = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t p = lo; p < hi; ++p)
      results[static_cast<std::size_t>(p)] =
          run_path(coeffs, sys, policy, controls ? &(*controls)[static_cast<std::size_t>(p)] : nullptr,
                   chi0.values, p, driver, exhaustive, grid.h);
  };
  if (threads <= 1 || paths < 2 * threads) {
    worker(0, paths);
  } else {
    std::vector<std::thread> pool;
    std::int64_t chunk = (paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      std::int64_t lo = t * chunk, hi = std::min(paths, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  // deterministic sequential reduction over the per-path array
  return reduce_paths(results, sys.N);
}

}  // namespace

SimReport simulate_closed_loop(const SampledCoefficients& coeffs, const LiftedSystem& lifted,
                               const TimeGrid& grid, const std::vector<Matrix>& policy,
                               const DiscretePath& chi0, const NoiseDriver& driver,
                               std::int64_t paths, bool exhaustive, int threads) {
  if (static_cast<int>(policy.size()) != lifted.N)
    throw std::invalid_argument("policy length must equal the step count");
  return simulate_impl(coeffs, lifted, grid, &policy, nullptr, chi0, driver, paths, exhaustive,
                       threads);
}

SimReport simulate_open_loop(const SampledCoefficients& coeffs, const LiftedSystem& lifted,
                             const TimeGrid& grid, const std::vector<std::vector<Vector>>& controls,
                             const DiscretePath& chi0, const NoiseDriver& driver, bool exhaustive,
                             int threads) {
  for (const auto& seq : controls)
    if (static_cast<int>(seq.size()) != lifted.N)
      throw std::invalid_argument("control sequence length must equal the step count");
  return simulate_impl(coeffs, lifted, grid, nullptr, &controls, chi0, driver,
                       static_cast<std::int64_t>(controls.size()), exhaustive, threads);
}

}  // namespace vlq
