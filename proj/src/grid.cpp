#include "vlq/grid.hpp"

#include <stdexcept>

namespace vlq {

TimeGrid build_grid(double t0, double T, int N) {
  if (N < 1) throw std::invalid_argument("grid needs at least one step");
  if (!(t0 < T)) throw std::invalid_argument("grid requires t0 < T");
  TimeGrid g;
  g.t0 = t0;
  g.T = T;
  g.N = N;
  g.h = (T - t0) / N;
  g.nodes.resize(N + 1);
  for (int k = 0; k < N; ++k) g.nodes[k] = t0 + k * g.h;
  g.nodes[N] = T;  // pin the last node rather than accumulate rounding
  return g;
}

DiscretePath discretize_path(const SampledPath& x, const TimeGrid& grid, int k) {
  if (x.times.empty()) throw std::invalid_argument("empty sample set in free path");
  if (k < 0 || k > grid.N) throw std::invalid_argument("start index outside the grid");
  DiscretePath p;
  p.start = k;
  p.n = x.dim();
  p.values.resize((grid.N - k + 1) * p.n);
  for (int j = k; j <= grid.N; ++j) p.values.segment((j - k) * p.n, p.n) = x.at(grid.nodes[j]);
  return p;
}

DiscretePath restrict_path(const DiscretePath& path) {
  if (path.blocks() < 2) throw std::invalid_argument("cannot restrict a single-block path");
  DiscretePath p;
  p.start = path.start + 1;
  p.n = path.n;
  p.values = path.values.tail(path.values.size() - path.n);
  return p;
}

SampledCoefficients sample_spec(const ProblemSpec& spec, const TimeGrid& grid) {
  SampledCoefficients c;
  c.n = spec.n;
  c.m = spec.m;
  c.N = grid.N;
  const int n = spec.n, m = spec.m, N = grid.N;
  c.Astack.resize(N);
  c.Bstack.resize(N);
  c.Cstack.resize(N);
  c.Dstack.resize(N);
  c.Q.resize(N);
  c.R.resize(N);
  for (int k = 0; k < N; ++k) {
    const double sk = grid.nodes[k];
    const int rows = (N - k + 1) * n;
    c.Astack[k].resize(rows, n);
    c.Bstack[k].resize(rows, m);
    c.Cstack[k].resize(rows, n);
    c.Dstack[k].resize(rows, m);
    for (int j = k; j <= N; ++j) {
      const double sj = grid.nodes[j];
      c.Astack[k].middleRows((j - k) * n, n) = spec.A.eval(sj, sk);
      c.Bstack[k].middleRows((j - k) * n, n) = spec.B.eval(sj, sk);
      c.Cstack[k].middleRows((j - k) * n, n) = spec.C.eval(sj, sk);
      c.Dstack[k].middleRows((j - k) * n, n) = spec.D.eval(sj, sk);
    }
    Matrix q = spec.Q.at(sk), r = spec.R.at(sk);
    c.Q[k] = 0.5 * (q + q.transpose());
    c.R[k] = 0.5 * (r + r.transpose());
  }
  c.G = 0.5 * (spec.G + spec.G.transpose());
  return c;
}

}  // namespace vlq
