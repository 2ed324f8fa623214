#include "vlq/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace vlq {

NodeField tree_project(const NodeField& child, int level) {
  const int half = 1 << level;
  NodeField out(half);
  for (int j = 0; j < half; ++j) out[j] = 0.5 * (child[j] + child[j + half]);
  return out;
}

NodeField tree_mart_coeff(const NodeField& child, int level, double h) {
  const int half = 1 << level;
  const double scale = 1.0 / (2.0 * std::sqrt(h));
  NodeField out(half);
  for (int j = 0; j < half; ++j) out[j] = scale * (child[j + half] - child[j]);
  return out;
}

NodeField tree_project_to(const ScenarioTree& tree, const NodeField& leaf_field, int level) {
  NodeField w = leaf_field;
  int cur = 0;
  while ((1 << cur) < static_cast<int>(w.size())) ++cur;
  for (int l = cur - 1; l >= level; --l) w = tree_project(w, l);
  return w;
}

namespace {

std::string sign_string(int node, int level) {
  std::string s;
  for (int r = 0; r < level; ++r) s += ((node >> r) & 1) ? '+' : '-';
  return s;
}

void note_residual(ResidualReport& rep, double r, int step, int node, int level) {
  if (r > rep.max_residual) {
    rep.max_residual = r;
    rep.argmax_step = step;
    rep.argmax_node = node;
    rep.argmax_signs = sign_string(node, level);
  }
}

}  // namespace

QpSolution solve_adapted_qp(const SampledCoefficients& coeffs, const TimeGrid& grid,
                            const ScenarioTree& tree, const DiscretePath& chi0) {
  const int n = coeffs.n, m = coeffs.m, N = tree.N;
  if (N > 12) throw std::invalid_argument("tree oracle limited to depth 12");
  if (chi0.start != 0 || chi0.values.size() != (N + 1) * n)
    throw std::invalid_argument("initial path must start at step 0 with full dimension");
  LiftedSystem sys = build_lifted(coeffs, grid);
  const double h = grid.h;
  const double sqh = std::sqrt(h);
  // control variables: block offset(k) + j m for node (k, j)
  auto offset = [m](int k) { return m * ((1 << k) - 1); };
  const int M = offset(N);

  // per node: chi = a + Lam u_anc, Lam columns grouped by ancestor level
  std::vector<Vector> a(1, chi0.values);
  std::vector<Matrix> Lam(1, Matrix(chi0.values.size(), 0));

  Matrix Hq = Matrix::Zero(M, M);
  Vector bq = Vector::Zero(M);
  double cq = 0.0;

  auto global_blocks = [&](int k, int j) {
    std::vector<int> g(k);
    for (int i = 0; i < k; ++i) g[i] = offset(i) + ScenarioTree::ancestor(j, i) * m;
    return g;
  };
  // accumulate w * (alpha + Bmat u)' W (alpha + Bmat u) into (Hq, bq, cq)
  auto accumulate = [&](double w, const Matrix& W, const Vector& alpha, const Matrix& Bmat,
                        const std::vector<int>& g) {
    const int k = static_cast<int>(g.size());
    Matrix WB = W * Bmat;
    Vector Wa = W * alpha;
    for (int i1 = 0; i1 < k; ++i1) {
      for (int i2 = 0; i2 < k; ++i2)
        Hq.block(g[i1], g[i2], m, m) +=
            w * Bmat.middleCols(i1 * m, m).transpose() * WB.middleCols(i2 * m, m);
      bq.segment(g[i1], m) += w * Bmat.middleCols(i1 * m, m).transpose() * Wa;
    }
    cq += 0.5 * w * alpha.dot(Wa);
  };

  for (int k = 0; k < N; ++k) {
    const double w = std::ldexp(1.0, -k);  // 2^-k node weight
    const int count = tree.nodes(k);
    std::vector<Vector> a_next(2 * count);
    std::vector<Matrix> Lam_next(2 * count);
    for (int j = 0; j < count; ++j) {
      auto g = global_blocks(k, j);
      accumulate(w * h, coeffs.Q[k], a[j].head(n), Lam[j].topRows(n), g);
      Hq.block(offset(k) + j * m, offset(k) + j * m, m, m) += w * h * coeffs.R[k];
      for (int s = 0; s < 2; ++s) {
        const double xi = s ? sqh : -sqh;
        Matrix T = sys.F[k] + xi * sys.H[k];
        Matrix Gu = sys.Gu[k] + xi * sys.L[k];
        const int child = j + s * count;
        a_next[child] = T * a[j];
        Lam_next[child].resize(T.rows(), (k + 1) * m);
        Lam_next[child].leftCols(k * m).noalias() = T * Lam[j];
        Lam_next[child].rightCols(m) = Gu;
      }
    }
    a = std::move(a_next);
    Lam = std::move(Lam_next);
  }
  {
    const double w = std::ldexp(1.0, -N);
    for (int p = 0; p < tree.leaves(); ++p)
      accumulate(w, coeffs.G, a[p], Lam[p], global_blocks(N, p));
  }

  Eigen::LLT<Matrix> llt(Hq);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("adapted quadratic program is not convex: Hessian not positive definite");
  double min_pivot = llt.matrixLLT().diagonal().minCoeff();
  Vector ubar = -llt.solve(bq);

  QpSolution out;
  out.value = cq + 0.5 * bq.dot(ubar);
  out.hessian_min_pivot = min_pivot * min_pivot;
  out.control.m = m;
  out.control.u.resize(N);
  for (int k = 0; k < N; ++k) {
    out.control.u[k].resize(tree.nodes(k));
    for (int j = 0; j < tree.nodes(k); ++j)
      out.control.u[k][j] = ubar.segment(offset(k) + j * m, m);
  }
  return out;
}

std::vector<NodeField> propagate_tree(const LiftedSystem& sys, const DiscretePath& chi0,
                                      const AdaptedControl& control, const ScenarioTree& tree) {
  const int N = tree.N;
  const double sqh = std::sqrt(tree.h);
  std::vector<NodeField> chi(N + 1);
  chi[0] = {chi0.values};
  for (int k = 0; k < N; ++k) {
    const int count = tree.nodes(k);
    chi[k + 1].resize(2 * count);
    for (int j = 0; j < count; ++j) {
      const Vector& u = control.u[k][j];
      Vector drift = sys.F[k] * chi[k][j] + sys.Gu[k] * u;
      Vector diff = sys.H[k] * chi[k][j] + sys.L[k] * u;
      chi[k + 1][j] = drift - sqh * diff;
      chi[k + 1][j + count] = drift + sqh * diff;
    }
  }
  return chi;
}

AdaptedControl replay_feedback(const LiftedSystem& sys, const std::vector<Matrix>& Theta,
                               const DiscretePath& chi0, const ScenarioTree& tree) {
  const int N = tree.N;
  const double sqh = std::sqrt(tree.h);
  AdaptedControl control;
  control.m = sys.m;
  control.u.resize(N);
  NodeField chi = {chi0.values};
  for (int k = 0; k < N; ++k) {
    const int count = tree.nodes(k);
    control.u[k].resize(count);
    NodeField next(2 * count);
    for (int j = 0; j < count; ++j) {
      Vector u = Theta[k] * chi[j];
      control.u[k][j] = u;
      Vector drift = sys.F[k] * chi[j] + sys.Gu[k] * u;
      Vector diff = sys.H[k] * chi[j] + sys.L[k] * u;
      next[j] = drift - sqh * diff;
      next[j + count] = drift + sqh * diff;
    }
    chi = std::move(next);
  }
  return control;
}

double tree_cost(const SampledCoefficients& coeffs, const ScenarioTree& tree,
                 const std::vector<NodeField>& chi, const AdaptedControl& control) {
  const int n = coeffs.n, N = tree.N;
  const double h = tree.h;
  double cost = 0.0;
  for (int k = 0; k < N; ++k) {
    const double w = std::ldexp(1.0, -k);
    for (int j = 0; j < tree.nodes(k); ++j) {
      Vector X = chi[k][j].head(n);
      cost += w * h * (X.dot(coeffs.Q[k] * X) + control.u[k][j].dot(coeffs.R[k] * control.u[k][j]));
    }
  }
  const double w = std::ldexp(1.0, -N);
  for (int p = 0; p < tree.leaves(); ++p) {
    const Vector& XT = chi[N][p];
    cost += w * XT.dot(coeffs.G * XT);
  }
  return 0.5 * cost;
}

BsvieSystem solve_optimality_bsvies(const SampledCoefficients& coeffs, const TimeGrid& grid,
                                    const ScenarioTree& tree, const std::vector<NodeField>& chi,
                                    const AdaptedControl& ubar) {
  const int n = coeffs.n, m = coeffs.m, N = tree.N;
  const double h = tree.h;
  const int leaves = tree.leaves();
  BsvieSystem sys;
  sys.n = n;
  sys.m = m;
  sys.N = N;
  sys.h = h;
  sys.ubar = ubar;

  sys.Xbar.resize(N + 1);
  for (int k = 0; k <= N; ++k) {
    sys.Xbar[k].resize(tree.nodes(k));
    for (int j = 0; j < tree.nodes(k); ++j) sys.Xbar[k][j] = chi[k][j].head(n);
  }

  // terminal martingale pair
  sys.eta.resize(N + 1);
  sys.zeta.resize(N);
  sys.eta[N].resize(leaves);
  for (int p = 0; p < leaves; ++p) sys.eta[N][p] = coeffs.G * sys.Xbar[N][p];
  for (int k = N - 1; k >= 0; --k) {
    sys.zeta[k] = tree_mart_coeff(sys.eta[k + 1], k, h);
    sys.eta[k] = tree_project(sys.eta[k + 1], k);
  }

  // leaf-measurable adjoints, backward in the first time index
  sys.Ytilde.assign(N, NodeField(leaves));
  sys.Y0tilde.assign(N, NodeField(leaves));
  for (int j = N - 1; j >= 0; --j) {
    for (int p = 0; p < leaves; ++p) {
      const double xi = tree.xi(p, j);
      const Vector& GXT = sys.eta[N][p];
      Vector y = coeffs.Q[j] * sys.Xbar[j][ScenarioTree::ancestor(p, j)];
      y += coeffs.A(N, j).transpose() * GXT + (xi / h) * (coeffs.C(N, j).transpose() * GXT);
      Vector y0 = coeffs.B(N, j).transpose() * GXT + (xi / h) * (coeffs.D(N, j).transpose() * GXT);
      for (int i = j + 1; i < N; ++i) {
        const Vector& Yi = sys.Ytilde[i][p];
        y += h * (coeffs.A(i, j).transpose() * Yi) + xi * (coeffs.C(i, j).transpose() * Yi);
        y0 += h * (coeffs.B(i, j).transpose() * Yi) + xi * (coeffs.D(i, j).transpose() * Yi);
      }
      sys.Ytilde[j][p] = std::move(y);
      sys.Y0tilde[j][p] = std::move(y0);
    }
  }

  // adapted parts and martingale coefficients down each level
  sys.Y.resize(N);
  sys.Y0.resize(N);
  sys.Z.assign(N, {});
  sys.Z0.assign(N, {});
  for (int j = 0; j < N; ++j) {
    sys.Y[j] = tree_project_to(tree, sys.Ytilde[j], j);
    sys.Y0[j] = tree_project_to(tree, sys.Y0tilde[j], j);
    sys.Z[j].resize(j);
    sys.Z0[j].resize(j);
    NodeField w = sys.Y[j], w0 = sys.Y0[j];
    for (int l = j - 1; l >= 0; --l) {
      sys.Z[j][l] = tree_mart_coeff(w, l, h);
      sys.Z0[j][l] = tree_mart_coeff(w0, l, h);
      w = tree_project(w, l);
      w0 = tree_project(w0, l);
    }
  }

  // drivers
  sys.psi.assign(N, NodeField(leaves));
  sys.psi0.assign(N, NodeField(leaves));
  for (int j = 0; j < N; ++j) {
    for (int p = 0; p < leaves; ++p) {
      const Vector& GXT = sys.eta[N][p];
      const Vector& zj = sys.zeta[j][ScenarioTree::ancestor(p, j)];
      sys.psi[j][p] = coeffs.Q[j] * sys.Xbar[j][ScenarioTree::ancestor(p, j)] +
                      coeffs.A(N, j).transpose() * GXT + coeffs.C(N, j).transpose() * zj;
      sys.psi0[j][p] = coeffs.B(N, j).transpose() * GXT + coeffs.D(N, j).transpose() * zj;
    }
  }

  solve_type3(coeffs, tree, sys);
  return sys;
}

void solve_type3(const SampledCoefficients& coeffs, const ScenarioTree& tree, BsvieSystem& sys) {
  const int n = sys.n, m = sys.m, N = sys.N;
  const double h = sys.h;
  const int leaves = tree.leaves();
  sys.YA.resize(N);
  sys.YB.resize(N);
  sys.YC.resize(N);
  sys.YD.resize(N);
  sys.ZA.resize(N);
  sys.ZB.resize(N);
  sys.ZC.resize(N);
  sys.ZD.resize(N);
  sys.Phi.resize(N);
  for (int k = N - 1; k >= 0; --k) {
    NodeField yA(leaves), yB(leaves), yC(leaves), yD(leaves);
    for (int p = 0; p < leaves; ++p) {
      Vector a = Vector::Zero(n), b = Vector::Zero(m);
      Vector c = Vector::Zero(n), d = Vector::Zero(m);
      for (int i = k + 1; i < N; ++i) {
        const Vector& phi = sys.Phi[i][ScenarioTree::ancestor(p, i)];
        a += h * (coeffs.A(i, k).transpose() * phi);
        b += h * (coeffs.B(i, k).transpose() * phi);
        c += h * (coeffs.C(i, k).transpose() * phi);
        d += h * (coeffs.D(i, k).transpose() * phi);
      }
      yA[p] = std::move(a);
      yB[p] = std::move(b);
      yC[p] = std::move(c);
      yD[p] = std::move(d);
    }
    NodeField wA = tree_project_to(tree, yA, k + 1);
    NodeField wB = tree_project_to(tree, yB, k + 1);
    NodeField wC = tree_project_to(tree, yC, k + 1);
    NodeField wD = tree_project_to(tree, yD, k + 1);
    sys.ZA[k] = tree_mart_coeff(wA, k, h);
    sys.ZB[k] = tree_mart_coeff(wB, k, h);
    sys.ZC[k] = tree_mart_coeff(wC, k, h);
    sys.ZD[k] = tree_mart_coeff(wD, k, h);
    sys.YA[k] = tree_project(wA, k);
    sys.YB[k] = tree_project(wB, k);
    sys.YC[k] = tree_project(wC, k);
    sys.YD[k] = tree_project(wD, k);
    // Phi_k = E_k psi_k + YA_k + ZC(k, k); this equals the adapted Y_k
    NodeField Epsi = tree_project_to(tree, sys.psi[k], k);
    sys.Phi[k].resize(tree.nodes(k));
    for (int j = 0; j < tree.nodes(k); ++j)
      sys.Phi[k][j] = Epsi[j] + sys.YA[k][j] + sys.ZC[k][j];
  }
}

StationarityReport check_stationarity(const BsvieSystem& sys, const SampledCoefficients& coeffs,
                                      const AdaptedControl& ubar) {
  StationarityReport rep;
  const int N = sys.N;
  for (int k = 0; k < N; ++k) {
    NodeField Epsi0 = tree_project_to(ScenarioTree{N, sys.h}, sys.psi0[k], k);
    for (int j = 0; j < (1 << k); ++j) {
      Vector direct = coeffs.R[k] * ubar.u[k][j] + sys.Y0[k][j];
      Vector split = coeffs.R[k] * ubar.u[k][j] + Epsi0[j] + sys.YB[k][j] + sys.ZD[k][j];
      note_residual(rep.direct, direct.cwiseAbs().maxCoeff(), k, j, k);
      note_residual(rep.split, split.cwiseAbs().maxCoeff(), k, j, k);
      rep.form_gap = std::max(rep.form_gap, (direct - split).cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

ResidualReport check_dual_representation(const BsvieSystem& sys, const RiccatiSolution& sol,
                                         const ScenarioTree& tree,
                                         const std::vector<NodeField>& chi) {
  ResidualReport rep;
  const int n = sys.n, N = sys.N;
  const double h = sys.h;
  // E_k[Y_j] for all k <= j, by cumulative projection
  std::vector<std::vector<NodeField>> EY(N);
  for (int j = 0; j < N; ++j) {
    EY[j].resize(j + 1);
    EY[j][j] = sys.Y[j];
    for (int l = j - 1; l >= 0; --l) EY[j][l] = tree_project(EY[j][l + 1], l);
  }
  for (int k = 0; k <= N; ++k) {
    for (int q = 0; q < tree.nodes(k); ++q) {
      Vector lhs = sol.P[k] * chi[k][q];
      Vector rhs(lhs.size());
      for (int j = k; j < N; ++j) rhs.segment((j - k) * n, n) = h * EY[j][k][q];
      rhs.tail(n) = sys.eta[k][q];
      note_residual(rep, (lhs - rhs).cwiseAbs().maxCoeff(), k, q, k);
    }
  }
  return rep;
}

}  // namespace vlq
