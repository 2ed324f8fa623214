#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "vlq/grid.hpp"
#include "vlq/lifted.hpp"
#include "vlq/riccati.hpp"
#include "vlq/types.hpp"

namespace vlq {

/// Binary scenario tree of depth N for the two-point driver: level-k nodes
/// are indexed 0..2^k-1 by the first k sign bits (bit r = sign at step r,
/// 0 -> -sqrt(h), 1 -> +sqrt(h)). The two children of (k, j) are
/// (k+1, j) and (k+1, j + 2^k); the ancestor of leaf p at level k is
/// p & (2^k - 1). Conditional expectation is child averaging and the
/// martingale coefficient is the scaled child difference, both exact.
struct ScenarioTree {
  int N = 0;
  double h = 0.0;

  int nodes(int level) const { return 1 << level; }
  int leaves() const { return 1 << N; }
  static int ancestor(int leaf, int level) { return leaf & ((1 << level) - 1); }
  double sign(int leaf, int step) const { return (leaf >> step) & 1 ? 1.0 : -1.0; }
  double xi(int leaf, int step) const { return sign(leaf, step) * std::sqrt(h); }
};

/// Values of one process on all nodes of one tree level.
using NodeField = std::vector<Vector>;

// child field at level+1 -> conditional expectation at level
NodeField tree_project(const NodeField& child, int level);
// child field at level+1 -> martingale coefficient z at level:
// v = E[v] + z xi with xi = +-sqrt(h)
NodeField tree_mart_coeff(const NodeField& child, int level, double h);
// repeated projection of a leaf field down to `level`
NodeField tree_project_to(const ScenarioTree& tree, const NodeField& leaf_field, int level);

/// Control adapted to the tree filtration: u[k][j] in R^m at node (k, j).
struct AdaptedControl {
  int m = 0;
  std::vector<NodeField> u;  // u[k] has 2^k entries, k = 0..N-1
};

struct QpSolution {
  AdaptedControl control;
  double value = 0.0;
  double hessian_min_pivot = 0.0;  // smallest Cholesky pivot, convexity certificate
};

/// Exact minimizer of the discrete cost over all adapted controls, by
/// eliminating the state along each tree path and solving the dense
/// stationarity system.
QpSolution solve_adapted_qp(const SampledCoefficients& coeffs, const TimeGrid& grid,
                            const ScenarioTree& tree, const DiscretePath& chi0);

/// Forecast vectors chi_k at every node under a given adapted control.
std::vector<NodeField> propagate_tree(const LiftedSystem& lifted, const DiscretePath& chi0,
                                      const AdaptedControl& control, const ScenarioTree& tree);

/// Evaluate the feedback u_k = Theta_k chi_k on every node.
AdaptedControl replay_feedback(const LiftedSystem& lifted, const std::vector<Matrix>& Theta,
                               const DiscretePath& chi0, const ScenarioTree& tree);

double tree_cost(const SampledCoefficients& coeffs, const ScenarioTree& tree,
                 const std::vector<NodeField>& chi, const AdaptedControl& control);

/// First-order optimality data along a tree trajectory: the terminal
/// martingale pair (eta, zeta), the adjoint fields Y, Y0 with their
/// martingale coefficients Z, Z0, the drivers psi, psi0, and the
/// split fields YA..YD / ZA..ZD whose drifts carry the diagonal ZC.
struct BsvieSystem {
  int n = 0, m = 0, N = 0;
  double h = 0.0;

  std::vector<NodeField> Xbar;    // optimal state, level k = 0..N
  AdaptedControl ubar;

  std::vector<NodeField> eta;     // E_k[G Xbar_N], level k = 0..N
  std::vector<NodeField> zeta;    // martingale coefficient of eta, k = 0..N-1

  std::vector<NodeField> Ytilde;  // leaf-measurable adjoint, index j = 0..N-1, leaf fields
  std::vector<NodeField> Y0tilde;
  std::vector<NodeField> Y;       // adapted Y(s_j) = E_j[Ytilde_j], level-j fields
  std::vector<NodeField> Y0;
  std::vector<std::vector<NodeField>> Z;   // Z[j][l], l < j: level-l field
  std::vector<std::vector<NodeField>> Z0;  // same layout

  std::vector<NodeField> psi;   // leaf fields, j = 0..N-1
  std::vector<NodeField> psi0;

  std::vector<NodeField> YA, YB, YC, YD;  // level-k fields, k = 0..N-1
  std::vector<NodeField> ZA, ZB, ZC, ZD;  // diagonal coefficients Z*(s_k, s_k)
  std::vector<NodeField> Phi;             // E_k psi_k + YA_k + ZC_kk, level-k fields
};

BsvieSystem solve_optimality_bsvies(const SampledCoefficients& coeffs, const TimeGrid& grid,
                                    const ScenarioTree& tree, const std::vector<NodeField>& chi,
                                    const AdaptedControl& ubar);

/// Given the leaf driver fields psi, psi0, solves the coupled split system
/// by backward induction and returns it embedded in a BsvieSystem shell
/// (fields YA..YD, ZA..ZD, Phi filled).
void solve_type3(const SampledCoefficients& coeffs, const ScenarioTree& tree, BsvieSystem& sys);

struct ResidualReport {
  double max_residual = 0.0;
  int argmax_step = -1;
  int argmax_node = -1;
  std::string argmax_signs;  // sign string of the argmax node
};

/// max node residual of R u + Y0 = 0, plus the same condition in split
/// form R u + E psi0 + YB + ZD; the two must agree to roundoff.
struct StationarityReport {
  ResidualReport direct;
  ResidualReport split;
  double form_gap = 0.0;  // max |direct - split| pointwise
};

StationarityReport check_stationarity(const BsvieSystem& sys, const SampledCoefficients& coeffs,
                                      const AdaptedControl& ubar);

/// Checks P_k chi_k against the adjoint fields: block j (k <= j < N) of
/// P_k chi_k equals h E_k[Y_j], and the terminal block equals eta_k.
ResidualReport check_dual_representation(const BsvieSystem& sys, const RiccatiSolution& sol,
                                         const ScenarioTree& tree,
                                         const std::vector<NodeField>& chi);

}  // namespace vlq
