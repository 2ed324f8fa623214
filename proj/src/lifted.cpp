#include "vlq/lifted.hpp"

namespace vlq {

LiftedSystem build_lifted(const SampledCoefficients& coeffs, const TimeGrid& grid) {
  LiftedSystem sys;
  sys.n = coeffs.n;
  sys.m = coeffs.m;
  sys.N = coeffs.N;
  sys.h = grid.h;
  const int n = sys.n, N = sys.N;
  const double h = sys.h;
  sys.F.resize(N);
  sys.Gu.resize(N);
  sys.H.resize(N);
  sys.L.resize(N);
  for (int k = 0; k < N; ++k) {
    const int d = sys.dim(k);       // (N-k+1) n
    const int dn = d - n;           // dimension after the drop
    // Pi_k (I + h Astack E_k): prefix-drop plus drift correction against X_k
    Matrix F = Matrix::Zero(dn, d);
    F.rightCols(dn).setIdentity();
    F.leftCols(n) += h * coeffs.Astack[k].bottomRows(dn);
    sys.F[k] = std::move(F);
    sys.Gu[k] = h * coeffs.Bstack[k].bottomRows(dn);
    Matrix H = Matrix::Zero(dn, d);
    H.leftCols(n) = coeffs.Cstack[k].bottomRows(dn);
    sys.H[k] = std::move(H);
    sys.L[k] = coeffs.Dstack[k].bottomRows(dn);
  }
  return sys;
}

}  // namespace vlq
