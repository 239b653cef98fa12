#include "spaceform/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace spaceform {

namespace {

CMat spectral_apply(const CMat& H, double power) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (H + H.adjoint()));
  RVec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev[i] = std::pow(std::max(ev[i], 0.0), power);
  return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMat hermitian_sqrt(const CMat& H) { return spectral_apply(H, 0.5); }

CMat hermitian_inv_sqrt(const CMat& H) { return spectral_apply(H, -0.5); }

bool is_positive_definite(const CMat& H, double herm_tol) {
  if (H.rows() != H.cols() || H.rows() == 0) return false;
  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  if ((H - H.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale) return false;
  if (!H.allFinite()) return false;
  Eigen::LLT<CMat> llt(0.5 * (H + H.adjoint()));
  return llt.info() == Eigen::Success;
}

double op_norm(const CMat& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(A);
  return svd.singularValues()(0);
}

CVec from_list(const std::vector<cplx>& v) {
  CVec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

}  // namespace spaceform
