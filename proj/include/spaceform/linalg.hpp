#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace spaceform {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr cplx I_unit{0.0, 1.0};

// Hermitian form h(xi, eta) = eta^H H xi; the Riemannian metric is Re h.
inline cplx hermitian(const CMat& H, const CVec& xi, const CVec& eta) {
  return eta.dot(H * xi);
}

inline double riemannian(const CMat& H, const CVec& xi, const CVec& eta) {
  return hermitian(H, xi, eta).real();
}

inline double metric_norm(const CMat& H, const CVec& xi) {
  return std::sqrt(std::max(0.0, riemannian(H, xi, xi)));
}

// Real coordinates (x_1, y_1, ..., x_n, y_n) <-> complex vector.
inline RVec to_real(const CVec& z) {
  RVec x(2 * z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    x[2 * i] = z[i].real();
    x[2 * i + 1] = z[i].imag();
  }
  return x;
}

inline CVec to_complex(const RVec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = cplx(x[2 * i], x[2 * i + 1]);
  return z;
}

/// Hermitian positive-definite square root via eigendecomposition.
CMat hermitian_sqrt(const CMat& H);
CMat hermitian_inv_sqrt(const CMat& H);

bool is_positive_definite(const CMat& H, double herm_tol = 1e-8);

/// Operator (spectral) norm.
double op_norm(const CMat& A);

CVec from_list(const std::vector<cplx>& v);

}  // namespace spaceform
