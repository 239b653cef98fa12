#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spaceform/linalg.hpp"

namespace spaceform {

/// Truncated Taylor series F(z) = sum_k a_k (lambda z)^k, |k| <= D, for each
/// component of a holomorphic map. The series was computed on the torus
/// |lambda z_i| = rho; `negative_mass` is the discarded negative-frequency
/// mass (zero for an exactly holomorphic input).
class PowerSeriesMap {
 public:
  PowerSeriesMap() = default;
  PowerSeriesMap(int nvars, int components, int degree, double rho, double lambda = 1.0);

  int nvars() const { return nvars_; }
  int components() const { return components_; }
  int degree() const { return degree_; }
  double rho() const { return rho_; }
  double lambda() const { return lambda_; }

  double negative_mass() const { return negative_mass_; }
  void set_negative_mass(double e) { negative_mass_ = e; }
  /// Max |series - sample| over the torus samples used for construction.
  double torus_residual() const { return torus_residual_; }
  void set_torus_residual(double r) { torus_residual_ = r; }

  /// Multi-indices of total degree <= D, graded then lexicographic.
  const std::vector<std::vector<int>>& indices() const { return indices_; }
  std::size_t index_of(const std::vector<int>& k) const;
  cplx& coeff(int component, std::size_t idx) {
    return coeffs_[static_cast<std::size_t>(component)][idx];
  }
  cplx coeff(int component, std::size_t idx) const {
    return coeffs_[static_cast<std::size_t>(component)][idx];
  }
  cplx coeff(int component, const std::vector<int>& k) const {
    return coeff(component, index_of(k));
  }

  /// Both take original (unscaled) coordinates.
  CVec eval(const CVec& z) const;
  /// dF_i / dz_j by term-wise differentiation.
  CMat jacobian(const CVec& z) const;

  /// Text format: '#' comments, header lines "n", "components", "degree",
  /// "rho", "lambda", "negative_mass", then per component a "component <i>"
  /// line followed by one "k1 ... kn re im" line per multi-index.
  std::string to_text() const;
  static PowerSeriesMap from_text(std::string_view text);

 private:
  std::vector<CVec> powers(const CVec& w) const;

  int nvars_ = 0;
  int components_ = 0;
  int degree_ = 0;
  double rho_ = 0.0;
  double lambda_ = 1.0;
  double negative_mass_ = 0.0;
  double torus_residual_ = 0.0;
  std::vector<std::vector<int>> indices_;
  std::vector<std::vector<cplx>> coeffs_;
};

/// Points of the distinguished torus |lambda z_i| = rho, m angles per
/// coordinate, in row-major order (first coordinate slowest). Coordinates
/// beyond `nvars` are fixed to `tail` (original coordinates).
std::vector<CVec> torus_points(int nvars, double rho, int m, double lambda = 1.0,
                               const CVec& tail = CVec());

struct TorusOptions {
  int degree = 20;
  /// Reject when the negative-frequency mass exceeds this times max |F|.
  double holomorphy_tolerance = 1e-6;
};

/// Iterated Cauchy integral over the torus by an n-dimensional DFT:
/// a_k = c_k rho^{-|k|}. `values[i]` is F at torus_points(...)[i].
/// Throws NotHolomorphic when the negative-frequency mass is too large.
PowerSeriesMap torus_extend(const std::vector<CVec>& values, int nvars, double rho, int m,
                            double lambda, const TorusOptions& opts = {});

/// Per-slice two-variable extensions in (z1, z2) for fixed (z3..zn).
struct SliceFamily {
  std::vector<CVec> slices;             // fixed tail coordinates
  std::vector<PowerSeriesMap> series;   // nvars = 2 each
  /// Largest coefficient change between consecutive slices.
  double continuity = 0.0;
};

/// `values[s][i]` is F at torus_points(2, rho, m, lambda, slices[s])[i].
SliceFamily slice_extend(const std::vector<std::vector<CVec>>& values,
                         const std::vector<CVec>& slices, double rho, int m, double lambda,
                         const TorusOptions& opts = {});

/// Assembles a three-variable series from slices placed on the ring
/// |lambda z3| = rho3 at equally spaced angles, via a DFT in z3.
PowerSeriesMap assemble_ring(const SliceFamily& family, double rho3, const TorusOptions& opts = {});

}  // namespace spaceform
