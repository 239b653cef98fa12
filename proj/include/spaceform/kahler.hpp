#pragma once

#include <cstdint>
#include <vector>

#include "spaceform/exec.hpp"
#include "spaceform/metric_field.hpp"
#include "spaceform/report.hpp"

namespace spaceform {

/// Real tangent vector of R^{2n} = C^n; J acts as multiplication by i.
class RealTangent {
 public:
  RealTangent() = default;
  explicit RealTangent(CVec xi) : xi_(std::move(xi)) {}
  static RealTangent from_real(const RVec& x) { return RealTangent(to_complex(x)); }

  const CVec& complex() const { return xi_; }
  RVec real() const { return to_real(xi_); }
  RealTangent J() const { return RealTangent(I_unit * xi_); }
  Eigen::Index dim() const { return xi_.size(); }

  friend RealTangent operator*(double s, const RealTangent& v) { return RealTangent(s * v.xi_); }
  friend RealTangent operator+(const RealTangent& a, const RealTangent& b) {
    return RealTangent(a.xi_ + b.xi_);
  }

 private:
  CVec xi_;
};

/// R_{i jbar k lbar} at a point, with the calibrated sign:
/// HSC(xi) = 2 R(xi, xibar, xi, xibar) / |xi|^4.
class CurvatureComponents {
 public:
  CurvatureComponents(int n, CVec base) : n_(n), base_(std::move(base)), r_(static_cast<std::size_t>(n * n * n * n)) {}

  int dim() const { return n_; }
  const CVec& base() const { return base_; }
  cplx& operator()(int i, int j, int k, int l) { return r_[index(i, j, k, l)]; }
  cplx operator()(int i, int j, int k, int l) const { return r_[index(i, j, k, l)]; }

  /// S(a, b, c, d) = sum R_{i jbar k lbar} a^i conj(b^j) c^k conj(d^l).
  cplx contract(const CVec& a, const CVec& b, const CVec& c, const CVec& d) const;

  /// Largest violation of the Kaehler symmetries.
  double symmetry_residual() const;

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n_ + j) * n_ + k) * n_ + l);
  }
  int n_;
  CVec base_;
  std::vector<cplx> r_;
};

/// Sign of the textbook component formula (-d dbar g + g^{-1} dg dbar g)
/// that makes the Bergman potential -log(1-|z|^2) measure HSC -4.
int calibration_sign();

CurvatureComponents curvature_at(const MetricField& field, const CVec& z);

/// Rm(X,Y,Z,W) = g(R(X,Y)Z, W) with R(X,Y)Z = -nabla_X nabla_Y Z + nabla_Y nabla_X Z + nabla_[X,Y] Z.
double rm(const CurvatureComponents& R, const RealTangent& X, const RealTangent& Y,
          const RealTangent& Z, const RealTangent& W);
double rm(const MetricField& field, const CVec& z, const RealTangent& X, const RealTangent& Y,
          const RealTangent& Z, const RealTangent& W);

/// The constant-HSC model tensor evaluated with metric H.
double r0(const CMat& H, const RealTangent& X, const RealTangent& Y, const RealTangent& Z,
          const RealTangent& W);
double r0(const MetricField& field, const CVec& z, const RealTangent& X, const RealTangent& Y,
          const RealTangent& Z, const RealTangent& W);

/// Holomorphic sectional curvature of the J-plane spanned by X. `normalize`
/// rescales X to unit length first; otherwise X is taken as given.
double hsc(const MetricField& field, const CVec& z, const RealTangent& X, bool normalize = true);
double hsc(const CurvatureComponents& R, const CMat& H, const RealTangent& X, bool normalize = true);

struct SpaceFormOptions {
  double tolerance = 1e-5;
  int tuples_per_sample = 20;
  std::uint64_t seed = 0;
  ExecPolicy policy = ExecPolicy::parallel;
};

/// max |Rm - c R0| over samples and random unit 4-tuples, plus the least-squares c.
VerificationReport verify_space_form(const MetricField& field, const std::vector<CVec>& samples,
                                     double c, const SpaceFormOptions& opts = {});

/// Slow convention oracle: composes numeric covariant derivatives of constant
/// coordinate fields in the real picture, using only metric values.
double rm_oracle(const MetricField& field, const CVec& z, const RealTangent& X,
                 const RealTangent& Y, const RealTangent& Z, const RealTangent& W,
                 double metric_step = 1e-4, double christoffel_step = 1e-3);

/// Random vector of unit g-norm at z.
RealTangent random_unit(const CMat& H, std::uint64_t seed);

}  // namespace spaceform
