#pragma once

#include <utility>
#include <vector>

#include "spaceform/linalg.hpp"

namespace spaceform {

enum class CurvatureSign { negative, zero, positive };

/// One of the three simply connected Kaehler space forms N_c of dimension n.
///
/// Canonical forms: c = -4 is the unit ball with potential -log(1-|z|^2),
/// c = +4 the affine charts of CP^n with potential log(1+|z|^2). Other c
/// rescale the metric by 4/|c|; geodesics and isometries are unchanged.
class ModelSpace {
 public:
  ModelSpace(double c, int n);

  double c() const { return c_; }
  int dim() const { return n_; }
  CurvatureSign sign() const { return sign_; }
  /// Metric scale relative to the canonical c = +-4 form.
  double scale() const { return scale_; }

 private:
  double c_;
  int n_;
  CurvatureSign sign_;
  double scale_;
};

/// Affine coordinates of a model point. For c > 0, `chart` is the index of the
/// homogeneous coordinate normalized to 1 (chart n is the standard chart).
struct ModelPoint {
  CVec coords;
  int chart = -1;

  static ModelPoint standard(const ModelSpace& m, CVec z);
};

/// Holomorphic isometry of N_c. Flat: z -> U z + b. Curved: fractional-linear
/// action of an (n+1)x(n+1) matrix M in U(n,1) (c < 0) or U(n+1) (c > 0).
struct ModelIsometry {
  CurvatureSign sign = CurvatureSign::zero;
  CMat U;
  CVec b;
  CMat M;

  static ModelIsometry identity(const ModelSpace& m);
  /// Deviation from the group-defining identity (U^H U = I, M^H J M = J, M^H M = I).
  double group_residual() const;
};

void check_domain(const ModelSpace& m, const ModelPoint& p);

CMat model_metric_at(const ModelSpace& m, const ModelPoint& z);
inline CMat model_metric_at(const ModelSpace& m, const CVec& z) {
  return model_metric_at(m, ModelPoint::standard(m, z));
}

ModelPoint model_exp(const ModelSpace& m, const ModelPoint& p, const CVec& v);
/// Throws NoConvergence when q is on the cut locus of p (c > 0).
CVec model_log(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q);
/// Parallel transport along the geodesic p -> q; result is in q's chart.
CVec model_parallel_transport(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q,
                              const CVec& v);
/// Matrix of the (complex-linear) transport map T_p -> T_q.
CMat model_transport_matrix(const ModelSpace& m, const ModelPoint& p, const ModelPoint& q);

/// Unique isometry sigma with sigma(p) = q and d sigma_p = A. Throws
/// InvalidFrame unless A^H H(q) A = H(p) within `tol` (relative).
ModelIsometry isometry_from_frame_data(const ModelSpace& m, const ModelPoint& p,
                                       const ModelPoint& q, const CMat& A, double tol = 1e-7);

/// The transvection along the geodesic from the origin to p.
ModelIsometry transvection(const ModelSpace& m, const ModelPoint& p);

/// Chart-aware action; for c > 0 the result may land in another chart.
ModelPoint apply_isometry(const ModelSpace& m, const ModelIsometry& s, const ModelPoint& z);
/// Action in affine coordinates of the standard chart. Throws ChartSwitch
/// (c > 0) or DomainError (c < 0) when the denominator is below `threshold`.
CVec apply_isometry_affine(const ModelSpace& m, const ModelIsometry& s, const CVec& z,
                           double threshold = 1e-12);
/// d sigma at z, expressed in the charts of z and sigma(z).
CMat isometry_differential(const ModelSpace& m, const ModelIsometry& s, const ModelPoint& z);

ModelIsometry compose(const ModelIsometry& a, const ModelIsometry& b);
ModelIsometry inverse(const ModelIsometry& s);

struct IsometryComparison {
  bool equal = false;
  double max_deviation = 0.0;
};
IsometryComparison isometries_equal(const ModelSpace& m, const ModelIsometry& a,
                                    const ModelIsometry& b, const std::vector<ModelPoint>& samples,
                                    double tol = 1e-8);

/// Re-expresses a point and tangent vector in another chart (c > 0 only).
std::pair<ModelPoint, CVec> to_chart(const ModelSpace& m, const ModelPoint& p, const CVec& v,
                                     int chart);
/// Active chart index (n for the standard chart and for c <= 0).
int chart_index(const ModelSpace& m, const ModelPoint& p);
/// Re-expresses a tangent frame (columns) at p in another chart (c > 0 only).
std::pair<ModelPoint, CMat> frame_to_chart(const ModelSpace& m, const ModelPoint& p,
                                           const CMat& A, int chart);
/// Coordinates of p in the standard chart; throws ChartSwitch if p is at infinity there.
CVec standard_coords(const ModelSpace& m, const ModelPoint& p);
/// Distance between model points measured in a common chart.
double model_point_distance(const ModelSpace& m, const ModelPoint& a, const ModelPoint& b);

}  // namespace spaceform
