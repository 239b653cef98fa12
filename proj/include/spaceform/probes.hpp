#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "spaceform/catalog.hpp"
#include "spaceform/exec.hpp"
#include "spaceform/linalg.hpp"

namespace spaceform {

/// A map of the punctured real unit ball with its Jacobian.
struct RealMap {
  int n = 0;
  std::string name;
  std::function<RVec(const RVec&)> f;
  std::function<RMat(const RVec&)> jacobian;
};

/// x -> x/2 + |x|/4 e1. Throws DomainError at x = 0 and outside the unit ball.
RVec f_minus_one(int n, const RVec& x);
RealMap f_minus_one_map(int n);
RealMap identity_map(int n);
/// x -> A x + quadratic terms; a smooth control map.
RealMap polynomial_map(int n);

/// Cube grid of `per_axis` points per axis inside the ball of radius `radius`, origin removed.
std::vector<RVec> punctured_grid(int n, int per_axis, double radius);

struct JacobianMinimum {
  double min_det = 0.0;
  RVec location;
  std::size_t points = 0;
};
JacobianMinimum jacobian_minimum(const RealMap& map, const std::vector<RVec>& grid,
                                 ExecPolicy policy = ExecPolicy::parallel);

struct DerivativeJump {
  std::vector<double> radii;
  std::vector<double> jumps;  // max |J(r d+) - J(r d-)| per radius
  RMat limit_plus;            // Jacobian at the smallest radius along d+
  RMat limit_minus;
  RMat jump_matrix;           // limit_plus - limit_minus
  double jump = 0.0;          // max entry of |jump_matrix|
};
DerivativeJump derivative_jump(const RealMap& map, const RVec& plus, const RVec& minus,
                               const std::vector<double>& radii);

/// Real space form metric 4 |dy|^2 / (1 + c |y|^2)^2 (curvature c), defined for |y| < 1.
RMat real_model_metric(double c, const RVec& y);
using RealMetric = std::function<RMat(const RVec&)>;
RMat real_pullback_metric(const RealMap& map, double c, const RVec& x);
/// Sectional curvature of span(u, v) from central differences of Christoffel
/// symbols, Richardson-extrapolated over `step` and `step / 2`.
double real_sectional_curvature(const RealMetric& g, const RVec& x, const RVec& u, const RVec& v,
                                double step = 1e-3);

struct ConeProfileRow {
  CVec point;
  double hsc = 0.0;
  double det_g = 0.0;  // det of the metric matrix g_{i jbar}
  double distance = 0.0;
};

struct ConeProfile {
  std::string entry;
  std::vector<double> beta;
  double expected_hsc = 0.0;
  double max_hsc_deviation = 0.0;
  double rate_exponent = 0.0;  // fitted slope of log g_{1 1bar} against log |z1|
  double expected_rate = 0.0;  // 2 (beta_1 - 1)
  std::vector<ConeProfileRow> rows;
};

/// HSC and metric blow-up along z = (t, z2_fixed..) as t -> 0, for cone-flat or cone-log.
ConeProfile cone_profile(const std::string& entry, const CatalogParams& params,
                         const std::vector<double>& distances, const CVec& tail = CVec(),
                         ExecPolicy policy = ExecPolicy::parallel);

void write_profile_csv(std::ostream& os, const ConeProfile& profile);

}  // namespace spaceform
