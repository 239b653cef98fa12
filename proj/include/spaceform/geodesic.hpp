#pragma once

#include <vector>

#include "spaceform/metric_field.hpp"
#include "spaceform/ode.hpp"

namespace spaceform {

struct GeodesicState {
  CVec z;
  CVec zdot;
};

/// Geodesic end state together with the parallel transport matrix along it.
struct GeodesicTransport {
  GeodesicState end;
  CMat T;  // v(0) -> v(t); complex-linear
};

/// Solves zddot^k + Gamma^k_ij zdot^i zdot^j = 0 with
/// Gamma^k_ij = g^{k lbar} d_j g_{i lbar}, from (p, v) up to time t.
GeodesicState geodesic(const MetricField& field, const CVec& p, const CVec& v, double t,
                       const IntegratorOptions& opts = {});

GeodesicTransport geodesic_transport(const MetricField& field, const CVec& p, const CVec& v,
                                     double t = 1.0, const IntegratorOptions& opts = {});

CVec exp_map(const MetricField& field, const CVec& p, const CVec& v,
             const IntegratorOptions& opts = {});

/// Transport matrix along the straight segments of a polyline.
CMat transport_matrix(const MetricField& field, const std::vector<CVec>& path,
                      const IntegratorOptions& opts = {});
CVec parallel_transport(const MetricField& field, const std::vector<CVec>& path, const CVec& v,
                        const IntegratorOptions& opts = {});

struct ShootingOptions {
  IntegratorOptions integrator;
  int max_iterations = 50;
  /// Converged when |exp(p, v) - q| <= abs_tol + rel_tol |q - p|.
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double fd_step = 1e-7;
};

struct ShootingResult {
  CVec v;
  double residual = 0.0;
  int iterations = 0;
};

/// Initial velocity of the geodesic from p reaching q at unit time. Newton
/// from the chord q - p, with finite-difference Jacobian and step halving.
ShootingResult shoot(const MetricField& field, const CVec& p, const CVec& q,
                     const ShootingOptions& opts = {});
inline CVec log_map(const MetricField& field, const CVec& p, const CVec& q,
                    const ShootingOptions& opts = {}) {
  return shoot(field, p, q, opts).v;
}

}  // namespace spaceform
