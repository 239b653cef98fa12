#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spaceform/developing.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/power_series.hpp"

namespace spaceform {

struct JacobianCheck {
  double min_abs_det = 0.0;
  CVec location;
  bool pass = false;
};

/// min |det dF| over the points, with dF from term-wise differentiation.
JacobianCheck jacobian_check(const PowerSeriesMap& series, const std::vector<CVec>& grid,
                             double threshold);

struct ContainmentCheck {
  double boundary_max = 0.0;  // max h on the boundary samples
  double interior_max = 0.0;  // max h on the interior grid
  double margin = 0.0;        // 1 - boundary_max for c < 0
  bool pass = false;
};

/// c < 0: h = sum |F_i|^2 must satisfy max_interior h <= max_boundary h + 1e-8
/// and max_boundary h < 1. c = 0 passes. c > 0: every |F_i| stays below the
/// affine chart bound.
ContainmentCheck containment_check(const PowerSeriesMap& series, const ModelSpace& m,
                                   const std::vector<CVec>& boundary,
                                   const std::vector<CVec>& interior);

struct ExtensionConfig {
  double rho = 0.0;  // in rescaled units; 0 picks the midpoint of the admissible interval
  int m = 64;
  int degree = 20;
  /// n >= 3 with the plane puncture: 2-torus slices on a ring in z3.
  bool sliced = false;
  int slice_m = 16;

  double holomorphy_tolerance = 1e-6;
  double det_threshold = 0.5;
  double det_radius = 0.3;
  int det_grid = 7;  // points per real axis
  double agreement_tolerance = 1e-5;
  int overlap_samples = 200;
  double origin_tolerance = 1e-6;

  CVec base_point;  // empty: the first torus sample
  GermOptions germ = [] {
    GermOptions g;
    g.frame = FrameChoice::identity_type;
    return g;
  }();
  DevelopOptions develop;
  std::uint64_t seed = 0;

  /// Test hook applied to every torus value F(z) before extension.
  std::function<CVec(const CVec& z, const CVec& F)> inject;
};

struct ExtensionReport {
  double lambda = 1.0;
  double rho = 0.0;
  int degree = 0;
  int m = 0;
  std::size_t torus_samples = 0;
  double holomorphy_residual = 0.0;  // negative-frequency mass / max |F|
  double torus_residual = 0.0;
  double min_abs_det = 0.0;
  CVec det_location;
  double containment_margin = 0.0;
  double interior_max_h = 0.0;
  double boundary_max_h = 0.0;
  double agreement_residual = 0.0;
  double origin_residual = 0.0;
  bool holomorphy_pass = false;
  bool det_pass = false;
  bool containment_pass = false;
  bool agreement_pass = false;
  bool origin_pass = false;
  bool pass = false;
  std::vector<std::string> notes;
};

void to_json(nlohmann::json& j, const ExtensionReport& r);

/// Raised when a sub-check fails; carries the partial report.
class ExtensionFailure : public Error {
 public:
  ExtensionFailure(const std::string& what, ExtensionReport report)
      : Error(what), report_(std::move(report)) {}
  const ExtensionReport& report() const { return report_; }

 private:
  ExtensionReport report_;
};

struct ExtensionResult {
  MetricField extended;
  PowerSeriesMap series;
  Germ base;
  ExtensionReport report;
};

/// Develops the field on the distinguished torus, extends the developing map
/// by Cauchy integration, checks it, and returns g~ = dF^H G(F) dF inside the
/// polydisc (the original metric outside) as a component-backed field.
ExtensionResult extend_metric(const MetricField& field, const ModelSpace& m,
                              const ExtensionConfig& cfg = {});

/// Metric pulled back from the model by the series at z.
CMat series_pullback(const PowerSeriesMap& series, const ModelSpace& m, const CVec& z);

/// Finds tau with D1 = tau o D2 from the two base germs, checks it on
/// samples, and reports the largest metric deviation |g1 - g2|.
VerificationReport uniqueness_compare(const ExtensionResult& a, const ExtensionResult& b,
                                      const MetricField& field, const ModelSpace& m,
                                      int samples = 100, std::uint64_t seed = 0,
                                      double map_tolerance = 1e-6,
                                      double metric_tolerance = 1e-5);

/// Uniform random points of the polydisc |lambda z_i| < rho outside the
/// field's guard zones.
std::vector<CVec> polydisc_samples(const MetricField& field, double rho, double lambda,
                                   int count, std::uint64_t seed);

}  // namespace spaceform
