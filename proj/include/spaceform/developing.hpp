#pragma once

#include <vector>

#include "spaceform/exec.hpp"
#include "spaceform/geodesic.hpp"
#include "spaceform/metric_field.hpp"
#include "spaceform/models.hpp"
#include "spaceform/report.hpp"

namespace spaceform {

/// Local developing chart phi = exp_q o A o exp_p^{-1} around p.
/// Invariant: A^H G(q) A = g(p).
struct Germ {
  CVec p;
  ModelPoint q;
  CMat A;
};

enum class FrameChoice {
  gram_schmidt,   // q = model origin, A sends a g-orthonormal frame to the model frame
  identity_type,  // q = p in model coordinates, A = G(q)^{-1/2} g(p)^{1/2}
  explicit_frame  // q and A supplied by the caller
};

struct GermOptions {
  FrameChoice frame = FrameChoice::gram_schmidt;
  CVec explicit_q;  // explicit_frame only
  CMat explicit_A;  // explicit_frame only
  double space_form_tolerance = 1e-5;
  double isometry_tolerance = 1e-7;
};

struct ContinuationOptions {
  ShootingOptions shooting;
  int max_depth = 10;
};

/// Relative germ invariant residual |A^H G(q) A - g(p)| / |g(p)|.
double germ_isometry_residual(const MetricField& field, const ModelSpace& m, const Germ& g);

/// Throws NotSpaceForm if the field fails the space-form check at p.
Germ initial_germ(const MetricField& field, const ModelSpace& m, const CVec& p,
                  const GermOptions& opts = {});

struct GermValue {
  ModelPoint point;
  CMat differential;  // d phi at x, valid when requested
};

/// phi(x) = exp_q(A log_p(x)); the differential is P_model A P_field^{-1}.
/// Throws ContinuationNeeded when shooting from p to x fails.
GermValue evaluate_germ(const MetricField& field, const ModelSpace& m, const Germ& g,
                        const CVec& x, bool with_differential = true,
                        const ContinuationOptions& opts = {});

/// Continues the germ along a polyline starting at its center. Segments longer
/// than the domain step limit, or where shooting fails, are bisected up to
/// `max_depth` times before StepTooLarge is thrown.
Germ continue_germ(const MetricField& field, const ModelSpace& m, const Germ& g,
                   const std::vector<CVec>& path, const ContinuationOptions& opts = {});

/// Image-point distance plus operator-norm frame deviation; if the centers
/// differ, b is first evaluated at a's center.
double germ_distance(const MetricField& field, const ModelSpace& m, const Germ& a, const Germ& b,
                     const ContinuationOptions& opts = {});

/// Germs of the developing map at every sample, with the continuation tree.
struct DevelopedField {
  Germ base;
  std::vector<CVec> samples;
  std::vector<Germ> germs;     // germs[i].q = F(x_i), germs[i].A = dF(x_i)
  std::vector<long> parent;    // -1: continued directly from the base germ
  std::vector<int> depth;

  const ModelPoint& image(std::size_t i) const { return germs[i].q; }
  const CMat& differential(std::size_t i) const { return germs[i].A; }
};

struct DevelopOptions {
  int neighbors = 8;
  ExecPolicy policy = ExecPolicy::parallel;
  ContinuationOptions continuation;
};

/// Breadth-first continuation over the k-nearest-neighbour graph of the samples,
/// rooted at the base germ center. Edges whose chord meets a guard zone are
/// dropped. Throws UnreachableSamples if some samples are not connected.
DevelopedField develop_region(const MetricField& field, const ModelSpace& m, const Germ& base,
                              const std::vector<CVec>& samples, const DevelopOptions& opts = {});

/// Evaluates the development at an arbitrary point through the nearest sample germ.
GermValue evaluate_developed(const MetricField& field, const ModelSpace& m,
                             const DevelopedField& dev, const CVec& x,
                             const ContinuationOptions& opts = {});

/// g_alpha with phi^alpha = g_alpha o phi for the continuation along a closed loop.
ModelIsometry monodromy(const MetricField& field, const ModelSpace& m, const Germ& base,
                        const std::vector<CVec>& loop, const ContinuationOptions& opts = {});

/// max_i |dF^H G(F) dF - g| over the samples (operator norm).
VerificationReport verify_pullback(const MetricField& field, const ModelSpace& m,
                                   const DevelopedField& dev, double tol = 1e-6);

VerificationReport homotopy_invariance_check(const MetricField& field, const ModelSpace& m,
                                             const Germ& g, const std::vector<CVec>& path1,
                                             const std::vector<CVec>& path2, double tol = 1e-6,
                                             const ContinuationOptions& opts = {});

/// Straight polyline from a to b with steps no longer than `max_step`.
std::vector<CVec> segment_path(const CVec& a, const CVec& b, double max_step);
/// Closed polyline z_coord = center_coord + r e^{i theta}, theta in [0, 2 pi turns].
std::vector<CVec> circle_loop(const CVec& start, int coord, const cplx& center, int segments,
                              int turns = 1);

}  // namespace spaceform
