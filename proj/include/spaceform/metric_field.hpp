#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spaceform/expr.hpp"
#include "spaceform/linalg.hpp"

namespace spaceform {

/// Excluded set inside the domain ball.
struct Puncture {
  enum class Kind {
    ball,     // closed ball |z - center| <= radius
    plane12,  // {z1 = z2 = 0}
    divisor,  // {z_coord = 0}
  };
  Kind kind = Kind::ball;
  CVec center;
  double radius = 0.0;
  int coord = 0;

  static Puncture closed_ball(CVec center, double radius);
  static Puncture plane();
  static Puncture hyperplane(int coord);

  /// Euclidean distance from z to the excluded set (negative inside a ball).
  double distance(const CVec& z) const;
  /// Smallest distance() along the chord from a to b.
  double segment_distance(const CVec& a, const CVec& b) const;
};

struct Domain {
  double radius = 1.0;
  std::vector<Puncture> punctures;
  double guard_fraction = 1e-3;

  double guard() const { return guard_fraction * radius; }
  double distance_to_boundary(const CVec& z) const { return radius - z.norm(); }
  /// Distance to the nearest puncture; +inf when there are none.
  double distance_to_punctures(const CVec& z) const;
  /// Outside every guard zone and strictly inside the ball.
  bool admissible(const CVec& z) const;
  /// Both endpoints admissible and the chord stays out of every puncture guard zone.
  bool segment_admissible(const CVec& a, const CVec& b) const;
  /// Default continuation step: a quarter of the puncture distance, capped at 0.05 radius.
  double step_limit(const CVec& z) const;
};

/// Metric matrix H (H(i,j) = d^2 phi / dz_j dzbar_i) and its complex derivatives.
struct MetricData {
  CMat H;
  std::vector<CMat> dH;                  // dH[k] = d/dz_k H
  std::vector<std::vector<CMat>> ddbarH;  // ddbarH[k][l] = d/dz_k d/dzbar_l H

  /// d/dzbar_l H = (d/dz_l H)^H for Hermitian H.
  CMat dbarH(int l) const { return dH[static_cast<std::size_t>(l)].adjoint(); }
};

/// A Kaehler metric on a punctured ball, backed by a potential or by components.
/// Immutable and shareable across threads.
class MetricField {
 public:
  using ComponentFn = std::function<CMat(const CVec&)>;

  static MetricField from_potential(int n, Expr potential, Domain domain, double scale = 1.0,
                                    std::string name = "potential");
  static MetricField from_components(int n, ComponentFn fn, Domain domain,
                                     double fd_step = 1e-4, std::string name = "components");
  /// Potential wins when both are supplied.
  static MetricField from_sources(int n, std::optional<Expr> potential,
                                  std::optional<ComponentFn> components, Domain domain);

  int dim() const;
  const Domain& domain() const;
  const std::string& name() const;
  bool potential_backed() const;
  const std::optional<Expr>& potential() const;
  double potential_scale() const;

  /// Throws DomainError inside guard zones, NotPositiveDefinite on a bad matrix.
  CMat metric_at(const CVec& z) const;
  /// order 0: H; 1: H and dH; 2: also ddbarH.
  MetricData derivatives(const CVec& z, int order) const;
  /// Same as derivatives() but skips the domain check (used by stencils).
  MetricData derivatives_unchecked(const CVec& z, int order) const;

  void check_point(const CVec& z) const;

 private:
  struct Impl;
  explicit MetricField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

}  // namespace spaceform
