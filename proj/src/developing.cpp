#include "spaceform/developing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "spaceform/errors.hpp"
#include "spaceform/kahler.hpp"

namespace spaceform {

namespace {

bool same_point(const CVec& a, const CVec& b) { return (a - b).norm() <= 1e-12 * (1.0 + a.norm()); }

CMat model_origin_metric(const ModelSpace& m) {
  return model_metric_at(m, ModelPoint::standard(m, CVec::Zero(m.dim())));
}

// g-orthonormal frame by Gram-Schmidt over the coordinate basis.
CMat gram_schmidt_frame(const CMat& H) {
  const Eigen::Index n = H.rows();
  CMat F = CMat::Identity(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    CVec f = F.col(k);
    for (Eigen::Index j = 0; j < k; ++j) f -= hermitian(H, f, F.col(j)) * F.col(j);
    F.col(k) = f / std::sqrt(hermitian(H, f, f).real());
  }
  return F;
}

Germ step_germ(const MetricField& field, const ModelSpace& m, const Germ& g, const CVec& b,
               int depth, const ContinuationOptions& opts) {
  const double length = (b - g.p).norm();
  if (length == 0.0) return g;
  const double limit = std::min(field.domain().step_limit(g.p), field.domain().step_limit(b));
  if (length > limit && depth < opts.max_depth) {
    const CVec mid = 0.5 * (g.p + b);
    return step_germ(field, m, step_germ(field, m, g, mid, depth + 1, opts), b, depth + 1, opts);
  }
  try {
    const GermValue v = evaluate_germ(field, m, g, b, true, opts);
    return Germ{b, v.point, v.differential};
  } catch (const ContinuationNeeded&) {
    if (depth >= opts.max_depth)
      throw StepTooLarge("continuation step of length " + std::to_string(length) +
                         " still fails after maximal subdivision");
    const CVec mid = 0.5 * (g.p + b);
    return step_germ(field, m, step_germ(field, m, g, mid, depth + 1, opts), b, depth + 1, opts);
  }
}

}  // namespace

double germ_isometry_residual(const MetricField& field, const ModelSpace& m, const Germ& g) {
  const CMat H = field.metric_at(g.p);
  const CMat G = model_metric_at(m, g.q);
  return op_norm(g.A.adjoint() * G * g.A - H) / op_norm(H);
}

Germ initial_germ(const MetricField& field, const ModelSpace& m, const CVec& p,
                  const GermOptions& opts) {
  if (p.size() != m.dim() || field.dim() != m.dim())
    throw InvalidInput("germ dimension does not match the model");
  field.check_point(p);
  SpaceFormOptions sf;
  sf.tolerance = opts.space_form_tolerance;
  sf.policy = ExecPolicy::serial;
  const VerificationReport check = verify_space_form(field, {p}, m.c(), sf);
  if (!check.pass)
    throw NotSpaceForm("metric is not a space form of curvature " + std::to_string(m.c()) +
                       " at the base point (residual " + std::to_string(check.max_residual) + ")");
  const CMat H = field.metric_at(p);
  Germ g;
  g.p = p;
  switch (opts.frame) {
    case FrameChoice::gram_schmidt:
      g.q = ModelPoint::standard(m, CVec::Zero(m.dim()));
      g.A = hermitian_inv_sqrt(model_origin_metric(m)) * gram_schmidt_frame(H).inverse();
      break;
    case FrameChoice::identity_type:
      g.q = ModelPoint::standard(m, p);
      check_domain(m, g.q);
      g.A = hermitian_inv_sqrt(model_metric_at(m, g.q)) * hermitian_sqrt(H);
      break;
    case FrameChoice::explicit_frame:
      if (opts.explicit_q.size() != m.dim() || opts.explicit_A.rows() != m.dim() ||
          opts.explicit_A.cols() != m.dim())
        throw InvalidInput("explicit frame needs an image point and an n x n matrix");
      g.q = ModelPoint::standard(m, opts.explicit_q);
      check_domain(m, g.q);
      g.A = opts.explicit_A;
      break;
  }
  const double r = germ_isometry_residual(field, m, g);
  if (r > opts.isometry_tolerance)
    throw InvalidFrame("frame is not an isometry onto the model (residual " + std::to_string(r) +
                       ")");
  return g;
}

GermValue evaluate_germ(const MetricField& field, const ModelSpace& m, const Germ& g,
                        const CVec& x, bool with_differential, const ContinuationOptions& opts) {
  if (same_point(x, g.p)) return {g.q, g.A};
  CVec v;
  try {
    v = shoot(field, g.p, x, opts.shooting).v;
  } catch (const NoConvergence& e) {
    throw ContinuationNeeded(std::string("shooting failed: ") + e.what());
  } catch (const PathExitsDomain& e) {
    throw ContinuationNeeded(std::string("geodesic left the domain: ") + e.what());
  }
  GermValue out;
  out.point = model_exp(m, g.q, g.A * v);
  if (with_differential) {
    CMat T;
    try {
      T = geodesic_transport(field, g.p, v, 1.0, opts.shooting.integrator).T;
    } catch (const PathExitsDomain& e) {
      throw ContinuationNeeded(std::string("geodesic left the domain: ") + e.what());
    }
    out.differential = model_transport_matrix(m, g.q, out.point) * g.A * T.inverse();
  }
  return out;
}

Germ continue_germ(const MetricField& field, const ModelSpace& m, const Germ& g,
                   const std::vector<CVec>& path, const ContinuationOptions& opts) {
  if (path.empty()) return g;
  if (!same_point(path.front(), g.p))
    throw InvalidInput("continuation path must start at the germ center");
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!field.domain().segment_admissible(path[i], path[i + 1]))
      throw GeometryError("path segment " + std::to_string(i) + " enters a guard zone");
  Germ cur = g;
  for (std::size_t i = 1; i < path.size(); ++i) cur = step_germ(field, m, cur, path[i], 0, opts);
  return cur;
}

double germ_distance(const MetricField& field, const ModelSpace& m, const Germ& a, const Germ& b,
                     const ContinuationOptions& opts) {
  Germ other = b;
  if (!same_point(a.p, b.p)) {
    const GermValue v = evaluate_germ(field, m, b, a.p, true, opts);
    other = Germ{a.p, v.point, v.differential};
  }
  auto [q, A] = frame_to_chart(m, other.q, other.A, chart_index(m, a.q));
  return model_point_distance(m, a.q, q) + op_norm(a.A - A);
}

DevelopedField develop_region(const MetricField& field, const ModelSpace& m, const Germ& base,
                              const std::vector<CVec>& samples, const DevelopOptions& opts) {
  const std::size_t N = samples.size();
  // Node 0 is the base germ center, node i + 1 is sample i.
  auto node = [&](std::size_t k) -> const CVec& { return k == 0 ? base.p : samples[k - 1]; };
  const std::size_t k_nn = static_cast<std::size_t>(std::max(1, opts.neighbors));

  std::vector<std::vector<std::size_t>> nearest(N + 1);
  for_each_index(opts.policy, N + 1, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(N);
    for (std::size_t j = 0; j <= N; ++j)
      if (j != i) d.emplace_back((node(i) - node(j)).norm(), j);
    const std::size_t take = std::min(k_nn, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<long>(take), d.end());
    for (std::size_t t = 0; t < take; ++t)
      if (field.domain().segment_admissible(node(i), node(d[t].second)))
        nearest[i].push_back(d[t].second);
  });
  std::vector<std::vector<std::size_t>> adj(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
    for (std::size_t j : nearest[i]) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  for (std::size_t i = 0; i <= N; ++i) {
    auto& a = adj[i];
    std::sort(a.begin(), a.end(), [&](std::size_t x, std::size_t y) {
      const double dx = (node(i) - node(x)).norm(), dy = (node(i) - node(y)).norm();
      return dx < dy || (dx == dy && x < y);
    });
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  std::vector<long> parent_node(N + 1, -2);
  std::vector<std::vector<std::size_t>> levels{{0}};
  parent_node[0] = -1;
  while (!levels.back().empty()) {
    std::vector<std::size_t> next;
    for (std::size_t u : levels.back())
      for (std::size_t v : adj[u])
        if (parent_node[v] == -2) {
          parent_node[v] = static_cast<long>(u);
          next.push_back(v);
        }
    levels.push_back(std::move(next));
  }
  levels.pop_back();

  std::vector<std::size_t> unreachable;
  for (std::size_t i = 1; i <= N; ++i)
    if (parent_node[i] == -2) unreachable.push_back(i - 1);
  if (!unreachable.empty())
    throw UnreachableSamples(std::to_string(unreachable.size()) +
                                 " samples are not connected to the base point",
                             unreachable);

  DevelopedField dev;
  dev.base = base;
  dev.samples = samples;
  dev.germs.resize(N);
  dev.parent.assign(N, -1);
  dev.depth.assign(N, 0);
  for (std::size_t level = 1; level < levels.size(); ++level) {
    const auto& nodes = levels[level];
    for_each_index(opts.policy, nodes.size(), [&](std::size_t t) {
      const std::size_t v = nodes[t];
      const long u = parent_node[v];
      const Germ& from = u == 0 ? base : dev.germs[static_cast<std::size_t>(u - 1)];
      dev.germs[v - 1] = continue_germ(field, m, from, {from.p, samples[v - 1]}, opts.continuation);
      dev.parent[v - 1] = u - 1;
      dev.depth[v - 1] = static_cast<int>(level);
    });
  }
  return dev;
}

GermValue evaluate_developed(const MetricField& field, const ModelSpace& m,
                             const DevelopedField& dev, const CVec& x,
                             const ContinuationOptions& opts) {
  const Germ* best = nullptr;
  double best_d = std::numeric_limits<double>::infinity();
  auto consider = [&](const Germ& g) {
    const double d = (g.p - x).norm();
    if (d < best_d && field.domain().segment_admissible(g.p, x)) {
      best_d = d;
      best = &g;
    }
  };
  consider(dev.base);
  for (const auto& g : dev.germs) consider(g);
  if (!best) throw GeometryError("no developed sample sees the query point");
  const Germ g = continue_germ(field, m, *best, {best->p, x}, opts);
  return {g.q, g.A};
}

ModelIsometry monodromy(const MetricField& field, const ModelSpace& m, const Germ& base,
                        const std::vector<CVec>& loop, const ContinuationOptions& opts) {
  if (loop.empty() || !same_point(loop.front(), base.p) || !same_point(loop.back(), base.p))
    throw InvalidInput("monodromy loop must start and end at the germ center");
  const Germ end = continue_germ(field, m, base, loop, opts);
  return isometry_from_frame_data(m, base.q, end.q, end.A * base.A.inverse(), 1e-5);
}

VerificationReport verify_pullback(const MetricField& field, const ModelSpace& m,
                                   const DevelopedField& dev, double tol) {
  VerificationReport r;
  r.check = "pullback";
  r.tolerance = tol;
  double rel = 0.0;
  for (std::size_t i = 0; i < dev.samples.size(); ++i) {
    const CMat H = field.metric_at(dev.samples[i]);
    const CMat& A = dev.differential(i);
    const double d = op_norm(A.adjoint() * model_metric_at(m, dev.image(i)) * A - H);
    r.max_residual = std::max(r.max_residual, d);
    rel = std::max(rel, d / op_norm(H));
  }
  r.pass = r.max_residual <= tol;
  r.values["samples"] = static_cast<double>(dev.samples.size());
  r.values["max_relative_residual"] = rel;
  return r;
}

VerificationReport homotopy_invariance_check(const MetricField& field, const ModelSpace& m,
                                             const Germ& g, const std::vector<CVec>& path1,
                                             const std::vector<CVec>& path2, double tol,
                                             const ContinuationOptions& opts) {
  if (path1.empty() || path2.empty() || !same_point(path1.back(), path2.back()))
    throw InvalidInput("homotopic paths must share their endpoints");
  const Germ a = continue_germ(field, m, g, path1, opts);
  const Germ b = continue_germ(field, m, g, path2, opts);
  auto [q, A] = frame_to_chart(m, b.q, b.A, chart_index(m, a.q));
  VerificationReport r;
  r.check = "homotopy_invariance";
  r.tolerance = tol;
  r.values["point_deviation"] = model_point_distance(m, a.q, q);
  r.values["frame_deviation"] = op_norm(a.A - A);
  r.max_residual = r.values["point_deviation"] + r.values["frame_deviation"];
  r.pass = r.max_residual <= tol;
  return r;
}

std::vector<CVec> segment_path(const CVec& a, const CVec& b, double max_step) {
  const double len = (b - a).norm();
  const int steps = std::max(1, static_cast<int>(std::ceil(len / max_step - 1e-12)));
  std::vector<CVec> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) path.push_back(a + (static_cast<double>(k) / steps) * (b - a));
  path.back() = b;
  return path;
}

std::vector<CVec> circle_loop(const CVec& start, int coord, const cplx& center, int segments,
                              int turns) {
  const cplx offset = start[coord] - center;
  const double r = std::abs(offset), theta0 = std::arg(offset);
  const int total = segments * std::abs(turns);
  const double dir = turns >= 0 ? 1.0 : -1.0;
  std::vector<CVec> loop;
  loop.reserve(static_cast<std::size_t>(total) + 1);
  for (int k = 0; k <= total; ++k) {
    CVec z = start;
    z[coord] = center + std::polar(r, theta0 + dir * 2.0 * std::numbers::pi * k / segments);
    loop.push_back(std::move(z));
  }
  loop.back() = start;
  return loop;
}

}  // namespace spaceform
