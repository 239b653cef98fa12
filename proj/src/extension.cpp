#include "spaceform/extension.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

constexpr double kChartBound = 10.0;

// Real grid of `per_axis` points per real coordinate, restricted to |z| <= radius.
std::vector<CVec> ball_grid(int n, double radius, int per_axis) {
  std::vector<CVec> out;
  const int dims = 2 * n;
  std::size_t total = 1;
  for (int d = 0; d < dims; ++d) total *= static_cast<std::size_t>(per_axis);
  for (std::size_t idx = 0; idx < total; ++idx) {
    RVec x(dims);
    std::size_t rem = idx;
    for (int d = 0; d < dims; ++d) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(per_axis));
      rem /= static_cast<std::size_t>(per_axis);
      x[d] = per_axis == 1 ? 0.0 : radius * (-1.0 + 2.0 * j / (per_axis - 1));
    }
    if (x.norm() <= radius * (1.0 + 1e-12)) out.push_back(to_complex(x));
  }
  return out;
}

// Polar grid of the polydisc |w_i| <= rho: radii rho k / rings, `angles` angles.
std::vector<CVec> polydisc_grid(int n, double rho, double lambda, int rings, int angles) {
  std::vector<cplx> axis{0.0};
  for (int k = 1; k <= rings; ++k)
    for (int a = 0; a < angles; ++a)
      axis.push_back(std::polar(rho * k / rings / lambda, 2.0 * std::numbers::pi * a / angles));
  std::vector<CVec> out;
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= axis.size();
  out.reserve(total);
  for (std::size_t idx = 0; idx < total; ++idx) {
    CVec z(n);
    std::size_t rem = idx;
    for (int i = 0; i < n; ++i) {
      z[i] = axis[rem % axis.size()];
      rem /= axis.size();
    }
    out.push_back(std::move(z));
  }
  return out;
}

// Radius (rescaled) of the smallest origin-centred ball holding the compact punctures.
double compact_radius(const Domain& d, double lambda) {
  double r = 0.0;
  for (const auto& p : d.punctures)
    if (p.kind == Puncture::Kind::ball) r = std::max(r, lambda * (p.center.norm() + p.radius));
  return r;
}

CVec model_coords(const ModelSpace& m, const ModelPoint& q) {
  try {
    return standard_coords(m, q);
  } catch (const ChartSwitch&) {
    throw GeometryError("developed image leaves the standard affine chart");
  }
}

}  // namespace

JacobianCheck jacobian_check(const PowerSeriesMap& series, const std::vector<CVec>& grid,
                             double threshold) {
  JacobianCheck out;
  out.min_abs_det = std::numeric_limits<double>::infinity();
  for (const auto& z : grid) {
    const double d = std::abs(series.jacobian(z).determinant());
    if (d < out.min_abs_det) {
      out.min_abs_det = d;
      out.location = z;
    }
  }
  out.pass = out.min_abs_det >= threshold;
  return out;
}

ContainmentCheck containment_check(const PowerSeriesMap& series, const ModelSpace& m,
                                   const std::vector<CVec>& boundary,
                                   const std::vector<CVec>& interior) {
  ContainmentCheck out;
  auto h = [&](const CVec& z) { return series.eval(z).squaredNorm(); };
  for (const auto& z : boundary) out.boundary_max = std::max(out.boundary_max, h(z));
  for (const auto& z : interior) out.interior_max = std::max(out.interior_max, h(z));
  switch (m.sign()) {
    case CurvatureSign::zero:
      out.margin = std::numeric_limits<double>::infinity();
      out.pass = true;
      break;
    case CurvatureSign::negative:
      out.margin = 1.0 - out.boundary_max;
      out.pass = out.interior_max <= out.boundary_max + 1e-8 && out.boundary_max < 1.0;
      break;
    case CurvatureSign::positive: {
      double worst = 0.0;
      for (const auto& z : interior) worst = std::max(worst, series.eval(z).cwiseAbs().maxCoeff());
      out.margin = kChartBound - worst;
      out.pass = worst < kChartBound;
      break;
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ExtensionReport& r) {
  auto finite = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  };
  nlohmann::json loc = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.det_location.size(); ++i)
    loc.push_back({r.det_location[i].real(), r.det_location[i].imag()});
  j = nlohmann::json{
      {"lambda", r.lambda},
      {"rho", r.rho},
      {"degree", r.degree},
      {"m", r.m},
      {"torus_samples", r.torus_samples},
      {"holomorphy", {{"residual", r.holomorphy_residual}, {"pass", r.holomorphy_pass}}},
      {"torus_residual", r.torus_residual},
      {"jacobian", {{"min_abs_det", finite(r.min_abs_det)}, {"location", loc}, {"pass", r.det_pass}}},
      {"containment",
       {{"margin", finite(r.containment_margin)},
        {"interior_max_h", r.interior_max_h},
        {"boundary_max_h", r.boundary_max_h},
        {"pass", r.containment_pass}}},
      {"agreement", {{"residual", r.agreement_residual}, {"pass", r.agreement_pass}}},
      {"origin", {{"residual", r.origin_residual}, {"pass", r.origin_pass}}},
      {"pass", r.pass},
      {"notes", r.notes}};
}

CMat series_pullback(const PowerSeriesMap& series, const ModelSpace& m, const CVec& z) {
  const CMat dF = series.jacobian(z);
  return dF.adjoint() * model_metric_at(m, ModelPoint::standard(m, series.eval(z))) * dF;
}

std::vector<CVec> polydisc_samples(const MetricField& field, double rho, double lambda,
                                   int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = field.dim();
  std::vector<CVec> out;
  int attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 1000 * std::max(count, 1))
      throw GeometryError("polydisc has no admissible points");
    CVec z(n);
    for (int i = 0; i < n; ++i)
      z[i] = std::polar(0.98 * rho * std::sqrt(u(rng)) / lambda, 2.0 * std::numbers::pi * u(rng));
    if (field.domain().admissible(z)) out.push_back(std::move(z));
  }
  return out;
}

ExtensionResult extend_metric(const MetricField& field, const ModelSpace& m,
                              const ExtensionConfig& cfg) {
  const int n = field.dim();
  if (n < 2) throw InvalidInput("holomorphic extension needs n >= 2");
  if (m.dim() != n) throw InvalidInput("model dimension does not match the field");
  const Domain& dom = field.domain();
  ExtensionReport rep;
  rep.lambda = 1.0 / dom.radius;
  const double lambda = rep.lambda;

  // Torus geometry in rescaled units: K inside B_r, r < rho, rho sqrt(n) < 1.
  const double r = compact_radius(dom, lambda);
  const double hi = 1.0 / std::sqrt(static_cast<double>(n));
  if (r >= hi)
    throw GeometryError("compact puncture does not fit inside B_{1/sqrt(n)} (radius " +
                        std::to_string(r) + ")");
  rep.rho = cfg.rho > 0.0 ? cfg.rho : 0.5 * (r + hi);
  if (!(rep.rho > r && rep.rho < hi))
    throw GeometryError("torus radius must lie in (" + std::to_string(r) + ", " +
                        std::to_string(hi) + ")");
  const bool sliced = cfg.sliced && n >= 3;
  if (sliced && n != 3) throw InvalidInput("sliced extension is implemented for n = 3");
  rep.m = sliced ? cfg.slice_m : cfg.m;
  rep.degree = cfg.degree;

  // Torus samples; for sliced runs, slice s occupies a contiguous block.
  std::vector<CVec> slices;
  std::vector<CVec> points;
  if (sliced) {
    for (int s = 0; s < cfg.slice_m; ++s) {
      CVec w(1);
      w[0] = std::polar(rep.rho / lambda, 2.0 * std::numbers::pi * s / cfg.slice_m);
      slices.push_back(w);
      const auto pts = torus_points(2, rep.rho, cfg.slice_m, lambda, w);
      points.insert(points.end(), pts.begin(), pts.end());
    }
  } else {
    points = torus_points(n, rep.rho, cfg.m, lambda);
  }
  rep.torus_samples = points.size();
  for (const auto& z : points)
    if (!dom.admissible(z)) throw GeometryError("distinguished torus meets a guard zone");

  const CVec base_point = cfg.base_point.size() > 0 ? cfg.base_point : points.front();
  const Germ base = initial_germ(field, m, base_point, cfg.germ);
  const DevelopedField dev = develop_region(field, m, base, points, cfg.develop);

  std::vector<CVec> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    values[i] = model_coords(m, dev.image(i));
    if (cfg.inject) values[i] = cfg.inject(points[i], values[i]);
  }

  TorusOptions topts;
  topts.degree = cfg.degree;
  topts.holomorphy_tolerance = cfg.holomorphy_tolerance;
  double fmax = 0.0;
  for (const auto& v : values) fmax = std::max(fmax, v.cwiseAbs().maxCoeff());
  PowerSeriesMap series;
  try {
    if (sliced) {
      const std::size_t per = points.size() / slices.size();
      std::vector<std::vector<CVec>> per_slice(slices.size());
      for (std::size_t s = 0; s < slices.size(); ++s)
        per_slice[s].assign(values.begin() + static_cast<long>(s * per),
                            values.begin() + static_cast<long>((s + 1) * per));
      const SliceFamily fam = slice_extend(per_slice, slices, rep.rho, cfg.slice_m, lambda, topts);
      rep.notes.push_back("slice continuity " + std::to_string(fam.continuity));
      series = assemble_ring(fam, rep.rho, topts);
    } else {
      series = torus_extend(values, n, rep.rho, cfg.m, lambda, topts);
    }
  } catch (const NotHolomorphic& e) {
    rep.holomorphy_residual = e.residual();
    rep.notes.push_back(e.what());
    throw ExtensionFailure(std::string("holomorphy check failed: ") + e.what(), rep);
  }
  rep.holomorphy_residual = series.negative_mass() / std::max(fmax, 1e-300);
  rep.holomorphy_pass = rep.holomorphy_residual <= cfg.holomorphy_tolerance;
  rep.torus_residual = series.torus_residual();

  const auto det = jacobian_check(series, ball_grid(n, cfg.det_radius, cfg.det_grid),
                                  cfg.det_threshold);
  rep.min_abs_det = det.min_abs_det;
  rep.det_location = det.location;
  rep.det_pass = det.pass;

  const int rings = n >= 3 ? 3 : 4;
  const auto cont = containment_check(series, m, points,
                                      polydisc_grid(n, rep.rho, lambda, rings, 8));
  rep.containment_margin = cont.margin;
  rep.interior_max_h = cont.interior_max;
  rep.boundary_max_h = cont.boundary_max;
  rep.containment_pass = cont.pass;

  const auto overlap = polydisc_samples(field, rep.rho, lambda, cfg.overlap_samples, cfg.seed);
  for (const auto& z : overlap)
    rep.agreement_residual = std::max(
        rep.agreement_residual, op_norm(series_pullback(series, m, z) - field.metric_at(z)));
  rep.agreement_pass = rep.agreement_residual <= cfg.agreement_tolerance;

  const CVec origin = CVec::Zero(n);
  const CMat g0 = series_pullback(series, m, origin);
  bool have_reference = false;
  try {
    const CMat ref = field.derivatives_unchecked(origin, 0).H;
    if (ref.allFinite() && is_positive_definite(ref, 1e-8)) {
      rep.origin_residual = op_norm(g0 - ref);
      have_reference = true;
    }
  } catch (const Error&) {
  }
  if (have_reference) {
    rep.origin_pass = rep.origin_residual <= cfg.origin_tolerance;
  } else {
    rep.origin_pass = is_positive_definite(g0, 1e-8);
    rep.notes.push_back("metric expression has no value at the origin; checked g~(0) > 0 only");
  }
  rep.pass = rep.holomorphy_pass && rep.det_pass && rep.containment_pass && rep.agreement_pass &&
             rep.origin_pass;
  if (!rep.pass) throw ExtensionFailure("extension sub-check failed", rep);

  const double rho = rep.rho;
  const ModelSpace model = m;
  const MetricField original = field;
  auto components = [series, model, original, rho, lambda](const CVec& z) -> CMat {
    if ((lambda * z).cwiseAbs().maxCoeff() <= rho) return series_pullback(series, model, z);
    return original.metric_at(z);
  };
  Domain ext_dom;
  ext_dom.radius = dom.radius;
  ext_dom.guard_fraction = dom.guard_fraction;
  ExtensionResult out{MetricField::from_components(n, components, ext_dom, 1e-4,
                                                   field.name() + "-extended"),
                      series, base, rep};
  return out;
}

VerificationReport uniqueness_compare(const ExtensionResult& a, const ExtensionResult& b,
                                      const MetricField& field, const ModelSpace& m, int samples,
                                      std::uint64_t seed, double map_tolerance,
                                      double metric_tolerance) {
  VerificationReport r;
  r.check = "uniqueness";
  r.tolerance = metric_tolerance;
  if ((a.base.p - b.base.p).norm() > 1e-12)
    throw InvalidInput("uniqueness comparison needs germs at a common base point");
  const ModelIsometry tau =
      isometry_from_frame_data(m, b.base.q, a.base.q, a.base.A * b.base.A.inverse(), 1e-6);
  const double rho = std::min(a.series.rho(), b.series.rho());
  const double lambda = a.series.lambda();
  double map_dev = 0.0, metric_dev = 0.0;
  for (const auto& z : polydisc_samples(field, rho, lambda, samples, seed)) {
    const ModelPoint d1 = ModelPoint::standard(m, a.series.eval(z));
    const ModelPoint d2 = apply_isometry(m, tau, ModelPoint::standard(m, b.series.eval(z)));
    map_dev = std::max(map_dev, model_point_distance(m, d1, d2));
    metric_dev = std::max(metric_dev, op_norm(a.extended.metric_at(z) - b.extended.metric_at(z)));
  }
  r.values["map_deviation"] = map_dev;
  r.values["metric_deviation"] = metric_dev;
  r.values["tau_group_residual"] = tau.group_residual();
  r.values["samples"] = samples;
  r.max_residual = metric_dev;
  r.pass = map_dev <= map_tolerance && metric_dev <= metric_tolerance;
  if (map_dev > map_tolerance) r.notes.push_back("D1 != tau o D2 beyond tolerance");
  return r;
}

}  // namespace spaceform
