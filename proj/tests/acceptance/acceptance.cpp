// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "expr_gen.hpp"
#include "helpers.hpp"
#include "spaceform/catalog.hpp"
#include "spaceform/developing.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/expr.hpp"
#include "spaceform/extension.hpp"
#include "spaceform/kahler.hpp"
#include "spaceform/probes.hpp"
#include "spaceform/sampling.hpp"

using namespace spaceform;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void at_most(const std::string& label, double value, double bound) {
    const bool ok = value <= bound;
    pass = pass && ok;
    detail << ' ' << label << '=' << value << (ok ? "" : "(!)");
  }
  void at_least(const std::string& label, double value, double bound) {
    const bool ok = value >= bound;
    pass = pass && ok;
    detail << ' ' << label << '=' << value << (ok ? "" : "(!)");
  }
  void require(const std::string& label, bool ok) {
    pass = pass && ok;
    if (!ok) detail << ' ' << label << "(!)";
  }
};

struct ModelCase {
  const char* entry;
  double c;
};
const ModelCase kModels[] = {{"flat", 0.0}, {"bergman", -4.0}, {"fubini-study", 4.0}};

MetricField model_field(const ModelCase& mc, std::vector<Puncture> punctures = {}, int n = 2) {
  CatalogParams p;
  p.n = n;
  if (mc.c != 0.0) p.c = mc.c;
  p.punctures = std::move(punctures);
  return catalog(mc.entry, p);
}

double max_abs(const CMat& a) { return testing::max_abs(a); }

void space_form_identity(Outcome& out) {
  const auto samples = shell_samples(Domain{}, 2, 100, 0.0, 0.9, 0);
  for (const auto& mc : kModels) {
    SpaceFormOptions o;
    o.tuples_per_sample = 20;
    o.tolerance = mc.c == 0.0 ? 1e-9 : 1e-5;
    const auto r = verify_space_form(model_field(mc), samples, mc.c, o);
    out.at_most(mc.entry, r.max_residual, o.tolerance);
  }
}

void calibration(Outcome& out) {
  std::mt19937_64 rng(2);
  double bergman = 0.0, fs = 0.0, oracle = 0.0;
  const MetricField b = model_field(kModels[1]), f = model_field(kModels[2]);
  for (int k = 0; k < 20; ++k) {
    const CVec z = testing::random_point(rng, 2, 0.7);
    const RealTangent X(testing::random_vector(rng, 2));
    bergman = std::max(bergman, std::abs(hsc(b, z, X) + 4.0));
    fs = std::max(fs, std::abs(hsc(f, z, X) - 4.0));
    const CMat H = b.metric_at(z);
    const RealTangent U = random_unit(H, 4 * k), V = random_unit(H, 4 * k + 1),
                      W = random_unit(H, 4 * k + 2), Y = random_unit(H, 4 * k + 3);
    oracle = std::max(oracle, std::abs(rm(b, z, U, V, W, Y) - rm_oracle(b, z, U, V, W, Y)));
  }
  out.at_most("bergman_hsc_dev", bergman, 1e-5);
  out.at_most("fs_hsc_dev", fs, 1e-5);
  out.at_most("rm_vs_oracle", oracle, 1e-3);
}

std::vector<CVec> random_walk(std::mt19937_64& rng, int segments, double step, double bound) {
  std::vector<CVec> path{CVec::Zero(2)};
  while (static_cast<int>(path.size()) <= segments) {
    const CVec next = path.back() + step * testing::random_vector(rng, 2).normalized();
    if (next.norm() < bound) path.push_back(next);
  }
  return path;
}

void continuation(Outcome& out) {
  std::mt19937_64 rng(3);
  double residual = 0.0, subdivision = 0.0;
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc);
    const ModelSpace m(mc.c, 2);
    const Germ g = initial_germ(f, m, CVec::Zero(2));
    const auto path = random_walk(rng, 100, 0.04, 0.7);
    const Germ end = continue_germ(f, m, g, path);
    residual = std::max(residual, germ_isometry_residual(f, m, end));
    std::vector<CVec> fine{path.front()};
    for (std::size_t i = 1; i < path.size(); ++i) {
      fine.push_back(0.5 * (path[i - 1] + path[i]));
      fine.push_back(path[i]);
    }
    subdivision = std::max(subdivision, germ_distance(f, m, end, continue_germ(f, m, g, fine)));
  }
  out.at_most("germ_residual", residual, 1e-6);
  out.at_most("subdivision", subdivision, 1e-7);

  const MetricField f =
      model_field(kModels[1], {Puncture::closed_ball(from_list({cplx(-0.4), cplx(0.0)}), 0.1)});
  const ModelSpace m(-4, 2);
  const CVec a = from_list({cplx(0.1), cplx(0.0)});
  const CVec b = from_list({cplx(0.5, 0.3), cplx(0.1, 0.0)});
  const CVec via = from_list({cplx(0.2, 0.5), cplx(0.0, -0.1)});
  auto p2 = segment_path(a, via, 0.05);
  const auto tail = segment_path(via, b, 0.05);
  p2.insert(p2.end(), tail.begin() + 1, tail.end());
  const auto h = homotopy_invariance_check(f, m, initial_germ(f, m, a), segment_path(a, b, 0.05), p2);
  out.at_most("homotopy", h.max_residual, 1e-6);
}

void pullback(Outcome& out) {
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc, {Puncture::closed_ball(CVec::Zero(2), 0.2)});
    const ModelSpace m(mc.c, 2);
    const auto samples = shell_samples(f.domain(), 2, 200, 0.3, 0.7, 4);
    const Germ base = initial_germ(f, m, from_list({cplx(0.5), cplx(0.0)}));
    const auto r = verify_pullback(f, m, develop_region(f, m, base, samples));
    out.at_most(mc.entry, r.max_residual, 1e-6);
  }
}

Germ branch_germ(const MetricField& f, const ModelSpace& m, const CVec& a, const std::vector<double>& beta) {
  GermOptions o;
  o.frame = FrameChoice::explicit_frame;
  o.explicit_q = CVec(2);
  o.explicit_A = CMat::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    const double b = beta[static_cast<std::size_t>(i)];
    o.explicit_q[i] = std::pow(a[i].real(), b);
    o.explicit_A(i, i) = b * std::pow(a[i].real(), b - 1.0);
  }
  return initial_germ(f, m, a, o);
}

void monodromy_law(Outcome& out) {
  const ModelSpace m(0, 2);
  {
    CatalogParams p;
    p.beta = {0.5, 1.0};
    const MetricField f = catalog("cone-flat", p);
    const CVec a = from_list({cplx(0.5), cplx(0.0)});
    const Germ g = branch_germ(f, m, a, p.beta);
    CMat flip = CMat::Identity(2, 2);
    flip(0, 0) = -1.0;
    const ModelIsometry once = monodromy(f, m, g, circle_loop(a, 0, 0.0, 64));
    const ModelIsometry twice = monodromy(f, m, g, circle_loop(a, 0, 0.0, 64, 2));
    out.at_most("loop_vs_diag(-1,1)", std::max(max_abs(once.U - flip), once.b.norm()), 1e-6);
    out.at_most("squared_vs_identity",
                std::max(max_abs(twice.U - CMat::Identity(2, 2)), twice.b.norm()), 1e-6);
  }
  CatalogParams p;
  p.beta = {0.5, 1.0 / 3.0};
  const MetricField f = catalog("cone-flat", p);
  const CVec a = from_list({cplx(0.5), cplx(0.4)});
  const Germ g = branch_germ(f, m, a, p.beta);
  const auto la = circle_loop(a, 0, 0.0, 48);
  const auto lb = circle_loop(a, 1, 0.0, 48);
  auto cat = [](std::vector<CVec> x, const std::vector<CVec>& y) {
    x.insert(x.end(), y.begin() + 1, y.end());
    return x;
  };
  const std::vector<CVec> la_rev(la.rbegin(), la.rend());
  const ModelIsometry A = monodromy(f, m, g, la), B = monodromy(f, m, g, lb);
  std::vector<ModelPoint> probes;
  for (int k = 0; k < 4; ++k) probes.push_back(ModelPoint::standard(m, 0.3 * (k + 1) * CVec::Unit(2, k % 2)));
  const std::pair<std::vector<CVec>, ModelIsometry> words[] = {
      {cat(la, lb), compose(A, B)},
      {cat(cat(lb, lb), la), compose(compose(B, B), A)},
      {cat(cat(la, lb), la_rev), compose(compose(A, B), inverse(A))}};
  double worst = 0.0;
  for (const auto& [loop, expected] : words)
    worst = std::max(worst, isometries_equal(m, monodromy(f, m, g, loop), expected, probes, 1e-6).max_deviation);
  out.at_most("composition_3_words", worst, 1e-6);
}

void five_checks(Outcome& out, const std::string& label, const ExtensionReport& r, double c) {
  out.at_most(label + ".holomorphy", r.holomorphy_residual, 1e-6);
  out.at_least(label + ".min_det", r.min_abs_det, 0.5);
  if (c < 0) out.require(label + ".margin>0", r.containment_margin > 0.0);
  out.require(label + ".containment", r.containment_pass);
  out.at_most(label + ".agreement", r.agreement_residual, 1e-5);
  out.at_most(label + ".origin", r.origin_residual, 1e-6);
  out.require(label + ".pass", r.pass);
}

ExtensionReport run_extension(const MetricField& f, const ModelSpace& m, const ExtensionConfig& cfg = {}) {
  try {
    return extend_metric(f, m, cfg).report;
  } catch (const ExtensionFailure& e) {
    return e.report();
  }
}

void hartogs_ball(Outcome& out) {
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc, {Puncture::closed_ball(CVec::Zero(2), 0.2)});
    five_checks(out, mc.entry, run_extension(f, ModelSpace(mc.c, 2)), mc.c);
  }
}

void hartogs_plane(Outcome& out) {
  for (const auto& mc : {kModels[0], kModels[1]}) {
    const MetricField f = model_field(mc, {Puncture::plane()});
    five_checks(out, mc.entry, run_extension(f, ModelSpace(mc.c, 2)), mc.c);
  }
  ExtensionConfig sliced;
  sliced.sliced = true;
  sliced.slice_m = 16;
  sliced.degree = 7;
  const MetricField f3 = model_field(kModels[0], {Puncture::plane()}, 3);
  five_checks(out, "flat_n3_sliced", run_extension(f3, ModelSpace(0, 3), sliced), 0.0);
}

void uniqueness(Outcome& out) {
  for (const auto& mc : {kModels[0], kModels[1]}) {
    const MetricField f = model_field(mc, {Puncture::closed_ball(CVec::Zero(2), 0.2)});
    const ModelSpace m(mc.c, 2);
    ExtensionConfig a, b;
    b.germ.frame = FrameChoice::gram_schmidt;
    b.det_threshold = 0.1;
    const VerificationReport u = uniqueness_compare(extend_metric(f, m, a), extend_metric(f, m, b), f, m, 100);
    out.at_most(std::string(mc.entry) + ".metric", u.values.at("metric_deviation"), 1e-5);
    out.at_most(std::string(mc.entry) + ".tau", u.values.at("map_deviation"), 1e-6);
  }
}

void counterexample(Outcome& out) {
  const int n = 3;
  const RealMap f = f_minus_one_map(n);
  const JacobianMinimum jm = jacobian_minimum(f, punctured_grid(n, 10, 1.0));
  out.at_least("min_det", jm.min_det, std::pow(0.5, n + 1) - 1e-9);
  const RVec e = RVec::Unit(n, 0);
  const DerivativeJump dj = derivative_jump(f, e, -e, {1e-2, 1e-4, 1e-6, 1e-8});
  out.at_most("jump_dev", std::abs(dj.jump - 0.5), 1e-6);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> radius(0.1, 0.8);
  const RealMetric g = [&](const RVec& y) { return real_pullback_metric(f, -1.0, y); };
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    RVec x(n), u(n), v(n);
    for (int i = 0; i < n; ++i) x[i] = gauss(rng);
    x *= radius(rng) / x.norm();
    for (int i = 0; i < n; ++i) u[i] = gauss(rng);
    for (int i = 0; i < n; ++i) v[i] = gauss(rng);
    worst = std::max(worst, std::abs(real_sectional_curvature(g, x, u, v) + 1.0));
  }
  out.at_most("curvature_dev", worst, 1e-3);
}

void parser(Outcome& out) {
  testing::ExprGen gen(12345, 3);
  int round_trip_failures = 0;
  for (int k = 0; k < 1000; ++k) {
    const Expr a = Expr::parse(gen.any(1 + k % 5));
    const Expr b = Expr::parse(a.print());
    if (!same_tree(a, b) || b.print() != a.print()) ++round_trip_failures;
  }
  out.require("round_trip_failures=" + std::to_string(round_trip_failures), round_trip_failures == 0);

  testing::ExprGen dgen(777, 2);
  std::mt19937_64 rng(3);
  double worst = 0.0;
  int checked = 0;
  for (int k = 0; checked < 100 && k < 1000; ++k) {
    const Expr e = Expr::parse(dgen.any(1 + k % 4));
    const CVec z = testing::random_point(rng, 2, 0.8);
    const std::vector<cplx> zv(z.data(), z.data() + z.size());
    Expr::Dual d;
    try {
      d = e.eval_dual(zv);
    } catch (const EvalError&) {
      continue;
    }
    double scale = 1.0;
    for (const auto& gk : d.gradient) scale = std::max(scale, std::abs(gk));
    if (!std::isfinite(scale) || scale > 1e6) continue;
    const double h = 1e-6;
    for (int j = 0; j < 4; ++j) {
      std::vector<cplx> zp = zv, zm = zv;
      const cplx step = (j % 2 == 0) ? cplx(h, 0.0) : cplx(0.0, h);
      zp[static_cast<std::size_t>(j / 2)] += step;
      zm[static_cast<std::size_t>(j / 2)] -= step;
      const cplx fd = (e.eval(zp) - e.eval(zm)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - d.gradient[static_cast<std::size_t>(j)]) / scale);
    }
    ++checked;
  }
  out.require("dual_cases=" + std::to_string(checked), checked == 100);
  out.at_most("dual_vs_fd", worst, 1e-6);
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"space-form identity", space_form_identity},
      {"calibration anchor", calibration},
      {"continuation", continuation},
      {"developing-map pullback", pullback},
      {"monodromy", monodromy_law},
      {"extension across a ball", hartogs_ball},
      {"extension across a plane", hartogs_plane},
      {"uniqueness", uniqueness},
      {"real counterexample", counterexample},
      {"parser", parser},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, run] : criteria) {
    ++index;
    Outcome out;
    out.detail.precision(3);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << " error: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!out.pass) ++failed;
    std::printf("[%s] %2d %s:%s (%.1f s)\n", out.pass ? "PASS" : "FAIL", index, name,
                out.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
