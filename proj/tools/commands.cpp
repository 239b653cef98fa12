#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "spaceform/catalog.hpp"
#include "spaceform/extension.hpp"
#include "spaceform/kahler.hpp"
#include "spaceform/probes.hpp"
#include "spaceform/sampling.hpp"

#ifndef SPACEFORM_VERSION
#define SPACEFORM_VERSION "0.0.0"
#endif

namespace spaceform::cli {

using ojson = nlohmann::ordered_json;

namespace {

ojson complex_json(cplx z) { return ojson::array({z.real(), z.imag()}); }

ojson vector_json(const CVec& v) {
  ojson a = ojson::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_json(v[i]));
  return a;
}

ojson matrix_json(const CMat& M) {
  ojson rows = ojson::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    ojson row = ojson::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_json(M(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string complex_header(const std::string& name, int n) {
  std::string h;
  for (int i = 1; i <= n; ++i) {
    if (!h.empty()) h += ',';
    h += "re_" + name + std::to_string(i) + ",im_" + name + std::to_string(i);
  }
  return h;
}

void put_complex(std::ostream& os, const CVec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) os << ',';
    os << v[i].real() << ',' << v[i].imag();
  }
}

class Csv {
 public:
  explicit Csv(const std::string& header) {
    os_.precision(17);
    os_ << header << '\n';
  }
  std::ostringstream& row() { return os_; }
  std::string str() const { return os_.str(); }

 private:
  std::ostringstream os_;
};

ojson report_header(const std::string& command, std::uint64_t seed) {
  ojson j;
  j["tool"] = "spaceform";
  j["version"] = tool_version();
  j["command"] = command;
  j["seed"] = seed;
  return j;
}

void finish_report(ojson& j, const Config& cfg, const std::filesystem::path& path) {
  j["config"] = cfg.resolved();
  write_atomic(path, j.dump(2) + "\n");
}

std::uint64_t resolve_seed(Config& cfg, const RunOptions& opts) {
  if (opts.seed) cfg.set("run.seed", std::to_string(*opts.seed));
  const int s = cfg.integer("run.seed", 0);
  if (s < 0) throw ConfigError("'run.seed' must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::vector<Puncture> punctures_from_config(const Config& cfg, int n) {
  const std::string kind = cfg.text("puncture.kind", "none");
  if (kind == "none") return {};
  if (kind == "ball")
    return {Puncture::closed_ball(cfg.point("puncture.center", n, CVec::Zero(n)),
                                  cfg.positive("puncture.radius"))};
  if (kind == "plane") {
    if (n < 2) throw ConfigError("plane puncture needs n >= 2");
    return {Puncture::plane()};
  }
  if (kind == "divisor") {
    const int coord = cfg.integer("puncture.coord", 1);
    if (coord < 1 || coord > n) throw ConfigError("'puncture.coord' must be in 1..n");
    return {Puncture::hyperplane(coord - 1)};
  }
  throw ConfigError("unknown puncture kind '" + kind + "' (none, ball, plane, divisor)");
}

int dimension(const Config& cfg) {
  const int n = cfg.integer("run.n", 2);
  if (n < 1) throw ConfigError("'run.n' must be at least 1");
  return n;
}

// ---------------------------------------------------------------------------

int cmd_verify(Config& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const int n = dimension(cfg);
  const MetricField field = field_from_config(cfg, n);
  const double c = model_c_from_config(cfg);
  const double R = field.domain().radius;
  const auto samples = shell_samples(field.domain(), n, cfg.integer("verify.samples", 100),
                                     cfg.number("verify.inner", 0.0),
                                     cfg.positive("verify.outer", 0.9 * R), seed);
  SpaceFormOptions so;
  so.tolerance = cfg.positive("verify.tolerance", 1e-5);
  so.tuples_per_sample = cfg.integer("verify.tuples", 20);
  so.seed = seed;
  const VerificationReport rep = verify_space_form(field, samples, c, so);

  ojson j = report_header("verify-space-form", seed);
  j["pass"] = rep.pass;
  j["max_residual"] = rep.max_residual;
  j["best_fit_c"] = rep.values.at("best_fit_c");
  j["calibration_sign"] = calibration_sign();
  j["target_c"] = c;
  j["tolerance"] = rep.tolerance;
  j["samples"] = samples.size();
  j["notes"] = rep.notes;
  finish_report(j, cfg, opts.out_dir / "verify-space-form.json");
  return rep.pass ? exit_pass : exit_check_failure;
}

std::string develop_csv(const ModelSpace& m, const std::vector<CVec>& z,
                        const std::vector<Germ>& germs, const std::string& lead = "",
                        const std::vector<std::string>& lead_values = {}) {
  const int n = m.dim();
  std::string header = lead.empty() ? "" : lead + ",";
  header += complex_header("z", n) + "," + complex_header("F", n) + ",re_det_dF,im_det_dF";
  Csv csv(header);
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto& os = csv.row();
    if (!lead.empty()) os << lead_values[i] << ',';
    put_complex(os, z[i]);
    os << ',';
    CVec F;
    try {
      F = standard_coords(m, germs[i].q);
    } catch (const ChartSwitch&) {
      F = CVec::Constant(n, cplx(std::nan(""), std::nan("")));
    }
    put_complex(os, F);
    const cplx det = germs[i].A.determinant();
    os << ',' << det.real() << ',' << det.imag() << '\n';
  }
  return csv.str();
}

int cmd_develop(Config& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const int n = dimension(cfg);
  const MetricField field = field_from_config(cfg, n);
  const ModelSpace m(model_c_from_config(cfg), n);
  const double R = field.domain().radius;
  const double inner = cfg.number("develop.inner", 0.0);
  const double outer = cfg.positive("develop.outer", 0.9 * R);
  CVec base0 = CVec::Zero(n);
  base0[0] = 0.5 * (inner + outer);
  const CVec base = cfg.point("develop.base", n, base0);
  const Germ germ = germ_from_config(cfg, "develop", field, m, base);
  const auto samples =
      shell_samples(field.domain(), n, cfg.integer("develop.samples", 200), inner, outer, seed);
  DevelopOptions dopts;
  dopts.neighbors = cfg.integer("develop.neighbors", 8);
  dopts.continuation = continuation_from_config(cfg);
  const DevelopedField dev = develop_region(field, m, germ, samples, dopts);
  const VerificationReport rep =
      verify_pullback(field, m, dev, cfg.positive("develop.tolerance", 1e-6));

  write_atomic(opts.out_dir / "develop.csv", develop_csv(m, dev.samples, dev.germs));
  ojson j = report_header("develop", seed);
  j["pass"] = rep.pass;
  j["max_residual"] = rep.max_residual;
  j["max_relative_residual"] = rep.values.at("max_relative_residual");
  j["tolerance"] = rep.tolerance;
  j["samples"] = dev.samples.size();
  int max_depth = 0;
  for (int d : dev.depth) max_depth = std::max(max_depth, d);
  j["tree_depth"] = max_depth;
  j["base"] = {{"p", vector_json(germ.p)}, {"q", vector_json(germ.q.coords)}, {"A", matrix_json(germ.A)}};
  finish_report(j, cfg, opts.out_dir / "develop.json");
  return rep.pass ? exit_pass : exit_check_failure;
}

ojson isometry_json(const ModelIsometry& s) {
  ojson j;
  if (s.sign == CurvatureSign::zero) {
    j["matrix"] = matrix_json(s.U);
    j["translation"] = vector_json(s.b);
  } else {
    j["matrix"] = matrix_json(s.M);
  }
  j["group_residual"] = s.group_residual();
  return j;
}

const CMat& representation(const ModelIsometry& s) {
  return s.sign == CurvatureSign::zero ? s.U : s.M;
}

// |S - E| after removing the overall phase, which is not determined for c != 0.
double representation_deviation(const ModelIsometry& s, const CMat& expected) {
  const CMat& S = representation(s);
  if (S.rows() != expected.rows() || S.cols() != expected.cols())
    throw ConfigError("expected monodromy matrix has the wrong size");
  if (s.sign == CurvatureSign::zero) return op_norm(S - expected);
  const cplx t = (expected.adjoint() * S).trace();
  const cplx phase = std::abs(t) > 0 ? t / std::abs(t) : cplx(1.0);
  return op_norm(S / phase - expected);
}

int cmd_monodromy(Config& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const int n = dimension(cfg);
  const MetricField field = field_from_config(cfg, n);
  const ModelSpace m(model_c_from_config(cfg), n);
  const CVec base = cfg.point("monodromy.base", n);
  const Germ germ = germ_from_config(cfg, "monodromy", field, m, base);
  const ContinuationOptions copts = continuation_from_config(cfg);
  const double tol = cfg.positive("monodromy.tolerance", 1e-6);
  const auto words = cfg.words("monodromy.words", std::vector<std::string>{"a"});

  std::vector<ModelPoint> probes{germ.q};
  for (int k = 0; k < n; ++k) probes.push_back(model_exp(m, germ.q, 0.1 * CVec::Unit(n, k)));

  const CMat Ainv = germ.A.inverse();
  auto monodromy_of = [&](const Germ& end) {
    return isometry_from_frame_data(m, germ.q, end.q, end.A * Ainv, 1e-5);
  };

  std::map<char, ModelIsometry> letters;
  ojson jwords = ojson::array();
  std::vector<CVec> zs;
  std::vector<Germ> gs;
  std::vector<std::string> lead;
  bool pass = true;
  double worst = 0.0;
  for (const auto& word : words) {
    if (word.empty()) throw ConfigError("empty monodromy word");
    const auto loop = word_loop(cfg, word, base);
    Germ g = germ;
    for (std::size_t i = 1; i < loop.size(); ++i) {
      try {
        g = continue_germ(field, m, g, {loop[i - 1], loop[i]}, copts);
      } catch (const GeometryError& e) {
        throw GeometryError("word '" + word + "' step " + std::to_string(i) + ": " + e.what());
      }
      zs.push_back(loop[i]);
      gs.push_back(g);
      lead.push_back(word + "," + std::to_string(i));
    }
    const ModelIsometry s = monodromy_of(g);
    ojson jw = {{"word", word}};
    const ojson iso = isometry_json(s);
    for (const auto& [k, v] : iso.items()) jw[k] = v;
    double dev = s.group_residual();
    if (word.size() == 1) letters.emplace(word[0], s);
    if (cfg.has("expect." + word)) {
      const auto flat = split_list(cfg.text("expect." + word));
      const Eigen::Index k = representation(s).rows();
      if (static_cast<Eigen::Index>(flat.size()) != k * k)
        throw ConfigError("'expect." + word + "' needs " + std::to_string(k * k) + " entries");
      CMat E(k, k);
      for (Eigen::Index r = 0; r < k; ++r)
        for (Eigen::Index c = 0; c < k; ++c)
          E(r, c) = Expr::parse(flat[static_cast<std::size_t>(r * k + c)]).eval(std::span<const cplx>());
      const double d = representation_deviation(s, E);
      if (s.sign == CurvatureSign::zero) {
        const std::string bkey = "expect_translation." + word;
        const CVec b = cfg.point(bkey, n, CVec::Zero(n));
        jw["translation_deviation"] = (s.b - b).norm();
        dev = std::max(dev, (s.b - b).norm());
      }
      jw["expected_deviation"] = d;
      dev = std::max(dev, d);
    }
    if (word.size() > 1) {
      // The homomorphism law: continuation along a word composes the letters.
      ModelIsometry composed = ModelIsometry::identity(m);
      for (char ch : word) {
        const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        auto it = letters.find(lower);
        if (it == letters.end()) {
          const Germ e = continue_germ(field, m, germ, word_loop(cfg, std::string(1, lower), base), copts);
          it = letters.emplace(lower, monodromy_of(e)).first;
        }
        composed = compose(composed, lower == ch ? it->second : inverse(it->second));
      }
      const double d = isometries_equal(m, s, composed, probes, tol).max_deviation;
      jw["composition_deviation"] = d;
      dev = std::max(dev, d);
    }
    jw["deviation"] = dev;
    worst = std::max(worst, dev);
    pass = pass && dev <= tol;
    jwords.push_back(jw);
  }

  write_atomic(opts.out_dir / "monodromy.csv", develop_csv(m, zs, gs, "word,step", lead));
  ojson j = report_header("monodromy", seed);
  j["pass"] = pass;
  j["max_residual"] = worst;
  j["tolerance"] = tol;
  j["base"] = {{"p", vector_json(germ.p)}, {"q", vector_json(germ.q.coords)}, {"A", matrix_json(germ.A)}};
  j["words"] = jwords;
  finish_report(j, cfg, opts.out_dir / "monodromy.json");
  return pass ? exit_pass : exit_check_failure;
}

int cmd_extend(Config& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const int n = dimension(cfg);
  const MetricField field = field_from_config(cfg, n);
  const ModelSpace m(model_c_from_config(cfg), n);

  ExtensionConfig ec;
  ec.rho = cfg.number("extend.rho", 0.0);
  ec.m = cfg.integer("extend.m", 64);
  ec.degree = cfg.integer("extend.degree", 20);
  ec.sliced = cfg.flag("extend.sliced", false);
  ec.slice_m = cfg.integer("extend.slice_m", 16);
  ec.holomorphy_tolerance = cfg.positive("extend.holomorphy_tolerance", 1e-6);
  ec.det_threshold = cfg.positive("extend.det_threshold", 0.5);
  ec.det_radius = cfg.positive("extend.det_radius", 0.3);
  ec.det_grid = cfg.integer("extend.det_grid", 7);
  ec.agreement_tolerance = cfg.positive("extend.agreement_tolerance", 1e-5);
  ec.overlap_samples = cfg.integer("extend.overlap_samples", 200);
  ec.origin_tolerance = cfg.positive("extend.origin_tolerance", 1e-6);
  ec.seed = seed;
  ec.develop.continuation = continuation_from_config(cfg);
  ec.develop.neighbors = cfg.integer("extend.neighbors", 8);
  const std::string frame = cfg.text("extend.frame", "identity");
  if (frame == "identity")
    ec.germ.frame = FrameChoice::identity_type;
  else if (frame == "gram-schmidt")
    ec.germ.frame = FrameChoice::gram_schmidt;
  else
    throw ConfigError("'extend.frame' must be identity or gram-schmidt");
  if (cfg.has("extend.base")) ec.base_point = cfg.point("extend.base", n);
  const double eps = cfg.number("extend.inject_conjugate", 0.0);
  if (eps != 0.0)
    ec.inject = [eps](const CVec& z, const CVec& F) {
      CVec G = F;
      G[0] += eps * std::conj(z[0]);
      return G;
    };

  ojson j = report_header("extend", seed);
  std::optional<ExtensionResult> result;
  try {
    result = extend_metric(field, m, ec);
  } catch (const ExtensionFailure& e) {
    j["pass"] = false;
    j["error"] = e.what();
    j["report"] = nlohmann::json(e.report());
    finish_report(j, cfg, opts.out_dir / "extend.json");
    std::cerr << "extend: " << e.what() << '\n';
    return exit_check_failure;
  }

  const ExtensionResult& res = *result;
  write_atomic(opts.out_dir / "extend_series.txt", res.series.to_text());

  // g~ on a real grid in the (Re z1, Re z2) plane, the hole included.
  const int grid = cfg.integer("extend.grid", 21);
  const double half = cfg.positive("extend.grid_radius", 0.3);
  std::string header = complex_header("z", n);
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b)
      header += ",re_g" + std::to_string(a) + std::to_string(b) + ",im_g" + std::to_string(a) +
                std::to_string(b);
  Csv csv(header);
  const int axes = std::min(n, 2);
  const int total = axes == 2 ? grid * grid : grid;
  for (int idx = 0; idx < total; ++idx) {
    CVec z = CVec::Zero(n);
    const int i = idx / grid, k = idx % grid;
    auto coord = [&](int t) { return grid == 1 ? 0.0 : -half + 2.0 * half * t / (grid - 1); };
    if (axes == 2) {
      z[0] = coord(i);
      z[1] = coord(k);
    } else {
      z[0] = coord(k);
    }
    CMat g;
    try {
      g = res.extended.metric_at(z);
    } catch (const DomainError&) {
      continue;
    }
    auto& os = csv.row();
    put_complex(os, z);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) os << ',' << g(a, b).real() << ',' << g(a, b).imag();
    os << '\n';
  }
  write_atomic(opts.out_dir / "extend_metric.csv", csv.str());

  j["pass"] = res.report.pass;
  j["report"] = nlohmann::json(res.report);
  j["base"] = {{"p", vector_json(res.base.p)},
               {"q", vector_json(res.base.q.coords)},
               {"A", matrix_json(res.base.A)}};
  j["extended_metric_at_origin"] = matrix_json(res.extended.metric_at(CVec::Zero(n)));
  finish_report(j, cfg, opts.out_dir / "extend.json");
  return res.report.pass ? exit_pass : exit_check_failure;
}

std::string real_header(const std::string& name, int n) {
  std::string h;
  for (int i = 1; i <= n; ++i) h += (i > 1 ? "," : "") + name + std::to_string(i);
  return h;
}

int cmd_probe(Config& cfg, const RunOptions& opts) {
  const std::uint64_t seed = resolve_seed(cfg, opts);
  const auto tables = cfg.words("probe.tables", std::vector<std::string>{"jacobian", "jump", "curvature", "cone"});
  ojson j = report_header("probe", seed);
  bool pass = true;
  for (const auto& table : tables) {
    if (table == "jacobian") {
      const int n = cfg.integer("probe.n", 3);
      const RealMap f = f_minus_one_map(n);
      const auto grid = punctured_grid(n, cfg.integer("probe.per_axis", 10), 1.0);
      const JacobianMinimum jm = jacobian_minimum(f, grid);
      Csv csv(real_header("x", n) + ",det_j");
      for (const auto& x : grid) {
        auto& os = csv.row();
        for (Eigen::Index i = 0; i < x.size(); ++i) os << x[i] << ',';
        os << f.jacobian(x).determinant() << '\n';
      }
      write_atomic(opts.out_dir / "probe_jacobian.csv", csv.str());
      const double bound = std::pow(0.5, n + 1) - 1e-9;
      const bool ok = jm.min_det >= bound;
      pass = pass && ok;
      j["jacobian"] = {{"n", n}, {"points", jm.points}, {"min_det", jm.min_det},
                       {"location", std::vector<double>(jm.location.data(), jm.location.data() + jm.location.size())},
                       {"bound", bound}, {"pass", ok}};
    } else if (table == "jump") {
      const int n = cfg.integer("probe.n", 3);
      const int dir = cfg.integer("probe.jump_direction", 1);
      if (dir < 1 || dir > n) throw ConfigError("'probe.jump_direction' must be in 1..n");
      const auto radii = cfg.numbers("probe.jump_radii", std::vector<double>{1e-2, 1e-4, 1e-6, 1e-8});
      const RVec e = RVec::Unit(n, dir - 1);
      const DerivativeJump dj = derivative_jump(f_minus_one_map(n), e, -e, radii);
      Csv csv("radius,jump");
      for (std::size_t i = 0; i < radii.size(); ++i) csv.row() << radii[i] << ',' << dj.jumps[i] << '\n';
      write_atomic(opts.out_dir / "probe_jump.csv", csv.str());
      const double tol = cfg.positive("probe.jump_tolerance", 1e-6);
      const bool ok = std::abs(dj.jump - 0.5) <= tol;
      pass = pass && ok;
      std::vector<std::vector<double>> jm;
      for (Eigen::Index r = 0; r < dj.jump_matrix.rows(); ++r) {
        jm.emplace_back();
        for (Eigen::Index c = 0; c < dj.jump_matrix.cols(); ++c) jm.back().push_back(dj.jump_matrix(r, c));
      }
      j["jump"] = {{"direction", dir}, {"jump", dj.jump}, {"expected", 0.5},
                   {"jump_matrix", jm}, {"pass", ok}};
    } else if (table == "curvature") {
      const int n = cfg.integer("probe.n", 3);
      const int count = cfg.integer("probe.curvature_points", 50);
      const double c = cfg.number("probe.model_c", -1.0);
      const double tol = cfg.positive("probe.curvature_tolerance", 1e-3);
      const RealMap f = f_minus_one_map(n);
      std::mt19937_64 rng(seed);
      std::normal_distribution<double> gauss;
      std::uniform_real_distribution<double> radius(0.1, 0.8);
      std::vector<RVec> xs, us, vs;
      for (int i = 0; i < count; ++i) {
        RVec x(n), u(n), v(n);
        for (int k = 0; k < n; ++k) x[k] = gauss(rng);
        x *= radius(rng) / x.norm();
        for (int k = 0; k < n; ++k) u[k] = gauss(rng);
        for (int k = 0; k < n; ++k) v[k] = gauss(rng);
        xs.push_back(x);
        us.push_back(u);
        vs.push_back(v);
      }
      std::vector<double> K(static_cast<std::size_t>(count));
      const RealMetric g = [&](const RVec& y) { return real_pullback_metric(f, c, y); };
      for_each_index(ExecPolicy::parallel, K.size(), [&](std::size_t i) {
        K[i] = real_sectional_curvature(g, xs[i], us[i], vs[i]);
      });
      Csv csv(real_header("x", n) + ",sectional_curvature,deviation");
      double worst = 0.0;
      for (std::size_t i = 0; i < K.size(); ++i) {
        auto& os = csv.row();
        for (Eigen::Index k = 0; k < n; ++k) os << xs[i][k] << ',';
        os << K[i] << ',' << K[i] - c << '\n';
        worst = std::max(worst, std::abs(K[i] - c));
      }
      write_atomic(opts.out_dir / "probe_curvature.csv", csv.str());
      const bool ok = worst <= tol;
      pass = pass && ok;
      j["curvature"] = {{"n", n}, {"model_c", c}, {"points", count}, {"max_deviation", worst},
                        {"tolerance", tol}, {"pass", ok}};
    } else if (table == "cone") {
      CatalogParams p;
      p.n = cfg.integer("probe.cone_n", 2);
      const std::string entry = cfg.text("probe.cone_entry", "cone-flat");
      p.beta = cfg.numbers("probe.cone_beta", std::vector<double>(static_cast<std::size_t>(p.n), 0.5));
      if (cfg.has("probe.cone_c")) p.c = cfg.number("probe.cone_c");
      const auto distances = cfg.numbers("probe.cone_distances",
                                         std::vector<double>{1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3});
      const CVec tail = cfg.point("probe.cone_tail", p.n - 1, CVec::Constant(p.n - 1, cplx(0.3, 0.0)));
      const ConeProfile prof = cone_profile(entry, p, distances, tail);
      std::ostringstream os;
      write_profile_csv(os, prof);
      write_atomic(opts.out_dir / "probe_cone.csv", os.str());
      const double tol = cfg.positive("probe.cone_tolerance", 1e-6);
      const bool ok = prof.max_hsc_deviation <= tol;
      pass = pass && ok;
      j["cone"] = {{"entry", entry}, {"beta", prof.beta}, {"expected_hsc", prof.expected_hsc},
                   {"max_hsc_deviation", prof.max_hsc_deviation}, {"rate_exponent", prof.rate_exponent},
                   {"expected_rate", prof.expected_rate}, {"tolerance", tol}, {"pass", ok}};
      if (entry == "cone-log")
        j["cone"]["notes"] = {"the cone-log metric has constant HSC c; the flat-cone displayed form "
                              "yields HSC 0, so both entries are probed separately"};
    } else {
      throw ConfigError("unknown probe table '" + table + "' (jacobian, jump, curvature, cone)");
    }
  }
  j["pass"] = pass;
  finish_report(j, cfg, opts.out_dir / "probe.json");
  return pass ? exit_pass : exit_check_failure;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"verify-space-form", "develop", "monodromy", "extend",
                                              "probe"};
  return names;
}

std::string tool_version() { return SPACEFORM_VERSION; }

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

MetricField field_from_config(const Config& cfg, int n) {
  const bool has_catalog = cfg.has("metric.catalog");
  const bool has_potential = cfg.has("metric.potential");
  if (has_catalog == has_potential)
    throw ConfigError("[metric] needs exactly one of 'catalog' or 'potential'");
  const double radius = cfg.positive("metric.radius", 1.0);
  auto punctures = punctures_from_config(cfg, n);
  if (has_potential) {
    Expr e = Expr::parse(cfg.text("metric.potential"));
    e.require_real();
    if (e.max_variable() > n)
      throw ConfigError("potential uses z" + std::to_string(e.max_variable()) + " but n = " + std::to_string(n));
    Domain d;
    d.radius = radius;
    d.punctures = std::move(punctures);
    return MetricField::from_potential(n, std::move(e), std::move(d), cfg.positive("metric.scale", 1.0));
  }
  CatalogParams p;
  p.n = n;
  if (cfg.has("run.c")) p.c = cfg.number("run.c");
  p.radius = radius;
  if (cfg.has("metric.beta")) p.beta = cfg.numbers("metric.beta");
  p.punctures = std::move(punctures);
  return catalog(cfg.text("metric.catalog"), p);
}

double model_c_from_config(const Config& cfg) {
  if (cfg.has("run.c")) return cfg.number("run.c");
  if (!cfg.has("metric.catalog")) throw ConfigError("missing required entry 'run.c'");
  const std::string name = cfg.text("metric.catalog");
  double c = 0.0;
  if (name == "bergman" || name == "cone-log")
    c = -4.0;
  else if (name == "fubini-study")
    c = 4.0;
  return cfg.number("run.c", c);
}

ContinuationOptions continuation_from_config(const Config& cfg) {
  ContinuationOptions o;
  o.shooting.integrator.rtol = cfg.positive("integrator.rtol", o.shooting.integrator.rtol);
  o.shooting.integrator.atol = cfg.positive("integrator.atol", o.shooting.integrator.atol);
  o.shooting.abs_tol = cfg.positive("shooting.abs_tol", o.shooting.abs_tol);
  o.shooting.rel_tol = cfg.positive("shooting.rel_tol", o.shooting.rel_tol);
  o.shooting.max_iterations = cfg.integer("shooting.max_iterations", o.shooting.max_iterations);
  o.max_depth = cfg.integer("shooting.max_depth", o.max_depth);
  return o;
}

Germ germ_from_config(const Config& cfg, const std::string& section, const MetricField& field,
                      const ModelSpace& m, const CVec& base) {
  const int n = field.dim();
  GermOptions go;
  const std::string frame = cfg.text(section + ".frame", "gram-schmidt");
  if (frame == "gram-schmidt") {
    go.frame = FrameChoice::gram_schmidt;
  } else if (frame == "identity") {
    go.frame = FrameChoice::identity_type;
  } else if (frame == "explicit") {
    go.frame = FrameChoice::explicit_frame;
    go.explicit_q = cfg.point(section + ".image", n);
    const auto flat = split_list(cfg.text(section + ".frame_matrix"));
    if (static_cast<int>(flat.size()) != n * n)
      throw ConfigError("'" + section + ".frame_matrix' needs n*n entries (row-major)");
    go.explicit_A.resize(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        go.explicit_A(r, c) =
            Expr::parse(flat[static_cast<std::size_t>(r * n + c)]).eval(std::span<const cplx>());
  } else {
    throw ConfigError("'" + section + ".frame' must be gram-schmidt, identity or explicit");
  }
  go.space_form_tolerance = cfg.positive(section + ".space_form_tolerance", go.space_form_tolerance);
  return initial_germ(field, m, base, go);
}

std::vector<CVec> word_loop(const Config& cfg, const std::string& word, const CVec& base) {
  const int n = static_cast<int>(base.size());
  std::vector<CVec> out{base};
  for (char ch : word) {
    const char lower = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    const std::string sec = std::string("loop.") + lower;
    if (!cfg.has(sec + ".coord")) throw ConfigError("word uses undefined generator '" + std::string(1, lower) + "'");
    const int coord = cfg.integer(sec + ".coord");
    if (coord < 1 || coord > n) throw ConfigError("'" + sec + ".coord' must be in 1..n");
    const CVec center = cfg.point(sec + ".center", 1, CVec::Zero(1));
    auto loop = circle_loop(base, coord - 1, center[0], cfg.integer(sec + ".segments", 64),
                            cfg.integer(sec + ".turns", 1));
    if (ch != lower) std::reverse(loop.begin(), loop.end());
    out.insert(out.end(), loop.begin() + 1, loop.end());
  }
  return out;
}

int run_command(const std::string& command, Config& cfg, const RunOptions& opts) {
  if (command == "verify-space-form") return cmd_verify(cfg, opts);
  if (command == "develop") return cmd_develop(cfg, opts);
  if (command == "monodromy") return cmd_monodromy(cfg, opts);
  if (command == "extend") return cmd_extend(cfg, opts);
  if (command == "probe") return cmd_probe(cfg, opts);
  throw ConfigError("unknown command '" + command + "'");
}

int run_guarded(const std::string& command, Config& cfg, const RunOptions& opts) {
  try {
    return run_command(command, cfg, opts);
  } catch (const ParseError& e) {
    std::cerr << command << ": parse error at line " << e.line() << ", column " << e.column()
              << ": " << e.what();
    if (!e.expected().empty()) {
      std::cerr << " (expected";
      for (const auto& x : e.expected()) std::cerr << ' ' << x;
      std::cerr << ')';
    }
    std::cerr << '\n';
  } catch (const GeometryError& e) {
    std::cerr << command << ": geometry error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << '\n';
  }
  return exit_error;
}

}  // namespace spaceform::cli
