#include "spaceform/power_series.hpp"

#include <fftw3.h>

#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

std::vector<std::vector<int>> graded_indices(int nvars, int degree) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(static_cast<std::size_t>(nvars), 0);
  for (int d = 0; d <= degree; ++d) {
    // All k with |k| = d in lexicographically decreasing order of k_1.
    std::vector<std::vector<int>> level;
    auto rec = [&](auto&& self, int pos, int left) -> void {
      if (pos == nvars - 1) {
        k[static_cast<std::size_t>(pos)] = left;
        level.push_back(k);
        return;
      }
      for (int v = left; v >= 0; --v) {
        k[static_cast<std::size_t>(pos)] = v;
        self(self, pos + 1, left - v);
      }
    };
    rec(rec, 0, d);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

// Normalized forward DFT over an m^d row-major grid: c_k = m^{-d} sum_j f_j e^{-2 pi i j.k / m}.
std::vector<cplx> dft(const std::vector<cplx>& f, int d, int m) {
  std::vector<cplx> in = f, out(f.size());
  std::vector<int> dims(static_cast<std::size_t>(d), m);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft(d, dims.data(), reinterpret_cast<fftw_complex*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                         FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  const double norm = std::pow(static_cast<double>(m), d);
  for (auto& c : out) c /= norm;
  return out;
}

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

PowerSeriesMap::PowerSeriesMap(int nvars, int components, int degree, double rho, double lambda)
    : nvars_(nvars), components_(components), degree_(degree), rho_(rho), lambda_(lambda) {
  if (nvars < 1 || components < 1 || degree < 0)
    throw InvalidInput("power series needs nvars, components >= 1 and degree >= 0");
  indices_ = graded_indices(nvars, degree);
  coeffs_.assign(static_cast<std::size_t>(components),
                 std::vector<cplx>(indices_.size(), cplx(0.0)));
}

std::size_t PowerSeriesMap::index_of(const std::vector<int>& k) const {
  if (static_cast<int>(k.size()) != nvars_) throw InvalidInput("multi-index has wrong length");
  int d = 0;
  for (int v : k) {
    if (v < 0) throw InvalidInput("negative multi-index entry");
    d += v;
  }
  if (d > degree_) throw InvalidInput("multi-index exceeds the series degree");
  // Terms of lower degree come first; search within the degree block.
  std::size_t start = 0;
  for (; start < indices_.size(); ++start) {
    int s = 0;
    for (int v : indices_[start]) s += v;
    if (s == d) break;
  }
  for (std::size_t i = start; i < indices_.size(); ++i)
    if (indices_[i] == k) return i;
  throw InvalidInput("multi-index not found");
}

std::vector<CVec> PowerSeriesMap::powers(const CVec& w) const {
  std::vector<CVec> p(static_cast<std::size_t>(nvars_), CVec(degree_ + 1));
  for (int i = 0; i < nvars_; ++i) {
    CVec& pi = p[static_cast<std::size_t>(i)];
    pi[0] = 1.0;
    for (int e = 1; e <= degree_; ++e) pi[e] = pi[e - 1] * w[i];
  }
  return p;
}

CVec PowerSeriesMap::eval(const CVec& z) const {
  if (z.size() != nvars_) throw InvalidInput("series evaluation point has wrong dimension");
  const auto p = powers(lambda_ * z);
  CVec out = CVec::Zero(components_);
  for (std::size_t t = 0; t < indices_.size(); ++t) {
    cplx mono = 1.0;
    for (int i = 0; i < nvars_; ++i)
      mono *= p[static_cast<std::size_t>(i)][indices_[t][static_cast<std::size_t>(i)]];
    for (int c = 0; c < components_; ++c) out[c] += coeffs_[static_cast<std::size_t>(c)][t] * mono;
  }
  return out;
}

CMat PowerSeriesMap::jacobian(const CVec& z) const {
  if (z.size() != nvars_) throw InvalidInput("series evaluation point has wrong dimension");
  const auto p = powers(lambda_ * z);
  CMat J = CMat::Zero(components_, nvars_);
  for (std::size_t t = 0; t < indices_.size(); ++t) {
    const auto& k = indices_[t];
    for (int j = 0; j < nvars_; ++j) {
      const int kj = k[static_cast<std::size_t>(j)];
      if (kj == 0) continue;
      cplx mono = static_cast<double>(kj) * lambda_;
      for (int i = 0; i < nvars_; ++i) {
        const int e = k[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
        mono *= p[static_cast<std::size_t>(i)][e];
      }
      for (int c = 0; c < components_; ++c) J(c, j) += coeffs_[static_cast<std::size_t>(c)][t] * mono;
    }
  }
  return J;
}

std::string PowerSeriesMap::to_text() const {
  std::ostringstream os;
  os << "# power series F(z) = sum_k a_k (lambda z)^k; lines: k1 .. kn re im\n";
  os << "n " << nvars_ << "\n";
  os << "components " << components_ << "\n";
  os << "degree " << degree_ << "\n";
  os << "rho " << fmt(rho_) << "\n";
  os << "lambda " << fmt(lambda_) << "\n";
  os << "negative_mass " << fmt(negative_mass_) << "\n";
  for (int c = 0; c < components_; ++c) {
    os << "component " << c + 1 << "\n";
    for (std::size_t t = 0; t < indices_.size(); ++t) {
      for (int v : indices_[t]) os << v << ' ';
      const cplx a = coeffs_[static_cast<std::size_t>(c)][t];
      os << fmt(a.real()) << ' ' << fmt(a.imag()) << "\n";
    }
  }
  return os.str();
}

PowerSeriesMap PowerSeriesMap::from_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string line;
  int n = -1, comps = -1, degree = -1;
  double rho = 0.0, lambda = 1.0, neg = 0.0;
  PowerSeriesMap out;
  bool built = false;
  int current = -1;
  int lineno = 0;
  auto fail = [&](const std::string& why) {
    return ParseError("coefficient file line " + std::to_string(lineno) + ": " + why, lineno, 1,
                      {});
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "n") ls >> n;
    else if (key == "components") ls >> comps;
    else if (key == "degree") ls >> degree;
    else if (key == "rho") ls >> rho;
    else if (key == "lambda") ls >> lambda;
    else if (key == "negative_mass") ls >> neg;
    else if (key == "component") {
      if (!built) {
        if (n < 1 || comps < 1 || degree < 0) throw fail("header incomplete");
        out = PowerSeriesMap(n, comps, degree, rho, lambda);
        out.set_negative_mass(neg);
        built = true;
      }
      ls >> current;
      if (current < 1 || current > comps) throw fail("component index out of range");
      continue;
    } else {
      if (!built || current < 1) throw fail("coefficient before a component header");
      std::istringstream cs(line);
      std::vector<int> k(static_cast<std::size_t>(n));
      for (auto& v : k)
        if (!(cs >> v)) throw fail("bad multi-index");
      double re = 0.0, im = 0.0;
      if (!(cs >> re >> im)) throw fail("bad coefficient");
      out.coeff(current - 1, out.index_of(k)) = cplx(re, im);
      continue;
    }
    if (ls.fail()) throw fail("bad value for " + key);
  }
  if (!built) throw fail("no coefficients");
  return out;
}

std::vector<CVec> torus_points(int nvars, double rho, int m, double lambda, const CVec& tail) {
  std::size_t total = 1;
  for (int i = 0; i < nvars; ++i) total *= static_cast<std::size_t>(m);
  std::vector<CVec> pts;
  pts.reserve(total);
  const double r = rho / lambda;
  for (std::size_t idx = 0; idx < total; ++idx) {
    CVec z(nvars + tail.size());
    std::size_t rem = idx;
    for (int i = nvars - 1; i >= 0; --i) {
      const int j = static_cast<int>(rem % static_cast<std::size_t>(m));
      rem /= static_cast<std::size_t>(m);
      z[i] = std::polar(r, 2.0 * std::numbers::pi * j / m);
    }
    if (tail.size() > 0) z.tail(tail.size()) = tail;
    pts.push_back(std::move(z));
  }
  return pts;
}

PowerSeriesMap torus_extend(const std::vector<CVec>& values, int nvars, double rho, int m,
                            double lambda, const TorusOptions& opts) {
  if (m <= 2 * opts.degree) throw InvalidInput("torus grid needs m > 2 D to avoid aliasing");
  std::size_t total = 1;
  for (int i = 0; i < nvars; ++i) total *= static_cast<std::size_t>(m);
  if (values.size() != total) throw InvalidInput("torus sample count does not match m^n");
  const int comps = static_cast<int>(values.front().size());
  PowerSeriesMap series(nvars, comps, opts.degree, rho, lambda);

  double fmax = 0.0;
  for (const auto& v : values) fmax = std::max(fmax, v.cwiseAbs().maxCoeff());
  double negative = 0.0;
  std::vector<int> k(static_cast<std::size_t>(nvars));
  for (int c = 0; c < comps; ++c) {
    std::vector<cplx> f(total);
    for (std::size_t i = 0; i < total; ++i) f[i] = values[i][c];
    const std::vector<cplx> hat = dft(f, nvars, m);
    double neg_c = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
      std::size_t rem = idx;
      bool is_negative = false;
      int degree = 0;
      for (int i = nvars - 1; i >= 0; --i) {
        const int j = static_cast<int>(rem % static_cast<std::size_t>(m));
        rem /= static_cast<std::size_t>(m);
        k[static_cast<std::size_t>(i)] = j;
        if (2 * j >= m) is_negative = true;
        degree += j;
      }
      if (is_negative) {
        neg_c += std::abs(hat[idx]);
      } else if (degree <= opts.degree) {
        series.coeff(c, series.index_of(k)) = hat[idx] / std::pow(rho, degree);
      }
    }
    negative = std::max(negative, neg_c);
  }
  series.set_negative_mass(negative);
  if (negative > opts.holomorphy_tolerance * std::max(fmax, 1e-300))
    throw NotHolomorphic("torus samples carry negative-frequency mass " + std::to_string(negative),
                         negative / std::max(fmax, 1e-300));
  const auto pts = torus_points(nvars, rho, m, lambda);
  double resid = 0.0;
  for (std::size_t i = 0; i < total; ++i)
    resid = std::max(resid, (series.eval(pts[i].head(nvars)) - values[i]).cwiseAbs().maxCoeff());
  series.set_torus_residual(resid);
  return series;
}

SliceFamily slice_extend(const std::vector<std::vector<CVec>>& values,
                         const std::vector<CVec>& slices, double rho, int m, double lambda,
                         const TorusOptions& opts) {
  if (values.size() != slices.size()) throw InvalidInput("one sample set per slice expected");
  SliceFamily fam;
  fam.slices = slices;
  fam.series.reserve(slices.size());
  for (std::size_t s = 0; s < slices.size(); ++s) {
    try {
      fam.series.push_back(torus_extend(values[s], 2, rho, m, lambda, opts));
    } catch (const NotHolomorphic& e) {
      throw NotHolomorphic("slice " + std::to_string(s) + ": " + e.what(), e.residual());
    }
  }
  for (std::size_t s = 0; s + 1 < fam.series.size(); ++s) {
    const auto& a = fam.series[s];
    const auto& b = fam.series[s + 1];
    for (int c = 0; c < a.components(); ++c)
      for (std::size_t t = 0; t < a.indices().size(); ++t)
        fam.continuity = std::max(fam.continuity, std::abs(a.coeff(c, t) - b.coeff(c, t)));
  }
  return fam;
}

PowerSeriesMap assemble_ring(const SliceFamily& family, double rho3, const TorusOptions& opts) {
  const int m3 = static_cast<int>(family.series.size());
  if (m3 == 0) throw InvalidInput("no slices to assemble");
  const PowerSeriesMap& first = family.series.front();
  const int D = first.degree();
  if (m3 <= 2 * D) throw InvalidInput("ring needs more than 2 D slices");
  const int comps = first.components();
  PowerSeriesMap out(3, comps, D, first.rho(), first.lambda());
  double negative = first.negative_mass();
  double scale = 0.0;  // size of the largest term on the torus
  for (const auto& s : family.series) {
    negative = std::max(negative, s.negative_mass());
    for (int c = 0; c < comps; ++c)
      for (std::size_t t = 0; t < s.indices().size(); ++t) {
        const auto& k = s.indices()[t];
        scale = std::max(scale, std::abs(s.coeff(c, t)) * std::pow(s.rho(), k[0] + k[1]));
      }
  }
  double ring_negative = 0.0;
  for (int c = 0; c < comps; ++c)
    for (std::size_t t = 0; t < first.indices().size(); ++t) {
      const auto& k12 = first.indices()[t];
      std::vector<cplx> b(static_cast<std::size_t>(m3));
      for (int s = 0; s < m3; ++s) b[static_cast<std::size_t>(s)] = family.series[static_cast<std::size_t>(s)].coeff(c, t);
      const auto hat = dft(b, 1, m3);
      const double weight = std::pow(first.rho(), k12[0] + k12[1]);
      for (int j = 0; j < m3; ++j) {
        if (2 * j >= m3) {
          ring_negative += std::abs(hat[static_cast<std::size_t>(j)]) * weight;
        } else if (k12[0] + k12[1] + j <= D) {
          out.coeff(c, out.index_of({k12[0], k12[1], j})) =
              hat[static_cast<std::size_t>(j)] / std::pow(rho3, j);
        }
      }
    }
  negative = std::max(negative, ring_negative);
  out.set_negative_mass(negative);
  // Compare against every slice series on its own torus.
  const int m12 = 2 * D + 2;
  double resid = 0.0;
  for (std::size_t s = 0; s < family.series.size(); ++s) {
    const auto& ser = family.series[s];
    resid = std::max(resid, ser.torus_residual());
    for (const CVec& z : torus_points(2, ser.rho(), m12, ser.lambda(), family.slices[s])) {
      const CVec d = out.eval(z.head(3)) - ser.eval(z.head(2));
      resid = std::max(resid, d.cwiseAbs().maxCoeff());
    }
  }
  out.set_torus_residual(resid);
  if (ring_negative > opts.holomorphy_tolerance * std::max(scale, 1e-300))
    throw NotHolomorphic("slice coefficients are not holomorphic in z3", ring_negative);
  return out;
}

}  // namespace spaceform
