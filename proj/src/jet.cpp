#include "spaceform/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

void enumerate(int nvars, int remaining, int var, JetSpace::Exponent& cur,
               std::vector<JetSpace::Exponent>& out) {
  if (var == nvars) {
    out.push_back(cur);
    return;
  }
  for (int k = 0; k <= remaining; ++k) {
    cur[var] = static_cast<std::uint8_t>(k);
    enumerate(nvars, remaining - k, var + 1, cur, out);
  }
  cur[var] = 0;
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

const JetSpace& JetSpace::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<JetSpace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot.reset(new JetSpace(nvars, order));
  return *slot;
}

JetSpace::JetSpace(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || order < 0 || order > 8) throw InvalidInput("JetSpace: bad dimensions");
  Exponent cur(static_cast<std::size_t>(nvars), 0);
  std::vector<Exponent> all;
  enumerate(nvars, order, 0, cur, all);
  // Sort by degree so that index 0 is the constant term.
  std::stable_sort(all.begin(), all.end(), [](const Exponent& a, const Exponent& b) {
    int da = 0, db = 0;
    for (auto v : a) da += v;
    for (auto v : b) db += v;
    return da < db;
  });
  exponents_ = std::move(all);

  long table = 1;
  for (int i = 0; i < nvars; ++i) table *= (order + 1);
  lookup_.assign(static_cast<std::size_t>(table), -1);
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    int d = 0;
    double w = 1.0;
    for (auto v : exponents_[i]) {
      d += v;
      w *= factorial(v);
    }
    degree_.push_back(d);
    weight_.push_back(w);
    lookup_[static_cast<std::size_t>(encode(exponents_[i]))] = static_cast<long>(i);
  }

  Exponent sum(static_cast<std::size_t>(nvars));
  for (std::size_t a = 0; a < exponents_.size(); ++a) {
    for (std::size_t b = 0; b < exponents_.size(); ++b) {
      if (degree_[a] + degree_[b] > order) continue;
      for (int v = 0; v < nvars; ++v) sum[v] = exponents_[a][v] + exponents_[b][v];
      products_.push_back({static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b),
                           static_cast<std::uint32_t>(index_of(sum))});
    }
  }

  conj_perm_.resize(exponents_.size());
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    Exponent e = exponents_[i];
    for (int v = 0; v + 1 < nvars; v += 2) std::swap(e[v], e[v + 1]);
    conj_perm_[i] = static_cast<std::uint32_t>(index_of(e));
  }
}

long JetSpace::encode(const Exponent& e) const {
  long code = 0;
  for (int v = nvars_ - 1; v >= 0; --v) code = code * (order_ + 1) + e[v];
  return code;
}

long JetSpace::index_of(const Exponent& e) const {
  int d = 0;
  for (auto v : e) d += v;
  if (d > order_) return -1;
  return lookup_[static_cast<std::size_t>(encode(e))];
}

long JetSpace::index_of_vars(std::initializer_list<int> vars) const {
  Exponent e(static_cast<std::size_t>(nvars_), 0);
  for (int v : vars) ++e[static_cast<std::size_t>(v)];
  return index_of(e);
}

Jet::Jet(const JetSpace& space, cplx constant) : space_(&space), c_(space.size(), 0.0) {
  c_[0] = constant;
}

Jet Jet::variable(const JetSpace& space, int var, cplx value) {
  Jet j(space, value);
  j.c_[static_cast<std::size_t>(space.index_of_vars({var}))] = 1.0;
  return j;
}

Jet& Jet::operator+=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(cplx s) {
  for (auto& x : c_) x *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  Jet out(*a.space_, 0.0);
  const cplx* pa = a.c_.data();
  const cplx* pb = b.c_.data();
  cplx* po = out.c_.data();
  for (const auto& t : a.space_->products()) po[t.out] += pa[t.a] * pb[t.b];
  return out;
}

Jet Jet::compose(std::span<const cplx> coeffs) const {
  const int order = space_->order();
  Jet h = *this;
  h.c_[0] = 0.0;
  Jet acc(*space_, coeffs[static_cast<std::size_t>(order)]);
  for (int k = order - 1; k >= 0; --k) {
    acc = acc * h;
    acc.c_[0] += coeffs[static_cast<std::size_t>(k)];
  }
  return acc;
}

Jet Jet::conj() const {
  Jet out(*space_, 0.0);
  const auto& perm = space_->conj_perm();
  for (std::size_t i = 0; i < c_.size(); ++i) out.c_[perm[i]] = std::conj(c_[i]);
  return out;
}

namespace {

// Taylor coefficients of x^p about x0: binom(p, k) x0^(p-k).
std::vector<cplx> power_coeffs(cplx x0, double p, int order) {
  std::vector<cplx> c(static_cast<std::size_t>(order + 1));
  cplx binom = 1.0;
  for (int k = 0; k <= order; ++k) {
    c[static_cast<std::size_t>(k)] = binom * std::pow(x0, p - k);
    binom *= (p - k) / (k + 1.0);
  }
  return c;
}

}  // namespace

Jet reciprocal(const Jet& a) {
  if (a.value() == cplx(0.0)) throw InvalidInput("jet reciprocal of zero");
  return a.compose(power_coeffs(a.value(), -1.0, a.space().order()));
}

Jet jet_log(const Jet& a) {
  const cplx x0 = a.value();
  const int order = a.space().order();
  std::vector<cplx> c(static_cast<std::size_t>(order + 1));
  c[0] = std::log(x0);
  for (int k = 1; k <= order; ++k)
    c[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(k) * std::pow(x0, k));
  return a.compose(c);
}

Jet jet_exp(const Jet& a) {
  const cplx e0 = std::exp(a.value());
  const int order = a.space().order();
  std::vector<cplx> c(static_cast<std::size_t>(order + 1));
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    c[static_cast<std::size_t>(k)] = e0 / fact;
  }
  return a.compose(c);
}

Jet jet_ipow(const Jet& a, int p) {
  if (p < 0) return reciprocal(jet_ipow(a, -p));
  Jet result(a.space(), 1.0);
  Jet base = a;
  while (p > 0) {
    if (p & 1) result = result * base;
    p >>= 1;
    if (p) base = base * base;
  }
  return result;
}

Jet jet_pow(const Jet& a, double p) {
  if (p == std::round(p) && std::abs(p) < 64) return jet_ipow(a, static_cast<int>(p));
  return a.compose(power_coeffs(a.value(), p, a.space().order()));
}

}  // namespace spaceform
