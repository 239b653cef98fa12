#include "spaceform/metric_field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spaceform/errors.hpp"

namespace spaceform {

Puncture Puncture::closed_ball(CVec center, double radius) {
  Puncture p;
  p.kind = Kind::ball;
  p.center = std::move(center);
  p.radius = radius;
  return p;
}

Puncture Puncture::plane() {
  Puncture p;
  p.kind = Kind::plane12;
  return p;
}

Puncture Puncture::hyperplane(int coord) {
  Puncture p;
  p.kind = Kind::divisor;
  p.coord = coord;
  return p;
}

double Puncture::distance(const CVec& z) const {
  switch (kind) {
    case Kind::ball: return (z - center).norm() - radius;
    case Kind::plane12: return std::hypot(std::abs(z[0]), std::abs(z[1]));
    case Kind::divisor: return std::abs(z[coord]);
  }
  return 0.0;
}

namespace {

// Distance from the origin to the segment [a, b].
double origin_to_segment(const CVec& a, const CVec& b) {
  const CVec w = b - a;
  const double ww = w.squaredNorm();
  double t = ww > 0 ? -std::real(w.dot(a)) / ww : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * w).norm();
}

CVec project(const Puncture& p, const CVec& z) {
  switch (p.kind) {
    case Puncture::Kind::ball: return z - p.center;
    case Puncture::Kind::plane12: return z.head(2);
    case Puncture::Kind::divisor: return z.segment(p.coord, 1);
  }
  return z;
}

}  // namespace

double Puncture::segment_distance(const CVec& a, const CVec& b) const {
  const double d = origin_to_segment(project(*this, a), project(*this, b));
  return kind == Kind::ball ? d - radius : d;
}

bool Domain::segment_admissible(const CVec& a, const CVec& b) const {
  if (!admissible(a) || !admissible(b)) return false;
  for (const auto& p : punctures)
    if (p.segment_distance(a, b) <= guard()) return false;
  return true;
}

double Domain::distance_to_punctures(const CVec& z) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& p : punctures) d = std::min(d, p.distance(z));
  return d;
}

bool Domain::admissible(const CVec& z) const {
  return distance_to_boundary(z) > guard() && distance_to_punctures(z) > guard();
}

double Domain::step_limit(const CVec& z) const {
  const double cap = 0.05 * radius;
  const double d = std::min(distance_to_punctures(z), distance_to_boundary(z));
  return std::min(cap, 0.25 * d);
}

struct MetricField::Impl {
  int n = 0;
  Domain domain;
  std::string name;
  std::optional<Expr> potential;
  double scale = 1.0;
  ComponentFn components;
  double fd_step = 1e-4;
  const JetSpace* spaces[3] = {nullptr, nullptr, nullptr};  // orders 2, 3, 4
};

MetricField MetricField::from_potential(int n, Expr potential, Domain domain, double scale,
                                        std::string name) {
  if (n < 1) throw InvalidInput("metric dimension must be >= 1");
  potential.require_real();
  if (potential.max_variable() > n)
    throw InvalidInput("potential uses z" + std::to_string(potential.max_variable()) +
                       " but n = " + std::to_string(n));
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->domain = std::move(domain);
  impl->name = std::move(name);
  impl->potential = std::move(potential);
  impl->scale = scale;
  for (int o = 0; o < 3; ++o) impl->spaces[o] = &JetSpace::get(2 * n, 2 + o);
  return MetricField(std::move(impl));
}

MetricField MetricField::from_components(int n, ComponentFn fn, Domain domain, double fd_step,
                                         std::string name) {
  if (n < 1) throw InvalidInput("metric dimension must be >= 1");
  auto impl = std::make_shared<Impl>();
  impl->n = n;
  impl->domain = std::move(domain);
  impl->name = std::move(name);
  impl->components = std::move(fn);
  impl->fd_step = fd_step;
  return MetricField(std::move(impl));
}

MetricField MetricField::from_sources(int n, std::optional<Expr> potential,
                                      std::optional<ComponentFn> components, Domain domain) {
  if (potential) return from_potential(n, std::move(*potential), std::move(domain));
  if (components) return from_components(n, std::move(*components), std::move(domain));
  throw InvalidInput("metric field needs a potential or component functions");
}

int MetricField::dim() const { return impl_->n; }
const Domain& MetricField::domain() const { return impl_->domain; }
const std::string& MetricField::name() const { return impl_->name; }
bool MetricField::potential_backed() const { return impl_->potential.has_value(); }
const std::optional<Expr>& MetricField::potential() const { return impl_->potential; }
double MetricField::potential_scale() const { return impl_->scale; }

void MetricField::check_point(const CVec& z) const {
  if (z.size() != impl_->n) throw InvalidInput("point has wrong dimension");
  if (!z.allFinite()) throw DomainError("non-finite point");
  if (!impl_->domain.admissible(z))
    throw DomainError("point outside the domain or inside a puncture guard zone");
}

CMat MetricField::metric_at(const CVec& z) const { return derivatives(z, 0).H; }

MetricData MetricField::derivatives(const CVec& z, int order) const {
  check_point(z);
  MetricData d = derivatives_unchecked(z, order);
  if (!is_positive_definite(d.H, 1e-8))
    throw NotPositiveDefinite("metric is not Hermitian positive definite at the query point");
  return d;
}

namespace {

MetricData from_jet(const Jet& phi, int n, int order, double scale) {
  const JetSpace& s = phi.space();
  auto D = [&](std::initializer_list<int> vars) {
    return phi.derivative(static_cast<std::size_t>(s.index_of_vars(vars))) * scale;
  };
  MetricData d;
  d.H.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d.H(i, j) = D({2 * j, 2 * i + 1});
  if (order >= 1) {
    d.dH.assign(static_cast<std::size_t>(n), CMat(n, n));
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d.dH[static_cast<std::size_t>(k)](i, j) = D({2 * k, 2 * j, 2 * i + 1});
  }
  if (order >= 2) {
    d.ddbarH.assign(static_cast<std::size_t>(n), std::vector<CMat>(static_cast<std::size_t>(n), CMat(n, n)));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            d.ddbarH[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)](i, j) =
                D({2 * k, 2 * l + 1, 2 * j, 2 * i + 1});
  }
  return d;
}

}  // namespace

MetricData MetricField::derivatives_unchecked(const CVec& z, int order) const {
  const int n = impl_->n;
  if (order < 0 || order > 2) throw InvalidInput("derivative order must be 0, 1 or 2");
  if (impl_->potential) {
    const JetSpace& space = *impl_->spaces[order];
    std::vector<Jet> vars;
    vars.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      Jet v(space, z[k]);
      v += Jet::variable(space, 2 * k, 0.0);
      vars.push_back(std::move(v));
    }
    Jet phi = impl_->potential->eval(std::span<const Jet>(vars));
    return from_jet(phi, n, order, impl_->scale);
  }

  // Component-backed: central differences in real coordinates.
  const auto& f = impl_->components;
  const double h = impl_->fd_step;
  MetricData d;
  d.H = f(z);
  if (order == 0) return d;
  auto shifted = [&](int a, double ha, int b, double hb) {
    CVec w = z;
    if (a >= 0) w[a / 2] += (a % 2 == 0) ? cplx(ha, 0) : cplx(0, ha);
    if (b >= 0) w[b / 2] += (b % 2 == 0) ? cplx(hb, 0) : cplx(0, hb);
    return f(w);
  };
  // Real partials d/d(real coord a).
  std::vector<CMat> dreal(static_cast<std::size_t>(2 * n));
  for (int a = 0; a < 2 * n; ++a)
    dreal[static_cast<std::size_t>(a)] = (shifted(a, h, -1, 0) - shifted(a, -h, -1, 0)) / (2 * h);
  d.dH.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k)
    d.dH[static_cast<std::size_t>(k)] =
        0.5 * (dreal[static_cast<std::size_t>(2 * k)] - I_unit * dreal[static_cast<std::size_t>(2 * k + 1)]);
  if (order == 1) return d;

  std::vector<std::vector<CMat>> second(static_cast<std::size_t>(2 * n),
                                        std::vector<CMat>(static_cast<std::size_t>(2 * n)));
  for (int a = 0; a < 2 * n; ++a) {
    for (int b = a; b < 2 * n; ++b) {
      CMat m;
      if (a == b) {
        m = (shifted(a, h, -1, 0) - 2.0 * d.H + shifted(a, -h, -1, 0)) / (h * h);
      } else {
        m = (shifted(a, h, b, h) - shifted(a, h, b, -h) - shifted(a, -h, b, h) +
             shifted(a, -h, b, -h)) /
            (4 * h * h);
      }
      second[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = m;
      second[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = m;
    }
  }
  d.ddbarH.assign(static_cast<std::size_t>(n), std::vector<CMat>(static_cast<std::size_t>(n)));
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      auto S = [&](int a, int b) -> const CMat& {
        return second[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
      };
      const int xk = 2 * k, yk = 2 * k + 1, xl = 2 * l, yl = 2 * l + 1;
      // (d_xk - i d_yk)(d_xl + i d_yl) / 4
      d.ddbarH[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)] =
          0.25 * (S(xk, xl) + I_unit * S(xk, yl) - I_unit * S(yk, xl) + S(yk, yl));
    }
  }
  return d;
}

}  // namespace spaceform
