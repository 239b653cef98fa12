#include "spaceform/catalog.hpp"

#include <charconv>
#include <cmath>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

std::string number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string norm_squared(int n, const std::vector<double>& beta) {
  std::string s;
  for (int j = 0; j < n; ++j) {
    if (j > 0) s += " + ";
    s += "abs2(z" + std::to_string(j + 1) + ")";
    const double b = beta.empty() ? 1.0 : beta[static_cast<std::size_t>(j)];
    if (b != 1.0) s += "^" + number(b);
  }
  return s;
}

std::vector<double> checked_beta(const CatalogParams& p) {
  std::vector<double> beta = p.beta;
  if (beta.empty()) beta.assign(static_cast<std::size_t>(p.n), 1.0);
  if (beta.size() != static_cast<std::size_t>(p.n))
    throw InvalidInput("cone entries need one beta per coordinate (got " +
                       std::to_string(beta.size()) + " for n = " + std::to_string(p.n) + ")");
  for (double b : beta)
    if (!(b > 0.0) || !std::isfinite(b)) throw InvalidInput("cone angle beta must be positive");
  return beta;
}

double curvature_or(const CatalogParams& p, double fallback, int sign) {
  const double c = p.c.value_or(fallback);
  if (sign < 0 && !(c < 0)) throw InvalidInput("this entry needs c < 0");
  if (sign > 0 && !(c > 0)) throw InvalidInput("this entry needs c > 0");
  return c;
}

}  // namespace

const std::vector<std::string>& catalog_names() {
  static const std::vector<std::string> names{"flat", "bergman", "fubini-study", "cone-flat",
                                              "cone-log"};
  return names;
}

std::string catalog_potential(const std::string& name, const CatalogParams& p) {
  if (p.n < 1) throw InvalidInput("dimension must be at least 1");
  if (name == "flat") return norm_squared(p.n, {});
  if (name == "bergman") return "-log(1 - (" + norm_squared(p.n, {}) + "))";
  if (name == "fubini-study") return "log(1 + " + norm_squared(p.n, {}) + ")";
  if (name == "cone-flat") return norm_squared(p.n, checked_beta(p));
  if (name == "cone-log") return "-log(1 - (" + norm_squared(p.n, checked_beta(p)) + "))";
  throw UnknownEntry("unknown catalog entry '" + name + "'");
}

MetricField catalog(const std::string& name, const CatalogParams& p) {
  const Expr potential = Expr::parse(catalog_potential(name, p));
  if (!(p.radius > 0.0)) throw InvalidInput("domain radius must be positive");
  Domain domain;
  domain.radius = p.radius;
  double scale = 1.0;
  if (name == "bergman" || name == "cone-log") {
    scale = 4.0 / std::abs(curvature_or(p, -4.0, -1));
    if (p.radius > 1.0) throw InvalidInput("ball metrics live inside the unit ball");
  } else if (name == "fubini-study") {
    scale = 4.0 / curvature_or(p, 4.0, 1);
  }
  if (name == "cone-flat" || name == "cone-log") {
    const auto beta = checked_beta(p);
    for (std::size_t j = 0; j < beta.size(); ++j)
      if (beta[j] != 1.0) domain.punctures.push_back(Puncture::hyperplane(static_cast<int>(j)));
  }
  domain.punctures.insert(domain.punctures.end(), p.punctures.begin(), p.punctures.end());
  return MetricField::from_potential(p.n, potential, std::move(domain), scale, name);
}

}  // namespace spaceform
