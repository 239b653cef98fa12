#include "spaceform/sampling.hpp"

#include <cmath>
#include <random>

#include "spaceform/errors.hpp"

namespace spaceform {

namespace {

CVec gaussian_direction(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng);
    v[i] = cplx(re, g(rng));
  }
  return v.normalized();
}

}  // namespace

std::vector<CVec> shell_samples(const Domain& domain, int n, int count, double inner,
                                double outer, std::uint64_t seed) {
  if (n < 1 || count < 0) throw InvalidInput("shell_samples needs n >= 1 and count >= 0");
  if (!(inner >= 0.0 && outer > inner)) throw InvalidInput("shell radii must satisfy 0 <= inner < outer");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double dim = 2.0 * n;
  const double a = std::pow(inner, dim), b = std::pow(outer, dim);
  std::vector<CVec> out;
  out.reserve(static_cast<std::size_t>(count));
  long attempts = 0;
  while (static_cast<int>(out.size()) < count) {
    if (++attempts > 1000L * std::max(count, 1))
      throw InvalidInput("shell has almost no admissible points");
    const double r = std::pow(a + (b - a) * u(rng), 1.0 / dim);
    CVec z = r * gaussian_direction(n, rng);
    if (domain.admissible(z)) out.push_back(std::move(z));
  }
  return out;
}

CVec random_direction(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return gaussian_direction(n, rng);
}

}  // namespace spaceform
