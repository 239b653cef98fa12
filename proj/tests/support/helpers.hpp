#pragma once

#include <random>

#include "spaceform/linalg.hpp"

namespace testing {

using spaceform::cplx;
using spaceform::CMat;
using spaceform::CVec;

inline CVec random_point(std::mt19937_64& rng, int n, double max_radius) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CVec z(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng);
    z[i] = cplx(re, g(rng));
  }
  return z.normalized() * (max_radius * std::pow(u(rng), 1.0 / (2.0 * n)));
}

inline CVec random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  CVec v(n);
  for (int i = 0; i < n; ++i) {
    const double re = g(rng);
    v[i] = cplx(re, g(rng));
  }
  return v;
}

inline double max_abs(const CMat& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace testing
