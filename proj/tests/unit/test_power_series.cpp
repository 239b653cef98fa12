#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/expr.hpp"
#include "spaceform/power_series.hpp"

using namespace spaceform;

namespace {

std::vector<CVec> sample(const ExprMap& f, const std::vector<CVec>& pts) {
  std::vector<CVec> out;
  out.reserve(pts.size());
  for (const auto& z : pts) out.push_back(f.eval(z));
  return out;
}

}  // namespace

TEST_CASE("torus grid ordering") {
  const auto pts = torus_points(2, 0.5, 4, 2.0);
  REQUIRE(pts.size() == 16);
  // First coordinate slowest; |lambda z_i| = rho.
  CHECK(std::abs(pts[1][0] - pts[0][0]) == 0.0);
  CHECK(std::abs(pts[4][1] - pts[0][1]) == 0.0);
  for (const auto& z : pts)
    for (int i = 0; i < 2; ++i) CHECK(std::abs(2.0 * std::abs(z[i]) - 0.5) < 1e-15);
  const auto with_tail = torus_points(2, 0.5, 4, 1.0, from_list({cplx(0.1, 0.2)}));
  CHECK(with_tail[5].size() == 3);
  CHECK(with_tail[5][2] == cplx(0.1, 0.2));
}

TEST_CASE("polynomial coefficients are recovered exactly") {
  // F1 = 1 + 2 z1 - 3i z1 z2^2 + z2^5, F2 = (0.5 + i) z1^3 z2.
  const ExprMap f = ExprMap::parse({"1 + 2*z1 - 3*i*z1*z2^2 + z2^5", "(0.5 + i)*z1^3*z2"});
  for (double lambda : {1.0, 2.5}) {
    const double rho = 0.4;
    const int m = 16;
    TorusOptions o;
    o.degree = 6;
    const auto s = torus_extend(sample(f, torus_points(2, rho, m, lambda)), 2, rho, m, lambda, o);
    // a_k multiplies (lambda z)^k, so a_k = c_k / lambda^{|k|}.
    auto a = [&](int c, int k1, int k2) { return s.coeff(c, std::vector<int>{k1, k2}); };
    CHECK(std::abs(a(0, 0, 0) - 1.0) < 1e-13);
    CHECK(std::abs(a(0, 1, 0) - 2.0 / lambda) < 1e-13);
    CHECK(std::abs(a(0, 1, 2) - cplx(0, -3.0) / std::pow(lambda, 3)) < 1e-12);
    CHECK(std::abs(a(0, 0, 5) - 1.0 / std::pow(lambda, 5)) < 1e-12);
    CHECK(std::abs(a(1, 3, 1) - cplx(0.5, 1.0) / std::pow(lambda, 4)) < 1e-12);
    CHECK(std::abs(a(1, 2, 2)) < 1e-12);
    CHECK(s.negative_mass() < 1e-13);
    CHECK(s.torus_residual() < 1e-12);

    std::mt19937_64 rng(51);
    for (int k = 0; k < 5; ++k) {
      const CVec z = testing::random_point(rng, 2, 1.0 / lambda);
      CHECK((s.eval(z) - f.eval(z)).norm() < 1e-11);
      CHECK(testing::max_abs(s.jacobian(z) - f.jacobian(z)) < 1e-10);
    }
  }
}

TEST_CASE("entire function: exp(z1 z2)") {
  const ExprMap f = ExprMap::parse({"exp(z1*z2)"});
  TorusOptions o;
  o.degree = 20;
  const auto s = torus_extend(sample(f, torus_points(2, 0.9, 64)), 2, 0.9, 64, 1.0, o);
  double fact = 1.0;
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) fact *= k;
    CHECK(std::abs(s.coeff(0, std::vector<int>{k, k}) - 1.0 / fact) < 1e-12);
  }
  CHECK(std::abs(s.coeff(0, std::vector<int>{2, 1})) < 1e-14);
}

TEST_CASE("conjugate contamination is detected") {
  const ExprMap f = ExprMap::parse({"z1 + 0.01*conj(z2)"});
  CHECK_THROWS_AS(torus_extend(sample(f, torus_points(2, 0.5, 16)), 2, 0.5, 16, 1.0, TorusOptions{6, 1e-6}),
                  NotHolomorphic);
  try {
    torus_extend(sample(f, torus_points(2, 0.5, 16)), 2, 0.5, 16, 1.0, TorusOptions{6, 1e-6});
  } catch (const NotHolomorphic& e) {
    CHECK(e.residual() > 1e-3);
  }
}

TEST_CASE("aliasing guard and sample count") {
  const ExprMap f = ExprMap::parse({"z1"});
  CHECK_THROWS_AS(torus_extend(sample(f, torus_points(2, 0.5, 8)), 2, 0.5, 8, 1.0, TorusOptions{4, 1e-6}),
                  InvalidInput);
  CHECK_THROWS_AS(torus_extend(sample(f, torus_points(2, 0.5, 16)), 2, 0.5, 32, 1.0, TorusOptions{4, 1e-6}),
                  InvalidInput);
}

TEST_CASE("text format round trip") {
  const ExprMap f = ExprMap::parse({"1 + z1*z2 - 0.25*z2^3", "i*z1"});
  TorusOptions o;
  o.degree = 4;
  const auto s = torus_extend(sample(f, torus_points(2, 0.3, 16, 1.5)), 2, 0.3, 16, 1.5, o);
  const std::string text = s.to_text();
  const PowerSeriesMap back = PowerSeriesMap::from_text(text);
  CHECK(back.nvars() == 2);
  CHECK(back.components() == 2);
  CHECK(back.degree() == 4);
  CHECK(back.rho() == s.rho());
  CHECK(back.lambda() == s.lambda());
  CHECK(back.negative_mass() == s.negative_mass());
  for (int c = 0; c < 2; ++c)
    for (std::size_t t = 0; t < s.indices().size(); ++t) CHECK(back.coeff(c, t) == s.coeff(c, t));
  CHECK(back.to_text() == text);

  CHECK_THROWS_AS(PowerSeriesMap::from_text("n 2\ncomponents 1\n"), ParseError);
  CHECK_THROWS_AS(PowerSeriesMap::from_text("n 2\ncomponents 1\ndegree 1\nrho 0.5\nlambda 1\ncomponent 3\n0 0 1 0\n"),
                  ParseError);
  CHECK_THROWS_AS(PowerSeriesMap::from_text("n 2\ncomponents 1\ndegree 1\nrho 0.5\nlambda 1\ncomponent 1\n0 x 1 0\n"),
                  ParseError);
}

TEST_CASE("three variables from slices on a ring") {
  const ExprMap f = ExprMap::parse({"z1 + z2*z3 - 0.5*z3^2", "z2 + z1*z2*z3", "z3 + 0.2*z1^2"});
  const double rho = 0.5;
  const int m = 16, m3 = 16;
  TorusOptions o;
  o.degree = 6;
  std::vector<CVec> slices;
  std::vector<std::vector<CVec>> values;
  for (int s = 0; s < m3; ++s) {
    const CVec tail = from_list({std::polar(rho, 2.0 * M_PI * s / m3)});
    slices.push_back(tail);
    values.push_back(sample(f, torus_points(2, rho, m, 1.0, tail)));
  }
  const SliceFamily fam = slice_extend(values, slices, rho, m, 1.0, o);
  CHECK(fam.series.size() == static_cast<std::size_t>(m3));
  CHECK(fam.continuity > 0.0);
  const PowerSeriesMap s = assemble_ring(fam, rho, o);
  CHECK(s.nvars() == 3);
  CHECK(std::abs(s.coeff(0, std::vector<int>{0, 1, 1}) - 1.0) < 1e-12);
  CHECK(std::abs(s.coeff(0, std::vector<int>{0, 0, 2}) + 0.5) < 1e-12);
  CHECK(std::abs(s.coeff(1, std::vector<int>{1, 1, 1}) - 1.0) < 1e-12);
  std::mt19937_64 rng(52);
  for (int k = 0; k < 5; ++k) {
    const CVec z = testing::random_point(rng, 3, 0.4);
    CHECK((s.eval(z) - f.eval(z)).norm() < 1e-11);
  }
}
