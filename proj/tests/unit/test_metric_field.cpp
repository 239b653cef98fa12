#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/metric_field.hpp"
#include "spaceform/sampling.hpp"

using namespace spaceform;

TEST_CASE("puncture distances") {
  const Puncture ball = Puncture::closed_ball(from_list({cplx(0.1), cplx(0.0)}), 0.2);
  CHECK(ball.distance(from_list({cplx(0.6), cplx(0.0)})) == doctest::Approx(0.3));
  CHECK(ball.distance(from_list({cplx(0.1), cplx(0.0)})) == doctest::Approx(-0.2));

  const Puncture plane = Puncture::plane();
  CHECK(plane.distance(from_list({cplx(0.3), cplx(0.0, 0.4), cplx(5.0)})) == doctest::Approx(0.5));

  const Puncture div = Puncture::hyperplane(1);
  CHECK(div.distance(from_list({cplx(0.9), cplx(0.0, -0.25)})) == doctest::Approx(0.25));
}

TEST_CASE("segment distance agrees with dense sampling") {
  std::mt19937_64 rng(71);
  const Puncture ps[] = {Puncture::closed_ball(from_list({cplx(0.1, 0.1), cplx(-0.2)}), 0.15),
                         Puncture::plane(), Puncture::hyperplane(0)};
  for (const auto& p : ps)
    for (int k = 0; k < 20; ++k) {
      const CVec a = testing::random_point(rng, 2, 0.9), b = testing::random_point(rng, 2, 0.9);
      double sampled = std::numeric_limits<double>::infinity();
      for (int t = 0; t <= 4000; ++t) sampled = std::min(sampled, p.distance(a + (b - a) * (t / 4000.0)));
      CHECK(p.segment_distance(a, b) <= sampled + 1e-12);
      CHECK(p.segment_distance(a, b) >= sampled - 1e-3);
    }
}

TEST_CASE("domain admissibility and step limits") {
  Domain d;
  d.punctures.push_back(Puncture::closed_ball(CVec::Zero(2), 0.2));
  CHECK_FALSE(d.admissible(from_list({cplx(0.2005), cplx(0.0)})));
  CHECK(d.admissible(from_list({cplx(0.25), cplx(0.0)})));
  CHECK_FALSE(d.admissible(from_list({cplx(1.0), cplx(0.0)})));
  CHECK_FALSE(d.segment_admissible(from_list({cplx(0.5), cplx(0.0)}), from_list({cplx(-0.5), cplx(0.0)})));
  CHECK(d.segment_admissible(from_list({cplx(0.5), cplx(0.0)}), from_list({cplx(0.0), cplx(0.5)})));
  CHECK(d.step_limit(from_list({cplx(0.6), cplx(0.0)})) == doctest::Approx(0.05));
  CHECK(d.step_limit(from_list({cplx(0.9), cplx(0.0)})) == doctest::Approx(0.025));
  CHECK(d.step_limit(from_list({cplx(0.3), cplx(0.0)})) == doctest::Approx(0.025));
}

TEST_CASE("component-backed and potential-backed sources") {
  Domain d;
  const auto pot = Expr::parse("abs2(z1) + 2*abs2(z2)");
  const MetricField f = MetricField::from_sources(2, pot, [](const CVec&) { return CMat(CMat::Identity(2, 2)); }, d);
  CHECK(f.potential_backed());
  CHECK(f.metric_at(CVec::Zero(2))(1, 1) == cplx(2.0));
  const MetricField g = MetricField::from_sources(2, std::nullopt, [](const CVec& z) {
    CMat H = CMat::Identity(2, 2);
    H(0, 0) += z.squaredNorm();
    return H;
  }, d);
  CHECK_FALSE(g.potential_backed());
  const MetricData md = g.derivatives(from_list({cplx(0.3), cplx(0.1)}), 1);
  // d/dz1 (|z1|^2 + |z2|^2) = conj(z1).
  CHECK(std::abs(md.dH[0](0, 0) - 0.3) < 1e-8);
  CHECK_THROWS_AS(MetricField::from_sources(2, std::nullopt, std::nullopt, d), InvalidInput);
  CHECK_THROWS_AS(g.metric_at(from_list({cplx(2.0), cplx(0.0)})), DomainError);
}

TEST_CASE("shell samples") {
  Domain d;
  d.punctures.push_back(Puncture::hyperplane(0));
  const auto s = shell_samples(d, 2, 200, 0.3, 0.6, 4);
  CHECK(s.size() == 200);
  for (const auto& z : s) {
    CHECK(z.norm() >= 0.3 - 1e-12);
    CHECK(z.norm() <= 0.6 + 1e-12);
    CHECK(d.admissible(z));
  }
  CHECK(shell_samples(d, 2, 200, 0.3, 0.6, 4) == s);
  CHECK_FALSE(shell_samples(d, 2, 200, 0.3, 0.6, 5) == s);
  CHECK_THROWS_AS(shell_samples(d, 2, 5, 0.6, 0.3, 0), InvalidInput);
  CHECK(random_direction(3, 9).norm() == doctest::Approx(1.0));
}
