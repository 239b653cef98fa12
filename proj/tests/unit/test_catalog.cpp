#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "spaceform/catalog.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/kahler.hpp"
#include "spaceform/sampling.hpp"

using namespace spaceform;

TEST_CASE("entry names") {
  const auto& names = catalog_names();
  for (const char* n : {"flat", "bergman", "fubini-study", "cone-flat", "cone-log"})
    CHECK(std::find(names.begin(), names.end(), n) != names.end());
  CHECK_THROWS_AS(catalog("hyperbolic", {}), UnknownEntry);
}

TEST_CASE("parameter validation") {
  CatalogParams p;
  p.beta = {0.5};
  CHECK_THROWS_AS(catalog("cone-flat", p), InvalidInput);
  p.beta = {0.5, -1.0};
  CHECK_THROWS_AS(catalog("cone-flat", p), InvalidInput);
  CatalogParams big;
  big.radius = 1.5;
  CHECK_THROWS_AS(catalog("bergman", big), InvalidInput);
}

TEST_CASE("cone-flat with unit angles is the flat metric") {
  CatalogParams p;
  p.n = 3;
  p.beta = {1.0, 1.0, 1.0};
  const MetricField cone = catalog("cone-flat", p);
  const MetricField flat = catalog("flat", p);
  CHECK(cone.domain().punctures.empty());
  std::mt19937_64 rng(31);
  for (int k = 0; k < 10; ++k) {
    const CVec z = testing::random_point(rng, 3, 0.9);
    CHECK(testing::max_abs(cone.metric_at(z) - flat.metric_at(z)) == 0.0);
  }
}

TEST_CASE("cone-flat metric in closed form") {
  CatalogParams p;
  p.beta = {0.5, 0.75};
  const MetricField f = catalog("cone-flat", p);
  REQUIRE(f.domain().punctures.size() == 2);
  std::mt19937_64 rng(32);
  for (int k = 0; k < 10; ++k) {
    const CVec z = testing::random_point(rng, 2, 0.9);
    if (!f.domain().admissible(z)) continue;
    const CMat H = f.metric_at(z);
    // d dbar |z|^{2b} = b^2 |z|^{2(b-1)}.
    for (int j = 0; j < 2; ++j) {
      const double b = p.beta[static_cast<std::size_t>(j)];
      CHECK(std::abs(H(j, j) - b * b * std::pow(std::norm(z[j]), b - 1.0)) < 1e-12 * std::abs(H(j, j)));
    }
    CHECK(std::abs(H(0, 1)) < 1e-15);
  }
}

TEST_CASE("cone entries are space forms off the divisor") {
  CatalogParams p;
  p.beta = {0.5, 0.5};
  const MetricField cf = catalog("cone-flat", p);
  const auto samples = shell_samples(cf.domain(), 2, 20, 0.1, 0.9, 1);
  CHECK(verify_space_form(cf, samples, 0.0).pass);

  p.beta = {0.5, 1.0};
  const MetricField cl = catalog("cone-log", p);
  const auto s2 = shell_samples(cl.domain(), 2, 20, 0.1, 0.7, 2);
  const auto rep = verify_space_form(cl, s2, -4.0);
  CHECK(rep.pass);
  CHECK(rep.values.at("best_fit_c") == doctest::Approx(-4.0).epsilon(1e-8));
}

TEST_CASE("potential text") {
  CatalogParams p;
  CHECK(catalog_potential("flat", p) == "abs2(z1) + abs2(z2)");
  p.beta = {0.5, 1.0};
  const std::string cone = catalog_potential("cone-flat", p);
  CHECK(cone.find("abs2(z1)^0.5") != std::string::npos);
  CHECK(cone.find("abs2(z2)^") == std::string::npos);
  CHECK_NOTHROW(Expr::parse(catalog_potential("cone-log", p)).require_real());
  CHECK_NOTHROW(Expr::parse(catalog_potential("fubini-study", p)).require_real());
}

TEST_CASE("extra punctures are appended") {
  CatalogParams p;
  p.punctures.push_back(Puncture::closed_ball(CVec::Zero(2), 0.2));
  const MetricField f = catalog("bergman", p);
  CHECK_FALSE(f.domain().admissible(CVec::Zero(2)));
  CHECK(f.domain().admissible(from_list({cplx(0.5), cplx(0.0)})));
  CHECK_THROWS_AS(f.metric_at(from_list({cplx(0.1), cplx(0.0)})), DomainError);
}
