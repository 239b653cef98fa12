#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "spaceform/catalog.hpp"
#include "spaceform/developing.hpp"
#include "spaceform/errors.hpp"
#include "spaceform/sampling.hpp"

using namespace spaceform;
using testing::random_point;

namespace {

struct ModelCase {
  const char* entry;
  double c;
};
const ModelCase kModels[] = {{"bergman", -4.0}, {"flat", 0.0}, {"fubini-study", 4.0}};

MetricField model_field(const ModelCase& mc) {
  CatalogParams p;
  if (mc.c != 0.0) p.c = mc.c;
  return catalog(mc.entry, p);
}

// Random walk with steps of length `step`, kept inside |z| < bound.
std::vector<CVec> random_walk(std::mt19937_64& rng, CVec start, int segments, double step,
                              double bound) {
  std::vector<CVec> path{start};
  while (static_cast<int>(path.size()) <= segments) {
    const CVec next = path.back() + step * testing::random_vector(rng, static_cast<int>(start.size())).normalized();
    if (next.norm() < bound) path.push_back(next);
  }
  return path;
}

// For a model field the developing map is the isometry fixed by the base germ.
ModelIsometry germ_isometry(const ModelSpace& m, const Germ& g) {
  return isometry_from_frame_data(m, ModelPoint::standard(m, g.p), g.q, g.A);
}

}  // namespace

TEST_CASE("initial germs satisfy the isometry invariant") {
  const CVec p = from_list({cplx(0.3, 0.1), cplx(-0.2, 0.2)});
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc);
    const ModelSpace m(mc.c, 2);
    for (FrameChoice fc : {FrameChoice::gram_schmidt, FrameChoice::identity_type}) {
      GermOptions o;
      o.frame = fc;
      const Germ g = initial_germ(f, m, p, o);
      CHECK(germ_isometry_residual(f, m, g) < 1e-12);
    }
  }
  const MetricField b = catalog("bergman", {});
  GermOptions bad;
  bad.frame = FrameChoice::explicit_frame;
  bad.explicit_q = CVec::Zero(2);
  bad.explicit_A = CMat::Identity(2, 2);
  CHECK_THROWS_AS(initial_germ(b, ModelSpace(-4, 2), p, bad), InvalidFrame);
  CHECK_THROWS_AS(initial_germ(b, ModelSpace(0, 2), p), NotSpaceForm);
}

TEST_CASE("germ evaluation of a model field is the model isometry") {
  std::mt19937_64 rng(41);
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc);
    const ModelSpace m(mc.c, 2);
    const Germ g = initial_germ(f, m, from_list({cplx(0.2), cplx(0.1, -0.1)}));
    const ModelIsometry s = germ_isometry(m, g);
    for (int k = 0; k < 5; ++k) {
      const CVec x = g.p + 0.1 * testing::random_vector(rng, 2).normalized();
      const GermValue v = evaluate_germ(f, m, g, x);
      const ModelPoint sx = apply_isometry(m, s, ModelPoint::standard(m, x));
      INFO(mc.entry);
      CHECK(model_point_distance(m, v.point, sx) < 1e-9);
      CHECK(testing::max_abs(v.differential - isometry_differential(m, s, ModelPoint::standard(m, x))) < 1e-8);
    }
  }
}

TEST_CASE("continuation along 100-segment random paths") {
  std::mt19937_64 rng(42);
  for (const auto& mc : kModels) {
    const MetricField f = model_field(mc);
    const ModelSpace m(mc.c, 2);
    const Germ g = initial_germ(f, m, CVec::Zero(2));
    const ModelIsometry s = germ_isometry(m, g);
    const auto path = random_walk(rng, CVec::Zero(2), 100, 0.04, 0.7);
    const Germ end = continue_germ(f, m, g, path);
    INFO(mc.entry);
    CHECK(germ_isometry_residual(f, m, end) <= 1e-6);
    CHECK(model_point_distance(m, end.q, apply_isometry(m, s, ModelPoint::standard(m, end.p))) < 1e-7);

    // Subdividing every segment changes nothing.
    std::vector<CVec> fine{path.front()};
    for (std::size_t i = 1; i < path.size(); ++i) {
      fine.push_back(0.5 * (path[i - 1] + path[i]));
      fine.push_back(path[i]);
    }
    CHECK(germ_distance(f, m, end, continue_germ(f, m, g, fine)) <= 1e-7);
  }
}

TEST_CASE("homotopic paths give the same germ") {
  std::mt19937_64 rng(43);
  CatalogParams p;
  p.punctures.push_back(Puncture::closed_ball(from_list({cplx(-0.4), cplx(0.0)}), 0.1));
  const MetricField f = catalog("bergman", p);
  const ModelSpace m(-4, 2);
  const CVec a = from_list({cplx(0.1), cplx(0.0)});
  const CVec b = from_list({cplx(0.5, 0.3), cplx(0.1, 0.0)});
  const CVec via = from_list({cplx(0.2, 0.5), cplx(0.0, -0.1)});
  const Germ g = initial_germ(f, m, a);
  const auto p1 = segment_path(a, b, 0.05);
  auto p2 = segment_path(a, via, 0.05);
  const auto tail = segment_path(via, b, 0.05);
  p2.insert(p2.end(), tail.begin() + 1, tail.end());
  const auto rep = homotopy_invariance_check(f, m, g, p1, p2);
  CHECK(rep.pass);
  CHECK(rep.max_residual <= 1e-6);
}

TEST_CASE("paths touching a guard zone are rejected") {
  CatalogParams p;
  p.beta = {0.5, 1.0};
  const MetricField f = catalog("cone-flat", p);
  const ModelSpace m(0, 2);
  const CVec a = from_list({cplx(0.5), cplx(0.0)});
  GermOptions o;
  o.frame = FrameChoice::explicit_frame;
  o.explicit_q = from_list({cplx(std::sqrt(0.5)), cplx(0.0)});
  o.explicit_A = CMat::Identity(2, 2);
  o.explicit_A(0, 0) = 0.5 / std::sqrt(0.5);
  const Germ g = initial_germ(f, m, a, o);
  CHECK_THROWS_AS(continue_germ(f, m, g, {a, from_list({cplx(-0.5), cplx(0.0)})}), GeometryError);
}

TEST_CASE("develop_region: pullback, determinism, connectivity") {
  CatalogParams p;
  p.punctures.push_back(Puncture::closed_ball(CVec::Zero(2), 0.2));
  const MetricField f = catalog("bergman", p);
  const ModelSpace m(-4, 2);
  const auto samples = shell_samples(f.domain(), 2, 60, 0.3, 0.7, 5);
  const Germ base = initial_germ(f, m, from_list({cplx(0.5), cplx(0.0)}));
  DevelopOptions serial, parallel;
  serial.policy = ExecPolicy::serial;
  parallel.policy = ExecPolicy::parallel;
  const DevelopedField a = develop_region(f, m, base, samples, serial);
  const DevelopedField b = develop_region(f, m, base, samples, parallel);
  REQUIRE(a.germs.size() == samples.size());
  CHECK(a.parent == b.parent);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    CHECK((a.image(i).coords - b.image(i).coords).norm() == 0.0);
    CHECK(testing::max_abs(a.differential(i) - b.differential(i)) == 0.0);
  }
  const auto rep = verify_pullback(f, m, a);
  CHECK(rep.pass);
  CHECK(rep.max_residual <= 1e-6);

  // The development of a model field is the germ's isometry.
  const ModelIsometry s = germ_isometry(m, base);
  for (std::size_t i = 0; i < samples.size(); i += 7)
    CHECK(model_point_distance(m, a.image(i), apply_isometry(m, s, ModelPoint::standard(m, samples[i]))) < 1e-8);

  const CVec x = from_list({cplx(0.0, 0.45), cplx(0.2, 0.0)});
  const GermValue v = evaluate_developed(f, m, a, x);
  CHECK(model_point_distance(m, v.point, apply_isometry(m, s, ModelPoint::standard(m, x))) < 1e-8);

  // Two far clusters with a 1-nearest-neighbour graph cannot be joined.
  std::vector<CVec> split;
  for (int k = 0; k < 3; ++k) split.push_back(from_list({cplx(0.5 + 0.01 * k), cplx(0.0)}));
  for (int k = 0; k < 3; ++k) split.push_back(from_list({cplx(-0.5 - 0.01 * k), cplx(0.0)}));
  DevelopOptions sparse;
  sparse.neighbors = 1;
  CHECK_THROWS_AS(develop_region(f, m, base, split, sparse), UnreachableSamples);
}

TEST_CASE("monodromy of the branched flat cone") {
  CatalogParams p;
  p.beta = {0.5, 1.0};
  const MetricField f = catalog("cone-flat", p);
  const ModelSpace m(0, 2);
  const CVec a = from_list({cplx(0.5), cplx(0.0)});
  GermOptions o;
  o.frame = FrameChoice::explicit_frame;
  o.explicit_q = from_list({cplx(std::sqrt(0.5)), cplx(0.0)});
  o.explicit_A = CMat::Identity(2, 2);
  o.explicit_A(0, 0) = 0.5 / std::sqrt(0.5);  // derivative of z1^{1/2} at 0.5
  const Germ g = initial_germ(f, m, a, o);

  const ModelIsometry once = monodromy(f, m, g, circle_loop(a, 0, 0.0, 64));
  CMat flip = CMat::Identity(2, 2);
  flip(0, 0) = -1.0;
  CHECK(testing::max_abs(once.U - flip) <= 1e-6);
  CHECK(once.b.norm() <= 1e-6);

  const ModelIsometry twice = monodromy(f, m, g, circle_loop(a, 0, 0.0, 64, 2));
  CHECK(testing::max_abs(twice.U - CMat::Identity(2, 2)) <= 1e-6);
  CHECK(twice.b.norm() <= 1e-6);

  // A loop that does not wind around the divisor is contractible.
  const ModelIsometry none = monodromy(f, m, g, circle_loop(a, 0, 0.35, 32));
  CHECK(testing::max_abs(none.U - CMat::Identity(2, 2)) <= 1e-6);
  CHECK(none.b.norm() <= 1e-6);

  CHECK_THROWS_AS(monodromy(f, m, g, {a, from_list({cplx(0.4), cplx(0.0)})}), InvalidInput);
}

TEST_CASE("monodromy is a homomorphism on loop words") {
  CatalogParams p;
  p.beta = {0.5, 1.0 / 3.0};
  const MetricField f = catalog("cone-flat", p);
  const ModelSpace m(0, 2);
  const CVec a = from_list({cplx(0.5), cplx(0.4)});
  GermOptions o;
  o.frame = FrameChoice::explicit_frame;
  o.explicit_q = from_list({cplx(std::pow(0.5, 0.5)), cplx(std::pow(0.4, 1.0 / 3.0))});
  o.explicit_A = CMat::Zero(2, 2);
  o.explicit_A(0, 0) = 0.5 * std::pow(0.5, -0.5);
  o.explicit_A(1, 1) = (1.0 / 3.0) * std::pow(0.4, -2.0 / 3.0);
  const Germ g = initial_germ(f, m, a, o);

  const auto la = circle_loop(a, 0, 0.0, 48);
  const auto lb = circle_loop(a, 1, 0.0, 48);
  auto concat = [](std::vector<CVec> x, const std::vector<CVec>& y) {
    x.insert(x.end(), y.begin() + 1, y.end());
    return x;
  };
  auto reversed = [](std::vector<CVec> x) {
    std::reverse(x.begin(), x.end());
    return x;
  };
  const ModelIsometry A = monodromy(f, m, g, la);
  const ModelIsometry B = monodromy(f, m, g, lb);
  const cplx w3 = std::polar(1.0, 2.0 * M_PI / 3.0);
  CHECK(std::abs(B.U(1, 1) - w3) <= 1e-6);

  std::vector<ModelPoint> probes;
  for (int k = 0; k < 4; ++k) probes.push_back(ModelPoint::standard(m, 0.3 * CVec::Unit(2, k % 2) * (k + 1)));
  struct Word {
    std::vector<CVec> loop;
    ModelIsometry expected;
  };
  const Word words[] = {{concat(la, lb), compose(A, B)},
                        {concat(concat(lb, lb), la), compose(compose(B, B), A)},
                        {concat(concat(la, lb), reversed(la)), compose(compose(A, B), inverse(A))}};
  for (const auto& w : words) {
    const auto cmp = isometries_equal(m, monodromy(f, m, g, w.loop), w.expected, probes, 1e-6);
    CHECK(cmp.equal);
    CHECK(cmp.max_deviation <= 1e-6);
  }
}

TEST_CASE("path helpers") {
  const CVec a = CVec::Zero(2), b = from_list({cplx(1.0), cplx(0.0)});
  const auto seg = segment_path(a, b, 0.3);
  CHECK(seg.size() == 5);
  CHECK((seg.back() - b).norm() == 0.0);
  for (std::size_t i = 1; i < seg.size(); ++i) CHECK((seg[i] - seg[i - 1]).norm() <= 0.3 + 1e-15);
  const auto loop = circle_loop(b, 0, 0.0, 16);
  CHECK(loop.size() == 17);
  CHECK((loop.front() - loop.back()).norm() < 1e-15);
  for (const auto& z : loop) CHECK(std::abs(std::abs(z[0]) - 1.0) < 1e-15);
}
