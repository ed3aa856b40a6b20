#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "degreelab/degree.hpp"
#include "support.hpp"

using namespace degreelab::degree;
using degreelab::fibersolve::SolverConfig;
using degreelab::mapforms::PolyMap;
using degreelab::polycore::IntervalBox;
using degreelab::polycore::parse_poly;
using degreelab::polycore::Poly;
using degreelab::polycore::Rational;
using namespace testsupport;

namespace {

std::vector<Rational> zeros(std::size_t n) { return std::vector<Rational>(n, Rational(0)); }

// Composite Simpson on a fine uniform grid.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  double h = (b - a) / panels, s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
  return s * h / 3;
}

struct CorpusCase {
  const char* label;
  std::vector<std::string> comps;
  std::vector<Rational> z;
  double r;
  long expected;
};

std::vector<CorpusCase> corpus() {
  return {{"identity", {"x1", "x2"}, {0, 0}, 1.0, 1},
          {"x^2 at 1", {"x1^2"}, {1}, 2.0, 0},
          {"x^3 - 3x at 0", {"x1^3 - 3*x1"}, {0}, 3.0, 1},
          {"triangular", {"x1 + x2^3", "x2"}, {0, 0}, 2.0, 1},
          {"squares at (1,1)", {"x1^2", "x2^2"}, {1, 1}, 2.0, 0}};
}

}  // namespace

TEST_CASE("unit sphere area") {
  CHECK(unit_sphere_area(1) == doctest::Approx(2.0));
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * std::numbers::pi));
  CHECK(unit_sphere_area(3) == doctest::Approx(4 * std::numbers::pi));
}

TEST_CASE("adaptive quadrature") {
  CHECK(integrate_adaptive([](double x) { return std::exp(x); }, 0, 1) == doctest::Approx(std::exp(1.0) - 1).epsilon(1e-13));
  CHECK(integrate_adaptive([](double x) { return std::sqrt(x); }, 0, 1, 1e-10) == doctest::Approx(2.0 / 3).epsilon(1e-9));
}

TEST_CASE("bump support and normalization") {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (double eps : {0.5, 0.01, 3.0}) {
      Bump b = bump_build(eps, n);
      CHECK(b(eps / 8 * 0.999) == 0.0);
      CHECK(b(0.75 * eps * 1.001) == 0.0);
      CHECK(b(0.3 * eps) == doctest::Approx(b.normalization()));
      auto radial = [&](double r) { return b(r) * std::pow(r, double(n - 1)); };
      double total = unit_sphere_area(n) * simpson(radial, 0.0, eps, 200000);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
  Bump b3 = bump_build(0.5, 3);
  double total = 4 * std::numbers::pi * simpson([&](double r) { return b3(r) * r * r; }, 0, 0.5, 400000);
  CHECK(std::abs(total - 1.0) < 1e-6);
  CHECK_THROWS(bump_build(0.0, 2));
}

TEST_CASE("signed count on the corpus") {
  for (const auto& c : corpus()) {
    PolyMap f = PolyMap::parse(c.comps);
    auto r = degree_signed_count(f, IntervalBox::cube(f.n(), c.r), c.z);
    CHECK_MESSAGE(r.value == c.expected, c.label);
    CHECK(r.certified);
    CHECK(r.clearance > 0);
  }
  auto sq = degree_signed_count(PolyMap::parse({"x1^2"}), IntervalBox::cube(1, 2.0), std::vector<Rational>{1});
  CHECK(sq.positive_roots == 1);
  CHECK(sq.negative_roots == 1);
}

TEST_CASE("integral method agrees with signed count") {
  for (const auto& c : corpus()) {
    PolyMap f = PolyMap::parse(c.comps);
    IntervalBox box = IntervalBox::cube(f.n(), c.r);
    auto cnt = degree_signed_count(f, box, c.z);
    auto in = degree_integral(f, box, c.z);
    CHECK_MESSAGE(in.value == cnt.value, c.label);
    CHECK_MESSAGE(std::abs(in.raw - double(in.value)) < 0.25, c.label);
    CHECK(in.support_hits >= 1000);
  }
  for (std::size_t n = 1; n <= 3; ++n) {
    auto r = degree_integral(PolyMap::identity(n), IntervalBox::cube(n, 1.0), zeros(n));
    CHECK(r.value == 1);
    CHECK(r.raw == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("integral is reproducible for a fixed seed") {
  PolyMap f = PolyMap::parse({"x1 + x2^3", "x2"});
  QuadratureConfig q;
  auto a = degree_integral(f, IntervalBox::cube(2, 2.0), zeros(2), q);
  auto b = degree_integral(f, IntervalBox::cube(2, 2.0), zeros(2), q);
  q.workers = 3;
  auto c = degree_integral(f, IntervalBox::cube(2, 2.0), zeros(2), q);
  CHECK(a.raw == b.raw);
  CHECK(a.raw == c.raw);
  CHECK(a.samples == c.samples);
}

TEST_CASE("preconditions") {
  try {
    degree_signed_count(PolyMap::identity(1), IntervalBox::cube(1, 1.0), std::vector<Rational>{1});
    FAIL("expected a boundary failure");
  } catch (const DegreeError& e) {
    CHECK(e.kind() == DegreeErrorKind::boundary_precondition);
  }
  try {
    degree_signed_count(PolyMap::parse({"x1^2"}), IntervalBox::cube(1, 1.0), zeros(1));
    FAIL("expected a singular failure");
  } catch (const DegreeError& e) {
    CHECK(e.kind() == DegreeErrorKind::singular_precondition);
  }
  CHECK_THROWS_AS(degree_integral(PolyMap::identity(1), IntervalBox::cube(1, 1.0), std::vector<Rational>{1}),
                  DegreeError);
}

TEST_CASE("identity: interior and exterior targets") {
  PolyMap id = PolyMap::identity(2);
  for (auto z : {std::vector<Rational>{Rational(1, 2), Rational(-1, 3)}, std::vector<Rational>{0, Rational(9, 10)}}) {
    CHECK(degree_signed_count(id, IntervalBox::cube(2, 1.0), z).value == 1);
  }
  CHECK(degree_signed_count(id, IntervalBox::cube(2, 1.0), std::vector<Rational>{3, 0}).value == 0);
}

TEST_CASE("translation invariance") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Poly> c{random_poly(rng, 2, 3, 4), random_poly(rng, 2, 3, 4)};
    PolyMap f(c);
    auto z = random_point(rng, 2, 1, 2);
    IntervalBox box = IntervalBox::cube(2, 1.5);
    SolverConfig cfg;
    cfg.max_boxes = 200'000;
    std::optional<long> a, b;
    try {
      a = degree_signed_count(f, box, z, cfg).value;
    } catch (const DegreeError&) {
    }
    try {
      b = degree_signed_count(f.shifted(z), box, zeros(2), cfg).value;
    } catch (const DegreeError&) {
    }
    CHECK(a == b);
  }
}

TEST_CASE("keller maps: |degree| equals fiber size, box monotonicity") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    PolyMap f = random_composed_triangular(rng, 2, 2, 2);
    auto z = f.evaluate(random_point(rng, 2, 1, 2));
    auto small = degree_signed_count(f, IntervalBox::cube(2, 2.0), z);
    CHECK(std::labs(small.value) == small.positive_roots + small.negative_roots);
    CHECK(std::labs(small.value) == 1);
    auto big = degree_signed_count(f, IntervalBox::cube(2, 4.0), z);
    CHECK(big.value == small.value);
  }
}

TEST_CASE("homotopy constancy") {
  std::vector<std::string> extra{"t"};
  std::vector<Poly> fam{parse_poly("x1 + t*x1^3", 1, extra)};
  std::vector<Rational> grid{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1};
  auto rep = homotopy_constancy_check(fam, IntervalBox::cube(1, 2.0), zeros(1), grid);
  CHECK(rep.boundary_certified);
  CHECK(rep.constant);
  REQUIRE(rep.degrees.size() == 5);
  for (const auto& d : rep.degrees) CHECK(d == 1);

  std::vector<Poly> flat{parse_poly("x1^3 - 3*x1", 1, extra)};
  auto c = homotopy_constancy_check(flat, IntervalBox::cube(1, 3.0), zeros(1), grid);
  CHECK(c.boundary_certified);
  CHECK(c.constant);

  // x - 3t: the root leaves [-2, 2] and crosses the boundary at t = 2/3.
  std::vector<Poly> exits{parse_poly("x1 - 3*t", 1, extra)};
  auto e = homotopy_constancy_check(exits, IntervalBox::cube(1, 2.0), zeros(1), grid);
  CHECK_FALSE(e.boundary_certified);
  CHECK_FALSE(e.constant);
  CHECK(e.degrees.empty());

  std::vector<Rational> outside{0, 2};
  CHECK_THROWS(homotopy_constancy_check(fam, IntervalBox::cube(1, 2.0), zeros(1), outside));
}

TEST_CASE("component constancy along a path") {
  auto id = component_constancy_check(PolyMap::identity(2), IntervalBox::cube(2, 1.0),
                                      {{0, 0}, {Rational(1, 2), 0}});
  CHECK(id.path_certified);
  CHECK(id.constant);
  for (const auto& d : id.degrees) CHECK(d == 1);

  PolyMap sq = PolyMap::parse({"x1^2"});
  auto up = component_constancy_check(sq, IntervalBox::cube(1, 2.0), {{1}, {2}});
  CHECK(up.path_certified);
  for (const auto& d : up.degrees) CHECK(d == 0);
  // F(boundary) = {4}; the path 1 -> -1 passes through 0, a singular value,
  // but the vertex degrees are both 0.
  auto down = component_constancy_check(sq, IntervalBox::cube(1, 2.0), {{1}, {-1}});
  CHECK(down.path_certified);
  REQUIRE(down.degrees.size() == 2);
  CHECK(down.degrees[0] == 0);
  CHECK(down.degrees[1] == 0);

  auto cross = component_constancy_check(sq, IntervalBox::cube(1, 2.0), {{1}, {5}});
  CHECK_FALSE(cross.path_certified);
  CHECK(cross.failed_segment == std::size_t{0});
}
