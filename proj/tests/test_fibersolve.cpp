#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "degreelab/fibersolve.hpp"
#include "support.hpp"

using namespace degreelab::fibersolve;
using degreelab::mapforms::PolyMap;
using degreelab::polycore::Interval;
using degreelab::polycore::IntervalBox;
using degreelab::polycore::Poly;
using degreelab::polycore::Rational;
using namespace testsupport;

namespace {

std::vector<Rational> zeros(std::size_t n) { return std::vector<Rational>(n, Rational(0)); }

std::string fingerprint(const FiberResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << to_string(r.status) << ' ' << r.stats.boxes_processed << ' ' << r.stats.max_depth_reached << '\n';
  for (const auto& root : r.roots) {
    for (const auto& s : root.isolator.sides()) os << s.lo << ' ' << s.hi << ' ';
    os << root.jac_sign << ' ' << root.refinement_width << '\n';
  }
  return os.str();
}

bool inside_some_isolator(const FiberResult& r, const std::vector<double>& x) {
  for (const auto& root : r.roots) {
    IntervalBox grown = root.isolator;
    std::vector<Interval> s(grown.sides().begin(), grown.sides().end());
    for (auto& i : s) i = Interval(i.lo - 1e-7, i.hi + 1e-7);
    if (IntervalBox(s).contains(x)) return true;
  }
  return false;
}

// Plain Newton from every node of a grid; converged points are roots the
// solver must have found.
std::vector<std::vector<double>> grid_newton_roots(const PolyMap& f, const std::vector<Rational>& z, double r, int m) {
  std::size_t n = f.n();
  std::vector<std::vector<double>> found;
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = -r + 2 * r * (idx[i] + 0.5) / m;
    for (int it = 0; it < 60; ++it) {
      auto v = f.evaluate(std::span<const double>(x));
      std::vector<double> j(n * n);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) j[a * n + b] = f.jacobian()[a][b].evaluate(std::span<const double>(x));
      for (std::size_t a = 0; a < n; ++a) v[a] -= z[a].get_d();
      std::vector<double> dx(n);
      if (n == 1) {
        if (j[0] == 0) break;
        dx[0] = v[0] / j[0];
      } else {
        double det = j[0] * j[3] - j[1] * j[2];
        if (det == 0) break;
        dx[0] = (j[3] * v[0] - j[1] * v[1]) / det;
        dx[1] = (-j[2] * v[0] + j[0] * v[1]) / det;
      }
      for (std::size_t a = 0; a < n; ++a) x[a] -= dx[a];
    }
    auto v = f.evaluate(std::span<const double>(x));
    double res = 0;
    bool in = true;
    for (std::size_t a = 0; a < n; ++a) {
      res = std::max(res, std::abs(v[a] - z[a].get_d()));
      in = in && std::abs(x[a]) < r - 1e-6;
    }
    if (res < 1e-10 && in) found.push_back(x);
    std::size_t k = 0;
    while (k < n && ++idx[k] == m) idx[k++] = 0;
    if (k == n) break;
  }
  return found;
}

}  // namespace

TEST_CASE("triangular map: single root at origin") {
  PolyMap f = PolyMap::parse({"x1 + x2^3", "x2"});
  auto r = solve_fiber(f, zeros(2), IntervalBox::cube(2, 2.0));
  CHECK(r.status == FiberStatus::complete);
  REQUIRE(r.count() == 1);
  CHECK(r.roots[0].jac_sign == 1);
  CHECK(r.roots[0].isolator.contains(std::vector<double>{0, 0}));
}

TEST_CASE("x^2 = 1") {
  PolyMap f = PolyMap::parse({"x1^2"});
  std::vector<Rational> one{1};
  auto r = solve_fiber(f, one, IntervalBox::cube(1, 2.0));
  CHECK(r.status == FiberStatus::complete);
  REQUIRE(r.count() == 2);
  CHECK(r.roots[0].midpoint()[0] == doctest::Approx(-1).epsilon(1e-9));
  CHECK(r.roots[0].jac_sign == -1);
  CHECK(r.roots[1].midpoint()[0] == doctest::Approx(1).epsilon(1e-9));
  CHECK(r.roots[1].jac_sign == 1);
}

TEST_CASE("x^3 - 3x = 0") {
  PolyMap f = PolyMap::parse({"x1^3 - 3*x1"});
  auto r = solve_fiber(f, zeros(1), IntervalBox::cube(1, 3.0));
  CHECK(r.status == FiberStatus::complete);
  REQUIRE(r.count() == 3);
  const double s3 = std::sqrt(3.0);
  double expect[3] = {-s3, 0, s3};
  for (int k = 0; k < 3; ++k) {
    CHECK(r.roots[k].midpoint()[0] == doctest::Approx(expect[k]).epsilon(1e-9));
    // sign of 3x^2 - 3 at the root
    int oracle = 3 * expect[k] * expect[k] - 3 > 0 ? 1 : -1;
    CHECK(r.roots[k].jac_sign == oracle);
  }
}

TEST_CASE("double root is reported as singular") {
  auto r = solve_fiber(PolyMap::parse({"x1^2"}), zeros(1), IntervalBox::cube(1, 2.0));
  CHECK(r.status == FiberStatus::singular_suspect);
  CHECK(r.singular_suspect);
}

TEST_CASE("root on the boundary is flagged") {
  std::vector<Rational> two{2};
  auto r = solve_fiber(PolyMap::parse({"x1"}), two, IntervalBox::cube(1, 2.0));
  CHECK(r.status == FiberStatus::boundary_contact);
}

TEST_CASE("roots lying on bisection planes are found once") {
  // Roots at 0 and +-1 sit exactly on midpoints of the first few bisections.
  auto r = solve_fiber(PolyMap::parse({"x1^3 - x1"}), zeros(1), IntervalBox::cube(1, 2.0));
  CHECK(r.status == FiberStatus::complete);
  CHECK(r.count() == 3);
  auto q = solve_fiber(PolyMap::parse({"x1^2 - x2^2", "x1*x2"}), std::vector<Rational>{1, 0},
                       IntervalBox::cube(2, 2.0));
  CHECK(q.status == FiberStatus::complete);
  CHECK(q.count() == 2);
}

TEST_CASE("bezout bound") {
  CHECK(bezout_bound(PolyMap::parse({"x1 + x2^3", "x2"})) == 3);
  PolyMap sq = PolyMap::parse({"x1^2", "x2^2"});
  CHECK(bezout_bound(sq) == 4);
  auto r = solve_fiber(sq, std::vector<Rational>{1, 1}, IntervalBox::cube(2, 2.0));
  CHECK(r.status == FiberStatus::complete);
  CHECK(r.count() == 4);
  PolyMap keller = PolyMap::parse({"x1 + (x2 - x3)^3", "x2 + (x2 - x3)^3", "x3 + (x2 - x3)^3"});
  CHECK(degreelab::mapforms::keller_check(keller).kind == degreelab::mapforms::KellerKind::nonzero_constant);
  CHECK(bezout_bound(keller) == 27);
  PolyMap cubic = PolyMap::parse({"x1 + x2^3", "x2 + x3^3", "x3 + x1^3"});
  CHECK(bezout_bound(cubic) == 27);
  CHECK(bezout_bound(PolyMap::parse({"x1", "2"})) == 1);
  CHECK_THROWS(bezout_bound(PolyMap::parse({"x1", "0"})));
}

TEST_CASE("boundary clearance") {
  auto id = boundary_clearance(PolyMap::identity(2), zeros(2), IntervalBox::cube(2, 1.0));
  CHECK(id.ok);
  CHECK(id.m <= 1.0);
  CHECK(id.m >= 0.9);
  PolyMap f = PolyMap::parse({"x1 + x2^3", "x2"});
  auto c = boundary_clearance(f, zeros(2), IntervalBox::cube(2, 2.0));
  CHECK(c.ok);
  CHECK(c.m > 0);
  // Dense boundary sampling gives an upper estimate of the true minimum.
  double sampled = 1e300;
  for (int k = 0; k <= 4000; ++k) {
    double s = -2 + 4.0 * k / 4000;
    for (auto p : {std::vector<double>{s, -2}, std::vector<double>{s, 2}, std::vector<double>{-2, s},
                   std::vector<double>{2, s}}) {
      auto v = f.evaluate(std::span<const double>(p));
      sampled = std::min(sampled, std::hypot(v[0], v[1]));
    }
  }
  CHECK(c.m <= sampled);
  // z = F(2, 0) lies on the image of the boundary.
  auto bad = boundary_clearance(f, std::vector<Rational>{2, 0}, IntervalBox::cube(2, 2.0));
  CHECK_FALSE(bad.ok);
}

TEST_CASE("soundness: refined midpoints have tiny residuals") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Poly> c{random_poly(rng, 2, 3, 4), random_poly(rng, 2, 3, 4)};
    PolyMap f(c);
    auto z = random_point(rng, 2, 2, 2);
    SolverConfig cfg;
    cfg.max_boxes = 200'000;
    auto r = solve_fiber(f, z, IntervalBox::cube(2, 2.0), cfg);
    for (const auto& root : r.roots) {
      auto mid = root.midpoint();
      auto v = f.evaluate(std::span<const double>(mid));
      for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(v[i] - z[i].get_d()) <= 1e-8);
    }
    bool bezout_ok = true;
    try {
      bezout_ok = r.count() <= bezout_bound(f);
    } catch (const std::invalid_argument&) {
    }
    CHECK(bezout_ok);
  }
}

TEST_CASE("completeness against a grid Newton oracle") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed + 100);
    std::size_t n = 1 + seed % 2;
    std::vector<Poly> c;
    for (std::size_t i = 0; i < n; ++i) c.push_back(random_poly(rng, n, 4, 5));
    PolyMap f(c);
    auto z = random_point(rng, n, 1, 2);
    SolverConfig cfg;
    cfg.max_boxes = 200'000;
    auto r = solve_fiber(f, z, IntervalBox::cube(n, 2.0), cfg);
    if (r.status != FiberStatus::complete) continue;
    ++checked;
    for (const auto& x : grid_newton_roots(f, z, 2.0, n == 1 ? 400 : 40)) {
      CHECK_MESSAGE(inside_some_isolator(r, x), "seed " << seed);
    }
  }
  CHECK(checked >= 10);
}

TEST_CASE("keller maps have uniform root signs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    PolyMap f = random_composed_triangular(rng, 2, 2, 2);
    PolyMap neg(std::vector<Poly>{-f[0], f[1]});
    auto z = f.evaluate(random_point(rng, 2, 1, 2));
    auto rp = solve_fiber(f, z, IntervalBox::cube(2, 4.0));
    auto zn = neg.evaluate(random_point(rng, 2, 1, 2));
    auto rn = solve_fiber(neg, zn, IntervalBox::cube(2, 4.0));
    for (const auto& root : rp.roots) CHECK(root.jac_sign == 1);
    for (const auto& root : rn.roots) CHECK(root.jac_sign == -1);
  }
}

TEST_CASE("determinism across worker counts") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::mt19937_64 rng(seed);
    std::vector<Poly> c{random_poly(rng, 2, 4, 5), random_poly(rng, 2, 4, 5)};
    PolyMap f(c);
    auto z = random_point(rng, 2, 1, 2);
    SolverConfig one, many;
    one.max_boxes = many.max_boxes = 100'000;
    many.workers = 4;
    auto a = solve_fiber(f, z, IntervalBox::cube(2, 2.0), one);
    auto b = solve_fiber(f, z, IntervalBox::cube(2, 2.0), one);
    auto m = solve_fiber(f, z, IntervalBox::cube(2, 2.0), many);
    CHECK(fingerprint(a) == fingerprint(b));
    CHECK(fingerprint(a) == fingerprint(m));
  }
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  cfg.target_width = -1;
  CHECK_THROWS(cfg.validate());
  CHECK_THROWS(solve_fiber(PolyMap::identity(2), zeros(1), IntervalBox::cube(2, 1.0)));
}
