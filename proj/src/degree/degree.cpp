#include "degreelab/degree.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "degreelab/parallel.hpp"

namespace degreelab::degree {

using fibersolve::FiberStatus;
using polycore::CompiledPoly;
using polycore::Interval;

std::string to_string(DegreeErrorKind k) {
  switch (k) {
    case DegreeErrorKind::boundary_precondition: return "precondition_violation(boundary)";
    case DegreeErrorKind::singular_precondition: return "precondition_violation(singular)";
    case DegreeErrorKind::incomplete: return "incomplete";
    case DegreeErrorKind::rounding_ambiguous: return "rounding_ambiguous";
    case DegreeErrorKind::budget_exceeded: return "budget_exceeded";
  }
  return "?";
}

std::string to_string(Method m) { return m == Method::signed_count ? "signed_count" : "integral"; }

DegreeResult degree_signed_count(const PolyMap& f, const IntervalBox& box, std::span<const Rational> z,
                                 const SolverConfig& cfg) {
  Clearance clear = fibersolve::boundary_clearance(f, z, box, cfg);
  if (!clear.ok) {
    throw DegreeError(DegreeErrorKind::boundary_precondition,
                      "target may lie on the image of the boundary: " + clear.diagnostic);
  }
  FiberResult fiber = fibersolve::solve_fiber(f, z, box, cfg);
  switch (fiber.status) {
    case FiberStatus::singular_suspect:
      throw DegreeError(DegreeErrorKind::singular_precondition, "a solution with vanishing Jacobian is suspected");
    case FiberStatus::boundary_contact:
      throw DegreeError(DegreeErrorKind::boundary_precondition, "a solution touches the boundary");
    case FiberStatus::depth_exceeded:
      throw DegreeError(DegreeErrorKind::incomplete, "fiber enumeration did not complete");
    case FiberStatus::complete: break;
  }
  if (fiber.count() > fibersolve::bezout_bound(f)) {
    throw std::logic_error("certified root count exceeds the Bezout bound");
  }
  DegreeResult r;
  r.method = Method::signed_count;
  r.certified = true;
  r.clearance = clear.m;
  r.positive_roots = fiber.positive();
  r.negative_roots = fiber.negative();
  r.value = r.positive_roots - r.negative_roots;
  r.raw = static_cast<double>(r.value);
  return r;
}

namespace {

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  double a = std::exp(-1.0 / s);
  double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

}  // namespace

double Bump::profile(double r) const {
  const double r0 = inner_radius(), r1 = outer_radius();
  return smooth_step((r - 0.5 * r0) / (0.5 * r0)) * smooth_step((r1 - r) / (0.5 * (r1 - r0)));
}

double unit_sphere_area(std::size_t n) {
  double h = 0.5 * static_cast<double>(n);
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double gk15(const std::function<double(double)>& f, double a, double b, double& err) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double kron = fc * kWgk[7], gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  err = std::fabs((kron - gauss) * h);
  return kron * h;
}

double adaptive(const std::function<double(double)>& f, double a, double b, double tol, int depth) {
  double err = 0.0;
  double v = gk15(f, a, b, err);
  if (err <= tol || depth >= 40) return v;
  double m = 0.5 * (a + b);
  return adaptive(f, a, m, 0.5 * tol, depth + 1) + adaptive(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  return adaptive(f, a, b, tol, 0);
}

Bump bump_build(double epsilon, std::size_t n) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw std::invalid_argument("bump_build: epsilon must be positive");
  if (n == 0) throw std::invalid_argument("bump_build: dimension must be positive");
  Bump b;
  b.epsilon_ = epsilon;
  b.dims_ = n;
  b.norm_ = 1.0;
  auto radial = [&](double r) { return b.profile(r) * std::pow(r, static_cast<double>(n - 1)); };
  const double r0 = b.inner_radius(), r1 = b.outer_radius();
  // Split at the kinks of the plateau so each piece is smooth.
  const double cuts[4] = {0.5 * r0, r0, 0.5 * (r0 + r1), r1};
  double scale = std::pow(r1, static_cast<double>(n));
  double total = 0.0;
  for (int k = 0; k < 3; ++k) total += integrate_adaptive(radial, cuts[k], cuts[k + 1], 1e-14 * scale);
  b.norm_ = 1.0 / (unit_sphere_area(n) * total);
  return b;
}

namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace

DegreeResult degree_integral(const PolyMap& f, const IntervalBox& box, std::span<const Rational> z,
                             const QuadratureConfig& quad, const SolverConfig& cfg) {
  const std::size_t n = f.n();
  if (box.dims() != n) throw std::invalid_argument("degree_integral: box dimension mismatch");
  if (n > std::size(kPrimes)) throw std::invalid_argument("degree_integral: dimension too large");
  if (quad.initial_samples == 0 || quad.max_samples < quad.initial_samples) {
    throw std::invalid_argument("degree_integral: bad sample budget");
  }
  Clearance clear = fibersolve::boundary_clearance(f, z, box, cfg);
  if (!clear.ok) {
    throw DegreeError(DegreeErrorKind::boundary_precondition,
                      "target may lie on the image of the boundary: " + clear.diagnostic);
  }
  const double eps = 0.5 * clear.m;
  const Bump bump = bump_build(eps, n);
  const double r_in = 0.5 * bump.inner_radius(), r_out = bump.outer_radius();

  PolyMap shifted = f.shifted(z);
  std::vector<CompiledPoly> g;
  for (const auto& c : shifted.components()) g.emplace_back(c);
  const CompiledPoly det(f.jacobian_det());

  std::mt19937_64 rng(quad.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> shift(n);
  for (auto& s : shift) s = unit(rng);

  double volume = 1.0;
  for (std::size_t i = 0; i < n; ++i) volume *= box[i].width();

  constexpr std::size_t kChunk = 4096;
  struct Partial {
    double sum = 0.0;
    std::size_t hits = 0;
  };
  auto run_chunk = [&](std::size_t begin, std::size_t end) {
    Partial p;
    std::vector<double> x(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        double u = radical_inverse(i + 1, kPrimes[k]) + shift[k];
        u -= std::floor(u);
        x[k] = box[k].lo + u * box[k].width();
      }
      double r2 = 0.0;
      for (const auto& gi : g) {
        double v = gi.evaluate(x);
        r2 += v * v;
      }
      double r = std::sqrt(r2);
      if (!(r > r_in && r < r_out)) continue;
      ++p.hits;
      p.sum += bump(r) * det.evaluate(x);
    }
    return p;
  };

  double total = 0.0;
  std::size_t hits = 0, done = 0;
  std::optional<double> previous;
  std::size_t target = quad.initial_samples;
  DegreeResult res;
  res.method = Method::integral;
  res.certified = false;
  res.clearance = clear.m;
  res.epsilon = eps;
  for (;;) {
    const std::size_t chunks = (target - done + kChunk - 1) / kChunk;
    std::vector<Partial> parts(chunks);
    detail::parallel_for(chunks, quad.workers, [&](std::size_t c) {
      std::size_t b = done + c * kChunk;
      parts[c] = run_chunk(b, std::min(target, b + kChunk));
    });
    for (const auto& p : parts) {
      total += p.sum;
      hits += p.hits;
    }
    done = target;
    double estimate = volume * total / static_cast<double>(done);
    bool converged = previous && hits >= quad.min_support_hits &&
                     std::fabs(estimate - *previous) < quad.convergence_tol;
    previous = estimate;
    if (converged) break;
    if (done >= quad.max_samples) {
      res.raw = estimate;
      res.samples = done;
      res.support_hits = hits;
      std::ostringstream os;
      os << "integral did not settle within " << done << " samples (last estimate " << estimate << ")";
      throw DegreeError(DegreeErrorKind::budget_exceeded, os.str());
    }
    target = std::min(quad.max_samples, 2 * done);
  }
  res.raw = *previous;
  res.samples = done;
  res.support_hits = hits;
  res.value = std::lround(res.raw);
  if (std::fabs(res.raw - static_cast<double>(res.value)) >= 0.25) {
    std::ostringstream os;
    os << "integral estimate " << res.raw << " is not within 0.25 of an integer";
    throw DegreeError(DegreeErrorKind::rounding_ambiguous, os.str());
  }
  return res;
}

HomotopyReport homotopy_constancy_check(const std::vector<Poly>& family, const IntervalBox& box,
                                        std::span<const Rational> z, std::span<const Rational> t_grid,
                                        const SolverConfig& cfg) {
  const std::size_t n = box.dims();
  if (family.size() != n || z.size() != n) throw std::invalid_argument("homotopy: dimension mismatch");
  for (const auto& p : family) {
    if (p.nvars() != n + 1) throw std::invalid_argument("homotopy: family must have n + 1 variables");
  }
  for (const auto& t : t_grid) {
    if (t < 0 || t > 1) throw std::invalid_argument("homotopy: t values must lie in [0, 1]");
  }
  HomotopyReport rep;
  rep.t_values.assign(t_grid.begin(), t_grid.end());

  std::vector<Poly> shifted = family;
  for (std::size_t i = 0; i < n; ++i) shifted[i] -= Poly::constant(n + 1, z[i]);
  Clearance clear = fibersolve::family_boundary_clearance(shifted, box, {Interval(0.0, 1.0)}, cfg);
  rep.clearance = clear.m;
  if (!clear.ok) {
    rep.diagnostic = "boundary certification over faces x [0, 1] failed: " + clear.diagnostic;
    return rep;
  }
  rep.boundary_certified = true;

  std::vector<std::optional<long>> degrees(t_grid.size());
  std::vector<std::string> errors(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    std::vector<Poly> comps;
    for (const auto& p : family) comps.push_back(p.fix_last(t_grid[k]));
    try {
      degrees[k] = degree_signed_count(PolyMap(std::move(comps)), box, z, cfg).value;
    } catch (const DegreeError& e) {
      errors[k] = to_string(e.kind()) + ": " + e.what();
    }
  }
  rep.degrees = std::move(degrees);
  rep.errors = std::move(errors);
  rep.constant = !rep.degrees.empty() &&
                 std::all_of(rep.degrees.begin(), rep.degrees.end(),
                             [&](const auto& d) { return d && *d == *rep.degrees.front(); });
  return rep;
}

PathReport component_constancy_check(const PolyMap& f, const IntervalBox& box,
                                     const std::vector<std::vector<Rational>>& path, const SolverConfig& cfg) {
  const std::size_t n = f.n();
  if (path.empty()) throw std::invalid_argument("component_constancy_check: empty path");
  for (const auto& v : path) {
    if (v.size() != n) throw std::invalid_argument("component_constancy_check: vertex dimension mismatch");
  }
  PathReport rep;
  rep.path_certified = true;
  if (path.size() == 1) {
    rep.path_certified = fibersolve::boundary_clearance(f, path[0], box, cfg).ok;
    if (!rep.path_certified) rep.failed_segment = 0;
  }
  for (std::size_t s = 0; s + 1 < path.size() && rep.path_certified; ++s) {
    // G(x, s) = F(x) - a - s (b - a)
    std::vector<Poly> g;
    for (std::size_t i = 0; i < n; ++i) {
      Poly gi = f[i].extend(1);
      gi -= Poly::constant(n + 1, path[s][i]);
      gi -= Poly::variable(n + 1, n) * Rational(path[s + 1][i] - path[s][i]);
      g.push_back(std::move(gi));
    }
    if (!fibersolve::family_boundary_clearance(g, box, {Interval(0.0, 1.0)}, cfg).ok) {
      rep.path_certified = false;
      rep.failed_segment = s;
    }
  }
  for (const auto& v : path) {
    try {
      rep.degrees.push_back(degree_signed_count(f, box, v, cfg).value);
      rep.errors.emplace_back();
    } catch (const DegreeError& e) {
      rep.degrees.emplace_back();
      rep.errors.push_back(to_string(e.kind()) + ": " + e.what());
    }
  }
  rep.constant = rep.path_certified &&
                 std::all_of(rep.degrees.begin(), rep.degrees.end(),
                             [&](const auto& d) { return d && *d == *rep.degrees.front(); });
  return rep;
}

}  // namespace degreelab::degree
