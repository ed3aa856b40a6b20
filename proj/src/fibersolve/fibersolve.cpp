#include "degreelab/fibersolve.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "degreelab/parallel.hpp"

namespace degreelab::fibersolve {

using polycore::CompiledPoly;
using polycore::Poly;

void SolverConfig::validate() const {
  if (max_depth == 0 || newton_max_iters == 0 || max_boxes == 0 || workers == 0) {
    throw std::invalid_argument("SolverConfig: counts must be positive");
  }
  if (!(target_width > 0) || !(boundary_margin > 0)) {
    throw std::invalid_argument("SolverConfig: widths must be positive");
  }
}

std::string to_string(FiberStatus s) {
  switch (s) {
    case FiberStatus::complete: return "complete";
    case FiberStatus::boundary_contact: return "boundary_contact";
    case FiberStatus::depth_exceeded: return "depth_exceeded";
    case FiberStatus::singular_suspect: return "singular_suspect";
  }
  return "?";
}

int FiberResult::positive() const {
  return static_cast<int>(std::count_if(roots.begin(), roots.end(), [](const auto& r) { return r.jac_sign > 0; }));
}

int FiberResult::negative() const {
  return static_cast<int>(std::count_if(roots.begin(), roots.end(), [](const auto& r) { return r.jac_sign < 0; }));
}

CompiledSystem::CompiledSystem(const PolyMap& f, std::span<const Rational> z)
    : det_exact_(f.jacobian_det()) {
  if (z.size() != f.n()) throw std::invalid_argument("CompiledSystem: target dimension mismatch");
  const std::size_t n = f.n();
  PolyMap shifted = f.shifted(z);
  for (const auto& c : shifted.components()) g_.emplace_back(c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) jac_.emplace_back(f.jacobian()[i][k]);
  }
  det_ = CompiledPoly(det_exact_);
  if (det_exact_.is_constant() && !det_exact_.is_zero()) {
    constant_det_sign_ = det_exact_.constant_term() > 0 ? 1 : -1;
  }
}

std::vector<double> CompiledSystem::residual(std::span<const double> x) const {
  std::vector<double> r(g_.size());
  for (std::size_t i = 0; i < g_.size(); ++i) r[i] = g_[i].evaluate(x);
  return r;
}

std::vector<double> CompiledSystem::jacobian(std::span<const double> x) const {
  std::vector<double> j(jac_.size());
  for (std::size_t i = 0; i < jac_.size(); ++i) j[i] = jac_[i].evaluate(x);
  return j;
}

std::vector<Interval> CompiledSystem::residual(std::span<const Interval> x) const {
  std::vector<Interval> r(g_.size());
  for (std::size_t i = 0; i < g_.size(); ++i) r[i] = g_[i].evaluate(x);
  return r;
}

std::vector<Interval> CompiledSystem::jacobian(std::span<const Interval> x) const {
  std::vector<Interval> j(jac_.size());
  for (std::size_t i = 0; i < jac_.size(); ++i) j[i] = jac_[i].evaluate(x);
  return j;
}

int CompiledSystem::det_sign(std::span<const Rational> x) const {
  if (constant_det_sign_ != 0) return constant_det_sign_;
  return sgn(det_exact_.evaluate(x));
}

bool invert(std::vector<double>& a, std::size_t n) {
  std::vector<double> inv(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = 1.0;
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::fabs(v));
  if (!(scale > 0) || !std::isfinite(scale)) return false;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    }
    double p = a[piv * n + col];
    if (std::fabs(p) <= 1e-14 * scale) return false;
    if (piv != col) {
      for (std::size_t k = 0; k < n; ++k) {
        std::swap(a[piv * n + k], a[col * n + k]);
        std::swap(inv[piv * n + k], inv[col * n + k]);
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      a[col * n + k] /= p;
      inv[col * n + k] /= p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      double factor = a[r * n + col];
      if (factor == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        a[r * n + k] -= factor * a[col * n + k];
        inv[r * n + k] -= factor * inv[col * n + k];
      }
    }
  }
  for (double v : inv) {
    if (!std::isfinite(v)) return false;
  }
  a = std::move(inv);
  return true;
}

std::optional<std::vector<double>> CompiledSystem::newton(std::vector<double> x, unsigned iters) const {
  const std::size_t n = g_.size();
  for (unsigned it = 0; it < iters; ++it) {
    std::vector<double> r = residual(x);
    std::vector<double> j = jacobian(x);
    if (!invert(j, n)) return std::nullopt;
    double step = 0.0, size = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = 0.0;
      for (std::size_t k = 0; k < n; ++k) d += j[i * n + k] * r[k];
      x[i] -= d;
      step = std::max(step, std::fabs(d));
      size = std::max(size, std::fabs(x[i]));
    }
    for (double v : x) {
      if (!std::isfinite(v)) return std::nullopt;
    }
    if (step <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, size)) break;
  }
  return x;
}

KrawczykStep krawczyk(const CompiledSystem& sys, const IntervalBox& x) {
  const std::size_t n = sys.n();
  KrawczykStep out;
  std::vector<double> y = x.midpoint();
  for (double v : y) {
    if (!std::isfinite(v)) return out;
  }
  std::vector<double> c = sys.jacobian(y);
  if (!invert(c, n)) return out;

  std::vector<Interval> ybox(y.begin(), y.end());
  std::vector<Interval> gy = sys.residual(ybox);
  std::vector<Interval> jx = sys.jacobian(x.sides());

  std::vector<Interval> k(n);
  for (std::size_t i = 0; i < n; ++i) {
    Interval acc(y[i]);
    for (std::size_t j = 0; j < n; ++j) acc = acc - Interval(c[i * n + j]) * gy[j];
    for (std::size_t j = 0; j < n; ++j) {
      // (I - C J(X))_{ij}
      Interval m(i == j ? 1.0 : 0.0);
      for (std::size_t l = 0; l < n; ++l) m = m - Interval(c[i * n + l]) * jx[l * n + j];
      acc = acc + m * (x[j] - Interval(y[j]));
    }
    k[i] = acc;
  }

  bool inside = true;
  std::vector<Interval> cut(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!intersect(k[i], x[i], cut[i])) {
      out.outcome = KrawczykOutcome::excluded;
      return out;
    }
    inside = inside && k[i].strictly_inside(x[i]);
  }
  out.outcome = inside ? KrawczykOutcome::contained : KrawczykOutcome::partial;
  out.image = IntervalBox(std::move(cut));
  return out;
}

unsigned long long bezout_bound(const PolyMap& f) {
  unsigned long long b = 1;
  for (const auto& c : f.components()) {
    if (c.is_zero()) throw std::invalid_argument("bezout_bound: zero component");
    b *= std::max(1u, c.total_degree());
  }
  return b;
}

namespace {

struct Node {
  IntervalBox box;
  unsigned depth = 0;
};

struct Candidate {
  IntervalBox certified;  // box on which Krawczyk proved uniqueness
  IntervalBox refined;
};

enum class Leaf { none, discarded, root, singular, unresolved };

struct Outcome {
  Leaf leaf = Leaf::none;
  std::optional<Candidate> root;
  std::vector<Node> children;
};

IntervalBox refine(const CompiledSystem& sys, IntervalBox x, const SolverConfig& cfg) {
  for (unsigned it = 0; it < cfg.newton_max_iters; ++it) {
    KrawczykStep k = krawczyk(sys, x);
    if (k.outcome != KrawczykOutcome::contained && k.outcome != KrawczykOutcome::partial) break;
    double before = x.max_width();
    x = std::move(k.image);
    double after = x.max_width();
    if (after < cfg.target_width && after >= 0.5 * before) break;
    if (after >= before) break;
  }
  return x;
}

// Box around a Newton estimate that also covers `x`, so a successful
// Krawczyk test on it accounts for every solution in `x`.
std::optional<IntervalBox> inflated_box(const CompiledSystem& sys, const IntervalBox& x) {
  auto est = sys.newton(x.midpoint(), 8);
  if (!est) return std::nullopt;
  const double w = x.max_width();
  std::vector<Interval> sides;
  for (std::size_t i = 0; i < x.dims(); ++i) {
    double v = (*est)[i];
    if (std::fabs(v - x[i].mid()) > 2.0 * w + 1e-300) return std::nullopt;
    double r = 0.5 * w + 1e-12 * std::max(1.0, std::fabs(v));
    sides.emplace_back(std::min(x[i].lo, v - r), std::max(x[i].hi, v + r));
  }
  return IntervalBox(std::move(sides));
}

Outcome process(const CompiledSystem& sys, const Node& node, const SolverConfig& cfg) {
  Outcome out;
  IntervalBox box = node.box;
  for (const auto& r : sys.residual(box.sides())) {
    if (!r.contains_zero()) {
      out.leaf = Leaf::discarded;
      return out;
    }
  }

  KrawczykStep k = krawczyk(sys, box);
  if (k.outcome == KrawczykOutcome::excluded) {
    out.leaf = Leaf::discarded;
    return out;
  }
  if (k.outcome == KrawczykOutcome::contained) {
    out.leaf = Leaf::root;
    out.root = Candidate{box, refine(sys, k.image, cfg)};
    return out;
  }
  if (k.outcome == KrawczykOutcome::partial) box = std::move(k.image);

  if (k.outcome != KrawczykOutcome::no_preconditioner) {
    if (auto wide = inflated_box(sys, box)) {
      KrawczykStep kw = krawczyk(sys, *wide);
      if (kw.outcome == KrawczykOutcome::contained) {
        out.leaf = Leaf::root;
        out.root = Candidate{*wide, refine(sys, kw.image, cfg)};
        return out;
      }
    }
  }

  if (box.max_width() < cfg.target_width) {
    out.leaf = sys.det(box.sides()).contains_zero() ? Leaf::singular : Leaf::unresolved;
    return out;
  }
  if (node.depth >= cfg.max_depth) {
    out.leaf = Leaf::unresolved;
    return out;
  }
  auto [a, b] = box.bisect(box.widest());
  out.children.push_back({std::move(a), node.depth + 1});
  out.children.push_back({std::move(b), node.depth + 1});
  return out;
}

bool same_root(const CompiledSystem& sys, const Candidate& a, const Candidate& b) {
  if (a.refined.subset_of(b.certified) || b.refined.subset_of(a.certified)) return true;
  if (!a.refined.intersects(b.refined)) return false;
  std::vector<Interval> hull;
  for (std::size_t i = 0; i < a.refined.dims(); ++i) {
    double lo = std::min(a.refined[i].lo, b.refined[i].lo);
    double hi = std::max(a.refined[i].hi, b.refined[i].hi);
    double pad = 0.5 * (hi - lo) + 1e-12 * std::max(1.0, std::fabs(lo));
    hull.emplace_back(lo - pad, hi + pad);
  }
  return krawczyk(sys, IntervalBox(std::move(hull))).outcome == KrawczykOutcome::contained;
}

std::vector<Rational> exact_point(const std::vector<double>& x) {
  std::vector<Rational> q;
  q.reserve(x.size());
  for (double v : x) q.emplace_back(v);
  return q;
}

}  // namespace

FiberResult solve_fiber(const PolyMap& f, std::span<const Rational> z, const IntervalBox& box,
                        const SolverConfig& cfg) {
  cfg.validate();
  if (box.dims() != f.n()) throw std::invalid_argument("solve_fiber: box dimension mismatch");
  const CompiledSystem sys(f, z);

  FiberResult result;
  std::vector<Candidate> found;
  std::vector<Node> frontier{{box, 0}};
  bool budget_hit = false;

  while (!frontier.empty()) {
    if (result.stats.boxes_processed + frontier.size() > cfg.max_boxes) {
      budget_hit = true;
      result.stats.unresolved_boxes += frontier.size();
      break;
    }
    std::vector<Outcome> outcomes(frontier.size());
    detail::parallel_for(frontier.size(), cfg.workers,
                         [&](std::size_t i) { outcomes[i] = process(sys, frontier[i], cfg); });
    std::vector<Node> next;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      auto& o = outcomes[i];
      ++result.stats.boxes_processed;
      result.stats.max_depth_reached = std::max(result.stats.max_depth_reached, frontier[i].depth);
      switch (o.leaf) {
        case Leaf::root: {
          bool dup = std::any_of(found.begin(), found.end(),
                                 [&](const Candidate& c) { return same_root(sys, c, *o.root); });
          if (!dup) found.push_back(std::move(*o.root));
          break;
        }
        case Leaf::singular: ++result.stats.singular_boxes; break;
        case Leaf::unresolved: ++result.stats.unresolved_boxes; break;
        default: break;
      }
      for (auto& c : o.children) next.push_back(std::move(c));
    }
    frontier = std::move(next);
  }

  const double margin = cfg.boundary_margin;
  for (auto& cand : found) {
    const IntervalBox& iso = cand.refined;
    bool outside = false, touches = false;
    for (std::size_t i = 0; i < box.dims(); ++i) {
      if (iso[i].hi < box[i].lo - margin || iso[i].lo > box[i].hi + margin) outside = true;
      if (iso[i].lo <= box[i].lo + margin || iso[i].hi >= box[i].hi - margin) touches = true;
    }
    if (outside) continue;
    if (touches) {
      result.boundary_contact = true;
      if (!box.contains(iso.midpoint())) continue;
    }
    CertifiedRoot root;
    root.isolator = iso;
    root.refinement_width = iso.max_width();
    root.jac_sign = sys.det_sign(exact_point(iso.midpoint()));
    if (root.jac_sign == 0) {
      // Krawczyk success excludes singular Jacobians on the isolator; a zero
      // here would mean the midpoint rounding left the box. Use the enclosure.
      Interval d = sys.det(iso.sides());
      root.jac_sign = d.lo > 0 ? 1 : (d.hi < 0 ? -1 : 0);
    }
    result.roots.push_back(std::move(root));
  }
  std::sort(result.roots.begin(), result.roots.end(), [](const CertifiedRoot& a, const CertifiedRoot& b) {
    auto ma = a.midpoint(), mb = b.midpoint();
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
  });

  result.singular_suspect = result.stats.singular_boxes > 0;
  result.depth_exceeded = budget_hit || result.stats.unresolved_boxes > 0;
  if (result.singular_suspect) result.status = FiberStatus::singular_suspect;
  else if (result.boundary_contact) result.status = FiberStatus::boundary_contact;
  else if (result.depth_exceeded) result.status = FiberStatus::depth_exceeded;
  else result.status = FiberStatus::complete;
  return result;
}

namespace {

struct FaceBox {
  std::vector<Interval> sides;
  double lower = 0.0;  // certified lower bound of sum G_k^2
  unsigned depth = 0;
  std::size_t seq = 0;  // creation order, for deterministic ties
};

struct FaceOrder {
  bool operator()(const FaceBox& a, const FaceBox& b) const {
    if (a.lower != b.lower) return a.lower > b.lower;
    return a.seq > b.seq;
  }
};

}  // namespace

Clearance family_boundary_clearance(const std::vector<Poly>& g, const IntervalBox& space,
                                    const std::vector<Interval>& params, const SolverConfig& cfg) {
  cfg.validate();
  const std::size_t ns = space.dims();
  const std::size_t nv = ns + params.size();
  std::vector<CompiledPoly> comp;
  for (const auto& p : g) {
    if (p.nvars() != nv) throw std::invalid_argument("boundary clearance: variable count mismatch");
    comp.emplace_back(p);
  }
  constexpr std::size_t kBudget = 200'000;

  Clearance out;
  double sampled_sq = std::numeric_limits<double>::infinity();
  std::size_t seq = 0;
  auto make = [&](std::vector<Interval> sides, unsigned depth) {
    FaceBox fb{std::move(sides), 0.0, depth, seq++};
    Interval sum(0.0);
    for (const auto& c : comp) sum = sum + sqr(c.evaluate(fb.sides));
    fb.lower = std::max(0.0, sum.lo);
    std::vector<double> mid(nv);
    for (std::size_t i = 0; i < nv; ++i) mid[i] = fb.sides[i].mid();
    double s = 0.0;
    for (const auto& c : comp) {
      double v = c.evaluate(mid);
      s += v * v;
    }
    if (std::isfinite(s)) sampled_sq = std::min(sampled_sq, s);
    ++out.boxes;
    return fb;
  };

  std::priority_queue<FaceBox, std::vector<FaceBox>, FaceOrder> heap;
  for (std::size_t dim = 0; dim < ns; ++dim) {
    for (double end : {space[dim].lo, space[dim].hi}) {
      std::vector<Interval> sides(space.sides().begin(), space.sides().end());
      sides[dim] = Interval(end);
      sides.insert(sides.end(), params.begin(), params.end());
      heap.push(make(std::move(sides), 0));
      if (space[dim].lo == space[dim].hi) break;
    }
  }

  for (;;) {
    FaceBox top = heap.top();
    double width = 0.0;
    std::size_t split = 0;
    for (std::size_t i = 0; i < nv; ++i) {
      if (top.sides[i].width() > width) {
        width = top.sides[i].width();
        split = i;
      }
    }
    bool good_enough = top.lower > 0 && top.lower >= 0.25 * sampled_sq;
    bool cannot_split = width == 0.0 || top.depth >= cfg.max_depth || out.boxes + 2 > kBudget;
    if (good_enough || cannot_split) {
      out.sampled_min = std::sqrt(sampled_sq);
      if (top.lower > 0) {
        out.ok = true;
        out.m = polycore::round_down(std::sqrt(top.lower));
      } else {
        out.diagnostic = width == 0.0 || top.depth >= cfg.max_depth
                             ? "boundary enclosure of |F - z| still contains 0 at maximal subdivision"
                             : "boundary clearance box budget exhausted";
      }
      return out;
    }
    heap.pop();
    double m = top.sides[split].mid();
    std::vector<Interval> left = top.sides, right = top.sides;
    left[split].hi = m;
    right[split].lo = m;
    heap.push(make(std::move(left), top.depth + 1));
    heap.push(make(std::move(right), top.depth + 1));
  }
}

Clearance boundary_clearance(const PolyMap& f, std::span<const Rational> z, const IntervalBox& box,
                             const SolverConfig& cfg) {
  if (box.dims() != f.n()) throw std::invalid_argument("boundary_clearance: box dimension mismatch");
  PolyMap shifted = f.shifted(z);
  return family_boundary_clearance(shifted.components(), box, {}, cfg);
}

}  // namespace degreelab::fibersolve
