#include "degreelab/injectlab.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>

namespace degreelab::injectlab {

using fibersolve::CompiledSystem;
using fibersolve::FiberStatus;
using mapforms::Form;
using mapforms::KellerKind;
using polycore::CompiledPoly;
using polycore::Interval;

std::string to_string(SignClass c) {
  switch (c) {
    case SignClass::positive: return "positive";
    case SignClass::negative: return "negative";
    case SignClass::mixed: return "mixed";
    case SignClass::vanishing_found: return "vanishing_found";
  }
  return "?";
}

std::string to_string(OriginVerdict v) {
  switch (v) {
    case OriginVerdict::verified_in_box: return "verified_in_box";
    case OriginVerdict::violated: return "violated";
    case OriginVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::singleton: return "singleton";
    case ProbeKind::multiple: return "multiple";
    case ProbeKind::empty: return "empty";
    case ProbeKind::inconclusive: return "inconclusive";
  }
  return "?";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::consistent_with_injectivity: return "consistent_with_injectivity";
    case Verdict::non_injective_witness: return "non_injective_witness";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::vector<Rational> to_rational(std::span<const double> x) { return {x.begin(), x.end()}; }

int exact_sign(const mapforms::Poly& p, std::span<const double> x) {
  auto q = to_rational(x);
  return sgn(p.evaluate(q));
}

}  // namespace

SignSurvey jacobian_sign_survey(const PolyMap& f, const IntervalBox& box, const SignBudget& budget) {
  if (box.dims() != f.n()) throw std::invalid_argument("jacobian_sign_survey: box dimension mismatch");
  SignSurvey s;
  const auto keller = mapforms::keller_check(f);
  if (keller.kind == KellerKind::nonzero_constant) {
    s.classification = *keller.constant_value > 0 ? SignClass::positive : SignClass::negative;
    s.exact = s.certified = true;
    return s;
  }
  if (keller.kind == KellerKind::identically_zero || keller.kind == KellerKind::zero_constant) {
    s.classification = SignClass::vanishing_found;
    s.exact = s.certified = true;
    s.evidence.push_back(box.midpoint());
    return s;
  }

  const mapforms::Poly& det = f.jacobian_det();
  const CompiledPoly cdet(det);
  std::optional<std::vector<double>> pos, neg, zero;
  bool undecided = false;

  // Interval subdivision: certified sign regions.
  std::deque<IntervalBox> queue{box};
  while (!queue.empty()) {
    IntervalBox b = std::move(queue.front());
    queue.pop_front();
    ++s.boxes;
    Interval d = cdet.evaluate(b);
    if (d.lo > 0 || d.hi < 0) {
      auto& slot = d.lo > 0 ? pos : neg;
      if (!slot) slot = b.midpoint();
      continue;
    }
    // Undecided box: the dyadic midpoint often lies exactly on the zero set.
    std::vector<double> mid = b.midpoint();
    int sign = exact_sign(det, mid);
    auto& seen = sign > 0 ? pos : (sign < 0 ? neg : zero);
    if (!seen) seen = mid;
    if (s.boxes + queue.size() + 2 > budget.max_boxes) {
      undecided = true;
      s.budget_exhausted = true;
      continue;
    }
    auto [l, r] = b.bisect(b.widest());
    queue.push_back(std::move(l));
    queue.push_back(std::move(r));
  }
  s.certified = !undecided && !(pos && neg);

  // Sampling for evidence points; interval evaluation at the point decides
  // most signs, exact rational evaluation the rest.
  std::mt19937_64 rng(budget.seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (std::size_t i = 0; i < box.dims(); ++i) dist.emplace_back(box[i].lo, box[i].hi);
  std::vector<double> x(box.dims());
  std::vector<Interval> xi(box.dims());
  for (std::size_t k = 0; k < budget.samples; ++k) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = dist[i](rng);
      xi[i] = Interval(x[i]);
    }
    Interval d = cdet.evaluate(xi);
    int sign = d.lo > 0 ? 1 : (d.hi < 0 ? -1 : exact_sign(det, x));
    ++s.samples;
    if (sign > 0) {
      ++s.positive_samples;
      if (!pos) pos = x;
    } else if (sign < 0) {
      ++s.negative_samples;
      if (!neg) neg = x;
    } else {
      ++s.zero_samples;
      if (!zero) zero = x;
    }
  }
  if (pos && neg) {
    s.classification = SignClass::mixed;
    s.evidence = {*pos, *neg};
  } else if (zero) {
    s.classification = SignClass::vanishing_found;
    s.evidence = {*zero};
  } else if (neg) {
    s.classification = SignClass::negative;
    s.evidence = {*neg};
  } else {
    s.classification = SignClass::positive;
    if (pos) s.evidence = {*pos};
  }
  return s;
}

namespace {

void require_keller(const PolyMap& f, const char* who) {
  auto k = mapforms::keller_check(f);
  if (k.kind != KellerKind::nonzero_constant) {
    throw PreconditionError(std::string(who) + ": Jacobian determinant is not a nonzero constant (" +
                            mapforms::to_string(k.kind) + ")");
  }
}

}  // namespace

OriginResult origin_injectivity_cubic(const PolyMap& f, const IntervalBox& box, const SolverConfig& cfg) {
  if (mapforms::recognize_form(f).form == Form::neither) {
    throw PreconditionError("origin_injectivity_cubic: map is not of cubic homogeneous form");
  }
  require_keller(f, "origin_injectivity_cubic");
  OriginResult out;
  std::vector<Rational> zero(f.n(), Rational(0));
  out.fiber = fibersolve::solve_fiber(f, zero, box, cfg);
  const auto& roots = out.fiber.roots;
  std::vector<double> origin(f.n(), 0.0);
  if (roots.size() >= 2) {
    out.verdict = OriginVerdict::violated;
  } else if (out.fiber.status == FiberStatus::complete && roots.size() == 1 && roots[0].isolator.contains(origin)) {
    out.verdict = OriginVerdict::verified_in_box;
  } else if (out.fiber.status == FiberStatus::complete) {
    // F(0) = 0 always holds for this form, so a complete fiber must hold it.
    out.verdict = OriginVerdict::violated;
  }
  return out;
}

ProbeResult global_injectivity_probe(const PolyMap& f, std::span<const Rational> b, const IntervalBox& box,
                                     const SolverConfig& cfg) {
  ProbeResult p;
  p.box = box;
  p.fiber = fibersolve::solve_fiber(f, b, box, cfg);
  p.count = p.fiber.count();
  if (p.fiber.status != FiberStatus::complete) {
    p.kind = ProbeKind::inconclusive;
  } else if (p.count == 0) {
    p.kind = ProbeKind::empty;
  } else {
    p.kind = p.count == 1 ? ProbeKind::singleton : ProbeKind::multiple;
  }
  return p;
}

double exact_collision_residual(const PolyMap& f, std::span<const double> p1, std::span<const double> p2) {
  auto a = f.evaluate(std::span<const Rational>(to_rational(p1)));
  auto b = f.evaluate(std::span<const Rational>(to_rational(p2)));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Rational d = abs(a[i] - b[i]);
    worst = std::max(worst, Interval::enclose(d).hi);
  }
  return worst;
}

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::optional<WitnessPair> make_witness(const PolyMap& f, std::vector<double> p1, std::vector<double> p2,
                                        double separation, double residual) {
  WitnessPair w;
  w.separation = distance(p1, p2);
  w.residual = exact_collision_residual(f, p1, p2);
  w.p1 = std::move(p1);
  w.p2 = std::move(p2);
  if (!(w.separation > separation) || !(w.residual <= residual)) return std::nullopt;
  return w;
}

// Two certified roots of one fiber give a collision; midpoints are polished
// towards the common target first.
std::optional<WitnessPair> witness_from_fiber(const PolyMap& f, std::span<const Rational> target,
                                              const FiberResult& fiber, double separation, double residual) {
  const CompiledSystem sys(f, target);
  for (std::size_t i = 0; i < fiber.roots.size(); ++i) {
    for (std::size_t j = i + 1; j < fiber.roots.size(); ++j) {
      auto a = sys.newton(fiber.roots[i].midpoint(), 4).value_or(fiber.roots[i].midpoint());
      auto b = sys.newton(fiber.roots[j].midpoint(), 4).value_or(fiber.roots[j].midpoint());
      if (auto w = make_witness(f, std::move(a), std::move(b), separation, residual)) return w;
    }
  }
  return std::nullopt;
}

struct Attempt {
  bool clearance_q = false;
  bool clearance_b = false;
  FiberResult fiber_q;
  std::optional<long> degree_q;
  std::optional<long> degree_b;
  bool path_certified = false;
  std::string note;
};

}  // namespace

InjectivityReport injectivity_pipeline(const PolyMap& f, const std::vector<std::vector<Rational>>& queries,
                                       const SolverConfig& cfg, const PipelineOptions& opts) {
  require_keller(f, "injectivity_pipeline");
  const std::size_t n = f.n();
  for (const auto& q : queries) {
    if (q.size() != n) throw std::invalid_argument("injectivity_pipeline: query dimension mismatch");
  }
  InjectivityReport rep;

  // Step 1: a base point whose fiber is a singleton.
  if (mapforms::recognize_form(f).form != Form::neither) {
    rep.base_point.assign(n, Rational(0));
    rep.base_justification = "cubic homogeneous form: F(0) = 0 and the origin lemma applies";
  } else if (opts.base_point) {
    if (opts.base_point->size() != n) throw std::invalid_argument("injectivity_pipeline: base point dimension");
    rep.base_point = *opts.base_point;
    rep.base_justification = "caller-supplied base point";
  } else {
    std::vector<Rational> origin(n, Rational(0));
    rep.base_point = f.evaluate(std::span<const Rational>(origin));
    rep.base_justification = "default base point F(0)";
  }
  const auto& b = rep.base_point;

  ProbeResult base;
  for (double r = opts.initial_radius; r <= opts.max_radius; r *= 2) {
    IntervalBox box = IntervalBox::cube(n, r);
    base = global_injectivity_probe(f, b, box, cfg);
    rep.base_radius = r;
    // An empty fiber only means the preimage lies further out.
    if (base.kind != ProbeKind::inconclusive && base.kind != ProbeKind::empty &&
        fibersolve::boundary_clearance(f, b, box, cfg).ok) {
      break;
    }
  }
  rep.base_fiber_size = base.count;
  rep.base_status = to_string(base.kind);
  if (base.kind != ProbeKind::singleton) {
    rep.verdict = Verdict::inconclusive;
    rep.diagnosis = "base point fiber is " + to_string(base.kind) + " (size " + std::to_string(base.count) + ")";
    if (base.kind == ProbeKind::multiple) {
      rep.witness = witness_from_fiber(f, b, base.fiber, opts.separation, opts.residual);
    }
    return rep;
  }

  // Steps 2 and 3, per query.
  bool all_consistent = true;
  for (const auto& q : queries) {
    QueryRecord rec;
    rec.q = q;
    Attempt last;
    for (double r = std::max(opts.initial_radius, rep.base_radius); r <= opts.max_radius; r *= 2) {
      IntervalBox box = IntervalBox::cube(n, r);
      Attempt a;
      a.clearance_q = fibersolve::boundary_clearance(f, q, box, cfg).ok;
      rec.radius = r;
      if (!a.clearance_q) {
        a.note = "clearance at q failed";
        last = std::move(a);
        continue;
      }
      a.fiber_q = fibersolve::solve_fiber(f, q, box, cfg);
      if (a.fiber_q.status != FiberStatus::complete) {
        a.note = "fiber at q " + fibersolve::to_string(a.fiber_q.status);
        last = std::move(a);
        continue;
      }
      if (a.fiber_q.count() >= 2) {
        last = std::move(a);
        break;
      }
      if (a.fiber_q.count() == 0) {
        a.note = "fiber at q empty in the box";
        last = std::move(a);
        continue;
      }
      try {
        a.degree_q = degree::degree_signed_count(f, box, q, cfg).value;
        a.degree_b = degree::degree_signed_count(f, box, b, cfg).value;
      } catch (const degree::DegreeError& e) {
        a.note = degree::to_string(e.kind()) + " while counting degrees";
        last = std::move(a);
        continue;
      }
      a.path_certified = degree::component_constancy_check(f, box, {b, q}, cfg).path_certified;
      if (!a.path_certified) a.note = "segment from b to q not certified off F(boundary)";
      last = std::move(a);
      if (last.path_certified) break;
    }
    rec.fiber_size = last.fiber_q.count();
    rec.fiber_status = fibersolve::to_string(last.fiber_q.status);
    rec.degree_q = last.degree_q;
    rec.degree_b = last.degree_b;
    rec.path_certified = last.path_certified;
    rec.note = last.note;
    if (last.fiber_q.status == FiberStatus::complete && rec.fiber_size >= 2 && !rep.witness) {
      rep.witness = witness_from_fiber(f, q, last.fiber_q, opts.separation, opts.residual);
      if (rep.witness) rec.note = "fiber has " + std::to_string(rec.fiber_size) + " certified points";
    }
    rec.consistent = rec.path_certified && rec.fiber_size == 1 && rec.degree_q && rec.degree_b &&
                     *rec.degree_q == *rec.degree_b;
    all_consistent = all_consistent && rec.consistent;
    rep.queries.push_back(std::move(rec));
  }

  if (rep.witness) {
    rep.verdict = Verdict::non_injective_witness;
    rep.diagnosis = "certified fiber with two separated points";
  } else if (all_consistent) {
    rep.verdict = Verdict::consistent_with_injectivity;
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.diagnosis = "at least one query could not be certified";
  }
  return rep;
}

CollisionResult collision_search(const PolyMap& f, const IntervalBox& box, const SolverConfig& cfg,
                                 const CollisionConfig& ccfg) {
  if (box.dims() != f.n()) throw std::invalid_argument("collision_search: box dimension mismatch");
  const std::size_t n = f.n();
  CollisionResult out;
  std::mt19937_64 rng(ccfg.seed);
  std::vector<std::uniform_real_distribution<double>> dist;
  for (std::size_t i = 0; i < n; ++i) dist.emplace_back(box[i].lo, box[i].hi);
  auto sample = [&] {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = dist[i](rng);
    return p;
  };

  // Certified route: enumerate the fiber through a sampled point.
  SolverConfig fcfg = cfg;
  fcfg.max_boxes = std::min(cfg.max_boxes, ccfg.fiber_max_boxes);
  for (std::size_t k = 0; k < ccfg.fiber_samples; ++k) {
    auto p = sample();
    auto target = f.evaluate(std::span<const Rational>(to_rational(p)));
    ++out.fiber_solves;
    FiberResult fiber = fibersolve::solve_fiber(f, target, box, fcfg);
    if (auto w = witness_from_fiber(f, target, fiber, ccfg.separation, ccfg.residual)) {
      out.witness = std::move(w);
      out.method = "certified fiber enumeration";
      return out;
    }
  }

  // Fallback: Newton from random starts towards F(p1).
  for (std::size_t k = 0; k < ccfg.samples; ++k) {
    auto p1 = sample();
    ++out.samples_tried;
    auto target = f.evaluate(std::span<const Rational>(to_rational(p1)));
    const CompiledSystem sys(f, target);
    for (std::size_t s = 0; s < ccfg.starts_per_sample; ++s) {
      auto p2 = sys.newton(sample(), 60);
      if (!p2) continue;
      if (!(distance(p1, *p2) > ccfg.separation)) continue;
      if (auto w = make_witness(f, p1, *p2, ccfg.separation, ccfg.residual)) {
        out.witness = std::move(w);
        out.method = "sampling with Newton refinement";
        return out;
      }
    }
  }
  out.method = "none found within budget";
  return out;
}

}  // namespace degreelab::injectlab
