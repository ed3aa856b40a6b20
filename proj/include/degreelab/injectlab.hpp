#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degreelab/degree.hpp"

namespace degreelab::injectlab {

using fibersolve::FiberResult;
using fibersolve::SolverConfig;
using mapforms::PolyMap;
using polycore::IntervalBox;
using polycore::Rational;

/// A hypothesis an operation requires (Keller, cubic form) does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SignClass { positive, negative, mixed, vanishing_found };
std::string to_string(SignClass c);

struct SignBudget {
  std::size_t max_boxes = 4096;
  std::size_t samples = 100'000;
  std::uint64_t seed = 0;
};

struct SignSurvey {
  SignClass classification = SignClass::positive;
  /// Points backing the classification: for mixed, a positive then a
  /// negative point; for vanishing_found, the zero.
  std::vector<std::vector<double>> evidence;
  /// Decided symbolically (constant determinant).
  bool exact = false;
  /// Interval subdivision proved the sign on the whole box.
  bool certified = false;
  bool budget_exhausted = false;
  std::size_t boxes = 0;
  std::size_t samples = 0;
  std::size_t positive_samples = 0;
  std::size_t negative_samples = 0;
  std::size_t zero_samples = 0;
};

SignSurvey jacobian_sign_survey(const PolyMap& f, const IntervalBox& box, const SignBudget& budget = {});

enum class OriginVerdict { verified_in_box, violated, inconclusive };
std::string to_string(OriginVerdict v);

struct OriginResult {
  OriginVerdict verdict = OriginVerdict::inconclusive;
  FiberResult fiber;
};

/// Checks F^{-1}(0) = {0} inside the box for a Keller map of cubic
/// homogeneous form. Throws PreconditionError when either hypothesis fails.
OriginResult origin_injectivity_cubic(const PolyMap& f, const IntervalBox& box, const SolverConfig& cfg = {});

enum class ProbeKind { singleton, multiple, empty, inconclusive };
std::string to_string(ProbeKind k);

struct ProbeResult {
  ProbeKind kind = ProbeKind::inconclusive;
  std::size_t count = 0;
  IntervalBox box;
  FiberResult fiber;
};

/// Certified fiber count of b inside the box. Only the box-restricted
/// condition is checked.
ProbeResult global_injectivity_probe(const PolyMap& f, std::span<const Rational> b, const IntervalBox& box,
                                     const SolverConfig& cfg = {});

struct WitnessPair {
  std::vector<double> p1;
  std::vector<double> p2;
  double separation = 0.0;
  /// max_i |F_i(p1) - F_i(p2)| evaluated exactly at the stored points.
  double residual = 0.0;
};

struct QueryRecord {
  std::vector<Rational> q;
  double radius = 0.0;
  std::size_t fiber_size = 0;
  std::string fiber_status;
  std::optional<long> degree_q;
  std::optional<long> degree_b;
  bool path_certified = false;
  bool consistent = false;
  std::string note;
};

enum class Verdict { consistent_with_injectivity, non_injective_witness, inconclusive };
std::string to_string(Verdict v);

struct PipelineOptions {
  /// Base point b for maps not in cubic homogeneous form; defaults to F(0).
  std::optional<std::vector<Rational>> base_point;
  double initial_radius = 1.0;
  double max_radius = 1048576.0;  // 2^20
  double separation = 0.1;
  double residual = 1e-8;
};

struct InjectivityReport {
  Verdict verdict = Verdict::inconclusive;
  std::vector<Rational> base_point;
  std::string base_justification;
  double base_radius = 0.0;
  std::size_t base_fiber_size = 0;
  std::string base_status;
  std::vector<QueryRecord> queries;
  std::optional<WitnessPair> witness;
  std::string diagnosis;
};

/// Base point with a singleton fiber, then per query: grow the ball-box
/// [-R, R]^n until the fiber is complete with certified clearance, compare
/// the degree at q and at b, and certify the segment b -> q off F(boundary).
InjectivityReport injectivity_pipeline(const PolyMap& f, const std::vector<std::vector<Rational>>& queries,
                                       const SolverConfig& cfg = {}, const PipelineOptions& opts = {});

struct CollisionConfig {
  double separation = 0.1;
  double residual = 1e-8;
  /// Sampled points whose fiber is enumerated by the certified solver.
  std::size_t fiber_samples = 8;
  std::size_t fiber_max_boxes = 50'000;
  /// Sampled points for the Newton fallback, and restarts per point.
  std::size_t samples = 4000;
  std::size_t starts_per_sample = 8;
  std::uint64_t seed = 0;
};

struct CollisionResult {
  std::optional<WitnessPair> witness;
  std::string method;
  std::size_t fiber_solves = 0;
  std::size_t samples_tried = 0;
};

/// Looks for p1 != p2 in the box with F(p1) = F(p2). Finding nothing is not a
/// proof of injectivity.
CollisionResult collision_search(const PolyMap& f, const IntervalBox& box, const SolverConfig& cfg = {},
                                 const CollisionConfig& ccfg = {});

/// Exact residual max_i |F_i(p1) - F_i(p2)| at the given double points.
double exact_collision_residual(const PolyMap& f, std::span<const double> p1, std::span<const double> p2);

}  // namespace degreelab::injectlab
