#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "degreelab/fibersolve.hpp"

namespace degreelab::degree {

using fibersolve::Clearance;
using fibersolve::FiberResult;
using fibersolve::SolverConfig;
using mapforms::PolyMap;
using polycore::IntervalBox;
using polycore::Poly;
using polycore::Rational;

enum class DegreeErrorKind {
  boundary_precondition,  // z may lie on F(boundary)
  singular_precondition,  // a root with vanishing Jacobian is suspected
  incomplete,             // solver could not finish
  rounding_ambiguous,     // integral too far from an integer
  budget_exceeded,
};
std::string to_string(DegreeErrorKind k);

class DegreeError : public std::runtime_error {
 public:
  DegreeError(DegreeErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  DegreeErrorKind kind() const { return kind_; }

 private:
  DegreeErrorKind kind_;
};

enum class Method { signed_count, integral };
std::string to_string(Method m);

struct DegreeResult {
  long value = 0;
  /// Pre-rounding estimate (integral method only).
  double raw = 0.0;
  Method method = Method::signed_count;
  bool certified = false;

  double clearance = 0.0;
  int positive_roots = 0;
  int negative_roots = 0;
  std::size_t samples = 0;
  std::size_t support_hits = 0;
  double epsilon = 0.0;
};

/// Degree as N+ - N- over a certified, complete fiber.
DegreeResult degree_signed_count(const PolyMap& f, const IntervalBox& box, std::span<const Rational> z,
                                 const SolverConfig& cfg = {});

/// Radial bump Phi with support in [r0/2, r1], r0 = eps/4, r1 = 3 eps/4,
/// normalized so the integral of Phi(|x|) over R^n is 1.
///
/// Shape: c * S((r - r0/2) / (r0/2)) * S((r1 - r) / ((r1 - r0)/2)) where S is
/// the C-infinity step built from exp(-1/s).
class Bump {
 public:
  double epsilon() const { return epsilon_; }
  double inner_radius() const { return 0.25 * epsilon_; }
  double outer_radius() const { return 0.75 * epsilon_; }
  double normalization() const { return norm_; }
  std::size_t dims() const { return dims_; }

  double operator()(double r) const { return norm_ * profile(r); }
  /// Un-normalized shape.
  double profile(double r) const;

 private:
  friend Bump bump_build(double epsilon, std::size_t n);
  double epsilon_ = 0.0;
  double norm_ = 0.0;
  std::size_t dims_ = 0;
};

Bump bump_build(double epsilon, std::size_t n);

/// Surface area of the unit sphere in R^n (2 for n = 1).
double unit_sphere_area(std::size_t n);

/// Adaptive Gauss-Kronrod (7/15) quadrature on [a, b].
double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

struct QuadratureConfig {
  std::size_t initial_samples = 1u << 14;
  std::size_t max_samples = 1u << 22;
  double convergence_tol = 0.05;
  /// Minimum number of samples landing in the bump support before two
  /// estimates may be compared.
  std::size_t min_support_hits = 1000;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

/// Degree from the integral of Phi(|F - z|) det JF over the box, estimated by
/// shifted Halton sampling with doubling until consecutive estimates agree.
DegreeResult degree_integral(const PolyMap& f, const IntervalBox& box, std::span<const Rational> z,
                             const QuadratureConfig& quad = {}, const SolverConfig& cfg = {});

struct HomotopyReport {
  bool boundary_certified = false;
  bool constant = false;
  std::vector<Rational> t_values;
  std::vector<std::optional<long>> degrees;
  std::vector<std::string> errors;
  double clearance = 0.0;
  std::string diagnostic;
};

/// Family F(x, t): n components in n + 1 variables, t last. Certifies the
/// boundary condition on faces x [0, 1], then counts the degree at each t.
HomotopyReport homotopy_constancy_check(const std::vector<Poly>& family, const IntervalBox& box,
                                        std::span<const Rational> z, std::span<const Rational> t_grid,
                                        const SolverConfig& cfg = {});

struct PathReport {
  bool path_certified = false;
  bool constant = false;
  std::vector<std::optional<long>> degrees;
  std::vector<std::string> errors;
  /// Index of the first segment that failed certification, if any.
  std::optional<std::size_t> failed_segment;
};

/// Certifies that a polyline of targets stays off F(boundary) and counts the
/// degree at each vertex.
PathReport component_constancy_check(const PolyMap& f, const IntervalBox& box,
                                     const std::vector<std::vector<Rational>>& path, const SolverConfig& cfg = {});

}  // namespace degreelab::degree
