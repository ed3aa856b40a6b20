#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "degreelab/polymap.hpp"

namespace degreelab::fibersolve {

using mapforms::PolyMap;
using polycore::Interval;
using polycore::IntervalBox;
using polycore::Rational;

struct SolverConfig {
  unsigned max_depth = 60;
  double target_width = 1e-10;
  unsigned newton_max_iters = 50;
  double boundary_margin = 1e-8;
  /// Cap on processed boxes; hitting it reports depth_exceeded.
  std::size_t max_boxes = 2'000'000;
  /// Worker threads for box processing. Results do not depend on this.
  unsigned workers = 1;

  void validate() const;
};

/// Box proven to hold exactly one solution of F(x) = z.
struct CertifiedRoot {
  IntervalBox isolator;
  int jac_sign = 0;
  double refinement_width = 0.0;

  std::vector<double> midpoint() const { return isolator.midpoint(); }
};

enum class FiberStatus { complete, boundary_contact, depth_exceeded, singular_suspect };
std::string to_string(FiberStatus s);

struct FiberStats {
  std::size_t boxes_processed = 0;
  unsigned max_depth_reached = 0;
  std::size_t singular_boxes = 0;
  std::size_t unresolved_boxes = 0;
};

struct FiberResult {
  std::vector<CertifiedRoot> roots;
  FiberStatus status = FiberStatus::complete;
  FiberStats stats;
  bool boundary_contact = false;
  bool depth_exceeded = false;
  bool singular_suspect = false;

  std::size_t count() const { return roots.size(); }
  int positive() const;
  int negative() const;
};

/// Certified enumeration of the real solutions of F(x) = z in the closed box.
FiberResult solve_fiber(const PolyMap& f, std::span<const Rational> z, const IntervalBox& box,
                        const SolverConfig& cfg = {});

/// Product of component total degrees; throws on a zero component.
unsigned long long bezout_bound(const PolyMap& f);

struct Clearance {
  bool ok = false;
  /// Certified: min over the boundary of |F(x) - z| >= m. Zero on failure.
  double m = 0.0;
  /// Smallest |F - z| seen at sampled boundary points (an upper estimate).
  double sampled_min = 0.0;
  std::size_t boxes = 0;
  std::string diagnostic;
};

/// Lower bound on |F - z| over the boundary of the box.
Clearance boundary_clearance(const PolyMap& f, std::span<const Rational> z, const IntervalBox& box,
                             const SolverConfig& cfg = {});

/// Same, for a family G(x, s) with trailing parameter variables: certifies
/// |G(x, s)| >= m for x on the boundary of `space` and s anywhere in
/// `params` (possibly empty). Components take space.dims() + params.size()
/// variables.
Clearance family_boundary_clearance(const std::vector<polycore::Poly>& g, const IntervalBox& space,
                                    const std::vector<Interval>& params, const SolverConfig& cfg = {});

/// F - z compiled for float and interval evaluation, with its Jacobian.
class CompiledSystem {
 public:
  CompiledSystem(const PolyMap& f, std::span<const Rational> z);

  std::size_t n() const { return g_.size(); }
  std::vector<double> residual(std::span<const double> x) const;
  /// Row-major n x n.
  std::vector<double> jacobian(std::span<const double> x) const;
  std::vector<Interval> residual(std::span<const Interval> x) const;
  std::vector<Interval> jacobian(std::span<const Interval> x) const;
  Interval det(std::span<const Interval> x) const { return det_.evaluate(x); }
  /// Exact sign of det JF at a rational point.
  int det_sign(std::span<const Rational> x) const;
  /// Sign of det JF when it is a constant, else 0.
  int constant_det_sign() const { return constant_det_sign_; }

  /// Plain Newton iteration in doubles; nullopt on singular steps or
  /// non-finite iterates.
  std::optional<std::vector<double>> newton(std::vector<double> x, unsigned iters) const;

 private:
  std::vector<polycore::CompiledPoly> g_;
  std::vector<polycore::CompiledPoly> jac_;
  polycore::CompiledPoly det_;
  polycore::Poly det_exact_;
  int constant_det_sign_ = 0;
};

/// In-place inverse of a row-major n x n matrix (partial pivoting).
/// Returns false when the matrix is numerically singular.
bool invert(std::vector<double>& a, std::size_t n);

enum class KrawczykOutcome { no_preconditioner, excluded, contained, partial };

struct KrawczykStep {
  KrawczykOutcome outcome = KrawczykOutcome::no_preconditioner;
  /// K(X) intersected with X; meaningful for contained and partial.
  IntervalBox image;
};

/// One Krawczyk step with midpoint preconditioning. `contained` means K(X)
/// lies in the interior of X, proving a unique solution in X.
KrawczykStep krawczyk(const CompiledSystem& sys, const IntervalBox& x);

}  // namespace degreelab::fibersolve
