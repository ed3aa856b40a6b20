#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "degreelab/poly.hpp"

namespace degreelab::mapforms {

using polycore::Poly;
using polycore::Rational;

using PolyMatrix = std::vector<std::vector<Poly>>;
using RationalMatrix = std::vector<std::vector<Rational>>;

/// Square polynomial mapping R^n -> R^n.
///
/// Components are immutable once constructed. The Jacobian and its
/// determinant are computed on first request and published exactly once;
/// copies share the cache.
class PolyMap {
 public:
  explicit PolyMap(std::vector<Poly> components);
  static PolyMap identity(std::size_t n);
  static PolyMap parse(const std::vector<std::string>& components);

  std::size_t n() const { return components_.size(); }
  const std::vector<Poly>& components() const { return components_; }
  const Poly& operator[](std::size_t i) const { return components_[i]; }

  const PolyMatrix& jacobian() const;
  const Poly& jacobian_det() const;

  std::vector<Rational> evaluate(std::span<const Rational> x) const;
  std::vector<double> evaluate(std::span<const double> x) const;

  /// (F o G)(x) = F(G(x)).
  PolyMap compose(const PolyMap& inner) const;
  /// F - z, componentwise.
  PolyMap shifted(std::span<const Rational> z) const;

  friend bool operator==(const PolyMap& a, const PolyMap& b) { return a.components_ == b.components_; }

 private:
  struct Cache;
  std::vector<Poly> components_;
  std::shared_ptr<Cache> cache_;
};

PolyMatrix jacobian_matrix(const PolyMap& f);
Poly jacobian_det(const PolyMap& f);

/// Determinant by cofactor expansion along the first row.
Poly cofactor_determinant(const PolyMatrix& m);
/// Determinant by Bareiss fraction-free elimination (exact divisions).
Poly bareiss_determinant(PolyMatrix m);

enum class KellerKind { nonzero_constant, zero_constant, nonconstant, identically_zero };

struct KellerStatus {
  KellerKind kind;
  std::optional<Rational> constant_value;
};

KellerStatus keller_check(const PolyMap& f);
std::string to_string(KellerKind k);

/// F = sum over d of F_(d); only degrees with a nonzero component appear.
std::map<unsigned, PolyMap> decompose_homogeneous(const PolyMap& f);

enum class Form { cubic_homogeneous, druzkowski, neither };

struct FormWitness {
  Form form = Form::neither;
  bool linear_part_identity = false;
  /// Row i holds the coefficients a_ij with H_i = (sum_j a_ij x_j)^3.
  std::optional<RationalMatrix> druzkowski_matrix;
};

FormWitness recognize_form(const PolyMap& f);
std::string to_string(Form f);

/// Thrown when an operation's structural precondition on the map fails.
class FormViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Residual F(a) - JF(t0 a) a at t0 = 1/sqrt(3) for F = I + H cubic
/// homogeneous. Computed exactly: JF(t a) only involves even powers of t, so
/// only t0^2 = 1/3 enters.
std::vector<Rational> euler_cubic_identity_check(const PolyMap& f, std::span<const Rational> a);

/// Complex polynomial with Gaussian-rational coefficients, stored as
/// re + i*im with re, im real-coefficient polynomials in the same variables.
struct ComplexPoly {
  Poly re;
  Poly im;

  explicit ComplexPoly(std::size_t nvars) : re(nvars), im(nvars) {}
  ComplexPoly(Poly r, Poly i) : re(std::move(r)), im(std::move(i)) {}

  ComplexPoly& operator+=(const ComplexPoly& o);
  ComplexPoly& operator-=(const ComplexPoly& o);
  friend ComplexPoly operator+(ComplexPoly a, const ComplexPoly& b) { return a += b; }
  friend ComplexPoly operator-(ComplexPoly a, const ComplexPoly& b) { return a -= b; }
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b);
  ComplexPoly operator-() const { return {-re, -im}; }
  ComplexPoly diff(std::size_t var) const { return {re.diff(var), im.diff(var)}; }
  friend bool operator==(const ComplexPoly& a, const ComplexPoly& b) = default;
};

/// Complex map C^n -> C^n in variables z1..zn.
using ComplexPolyMap = std::vector<ComplexPoly>;

ComplexPoly complex_jacobian_det(const ComplexPolyMap& f);
/// Rewrites a complex polynomial in z1..zn as a pair of real polynomials in
/// (x1, y1, ..., xn, yn) with zk = xk + i yk.
ComplexPoly realify_poly(const ComplexPoly& p);
/// (Re F1, Im F1, ..., Re Fn, Im Fn) in (x1, y1, ..., xn, yn).
PolyMap realify(const ComplexPolyMap& f);

}  // namespace degreelab::mapforms
