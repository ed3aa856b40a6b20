#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "degreelab/interval.hpp"

namespace degreelab::polycore {

using Rational = mpq_class;
using Exponent = std::vector<unsigned>;

/// Graded lexicographic order: total degree first, then x1 > x2 > ... .
struct GrlexLess {
  bool operator()(const Exponent& a, const Exponent& b) const;
};

unsigned total_degree(const Exponent& e);

/// Parse failure; carries the 0-based character offset of the problem.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position);
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct PolyDegree {
  unsigned value = 0;
  bool is_zero = false;
};

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// The term map never stores a zero coefficient, so structural equality is
/// mathematical equality. Variables are indexed from 0 in the API; the text
/// form names them x1..xN.
class Poly {
 public:
  using TermMap = std::map<Exponent, Rational, GrlexLess>;

  explicit Poly(std::size_t nvars);
  static Poly constant(std::size_t nvars, const Rational& c);
  static Poly variable(std::size_t nvars, std::size_t index);
  static Poly monomial(Exponent e, const Rational& c);

  std::size_t nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Rational constant_term() const;
  /// Coefficient of a monomial, zero if absent.
  Rational coeff(const Exponent& e) const;

  PolyDegree degree() const;
  unsigned total_degree() const { return degree().value; }
  unsigned degree_in(std::size_t var) const;
  /// Sum of the terms of total degree exactly d.
  Poly homogeneous_component(unsigned d) const;
  bool is_homogeneous(unsigned d) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Rational& s);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  Poly operator-() const;
  Poly pow(unsigned k) const;

  /// Exact quotient a / b; throws if b does not divide a.
  Poly divide_exact(const Poly& divisor) const;

  /// Formal partial derivative with respect to variable `var` (0-based).
  Poly diff(std::size_t var) const;

  Rational evaluate(std::span<const Rational> point) const;
  /// Float evaluation: terms in descending graded-lex order, summed left to right.
  double evaluate(std::span<const double> point) const;
  /// Enclosure of the range over a box (natural interval extension).
  Interval evaluate(const IntervalBox& box) const;

  /// p(g_1, ..., g_nvars); all g share a common variable count.
  Poly compose(std::span<const Poly> g) const;
  /// Substitutes a value for the last variable, dropping it.
  Poly fix_last(const Rational& value) const;
  /// Same polynomial viewed in nvars + extra variables.
  Poly extend(std::size_t extra) const;
  /// Renames variable i to perm[i].
  Poly permute(std::span<const std::size_t> perm) const;

  /// Canonical text, descending graded-lex, e.g. "x1^2*x2 - 3/2*x1 + 1".
  std::string to_string() const;
  /// Same, with custom variable names.
  std::string to_string(std::span<const std::string> names) const;

  friend bool operator==(const Poly& a, const Poly& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_vars(const Poly& o) const;
  void add_term(const Exponent& e, const Rational& c);

  std::size_t nvars_;
  TermMap terms_;
};

/// Parses the expression grammar: x1..xN, integer and p/q literals, + - * ^,
/// parentheses. `extra` optionally names additional variables that follow
/// x1..xN (for example "t" for a homotopy parameter).
Poly parse_poly(std::string_view text, std::size_t nvars,
                std::span<const std::string> extra = {});

/// Parses a rational literal: "3", "-2/5", or a decimal such as "0.25"
/// (decimals are converted exactly). Sets `was_decimal` when a decimal point
/// or exponent was present.
Rational parse_rational(std::string_view text, bool* was_decimal = nullptr);
std::string rational_to_string(const Rational& q);

/// Poly compiled for fast float and interval evaluation.
///
/// Term order matches Poly::evaluate(double) so results are bit-identical.
class CompiledPoly {
 public:
  CompiledPoly() = default;
  explicit CompiledPoly(const Poly& p);

  std::size_t nvars() const { return nvars_; }
  double evaluate(std::span<const double> x) const;
  Interval evaluate(std::span<const Interval> x) const;
  Interval evaluate(const IntervalBox& box) const { return evaluate(box.sides()); }

 private:
  struct Term {
    Exponent exps;
    double coeff;
    Interval coeff_enclosure;
  };
  std::size_t nvars_ = 0;
  std::vector<unsigned> max_degree_;
  std::vector<Term> terms_;
};

}  // namespace degreelab::polycore
