#include <cctype>

#include "degreelab/poly.hpp"

namespace degreelab::polycore {

namespace {

// Recursive descent over
//   expr    := term (('+' | '-') term)*
//   term    := unary ('*' unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' INT)?
//   primary := INT ('/' INT)? | VAR | '(' expr ')'
class Parser {
 public:
  Parser(std::string_view text, std::size_t nvars, std::span<const std::string> extra)
      : text_(text), nvars_(nvars), extra_(extra) {}

  Poly parse() {
    skip_ws();
    if (at_end()) throw ParseError("empty expression", pos_);
    Poly p = expr();
    skip_ws();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    return p;
  }

 private:
  std::size_t total_vars() const { return nvars_ + extra_.size(); }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Poly expr() {
    Poly acc = term();
    for (;;) {
      skip_ws();
      char c = peek();
      if (c != '+' && c != '-') return acc;
      ++pos_;
      Poly rhs = term();
      if (c == '+') acc += rhs;
      else acc -= rhs;
    }
  }

  Poly term() {
    Poly acc = unary();
    for (;;) {
      skip_ws();
      if (peek() != '*') {
        check_no_implicit_product();
        return acc;
      }
      ++pos_;
      acc = acc * unary();
    }
  }

  // Anything that could start an operand right after an operand means the
  // input relied on implicit multiplication ("2x1", "x1(x2)").
  void check_no_implicit_product() {
    char c = peek();
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '(') {
      throw ParseError("implicit multiplication is not allowed", pos_);
    }
  }

  Poly unary() {
    skip_ws();
    char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Poly power() {
    Poly base = primary();
    skip_ws();
    if (peek() != '^') return base;
    ++pos_;
    skip_ws();
    if (peek() == '-') throw ParseError("negative exponent", pos_);
    if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected exponent", pos_);
    std::size_t at = pos_;
    mpz_class k = integer();
    if (k > 1000) throw ParseError("exponent too large", at);
    skip_ws();
    if (peek() == '^') throw ParseError("chained exponents are ambiguous; use parentheses", pos_);
    return base.pow(static_cast<unsigned>(k.get_ui()));
  }

  Poly primary() {
    skip_ws();
    if (at_end()) throw ParseError("unexpected end of expression", pos_);
    char c = peek();
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      skip_ws();
      if (peek() != ')') throw ParseError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      mpz_class num = integer();
      skip_ws();
      if (peek() == '.') throw ParseError("decimal literals are not allowed; use p/q", pos_);
      if (peek() == '/') {
        ++pos_;
        skip_ws();
        std::size_t at = pos_;
        if (!std::isdigit(static_cast<unsigned char>(peek()))) throw ParseError("expected denominator", pos_);
        mpz_class den = integer();
        if (den == 0) throw ParseError("zero denominator", at);
        Rational q(num, den);
        q.canonicalize();
        return Poly::constant(total_vars(), q);
      }
      return Poly::constant(total_vars(), Rational(num));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return variable();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  Poly variable() {
    std::size_t start = pos_;
    while (!at_end() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string_view name = text_.substr(start, pos_ - start);
    for (std::size_t k = 0; k < extra_.size(); ++k) {
      if (name == extra_[k]) return Poly::variable(total_vars(), nvars_ + k);
    }
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        digits = digits && std::isdigit(static_cast<unsigned char>(name[i]));
      }
      if (digits) {
        if (name.size() > 9) throw ParseError("variable index out of range", start);
        std::size_t index = std::stoul(std::string(name.substr(1)));
        if (index < 1 || index > nvars_) throw ParseError("variable index out of range", start);
        return Poly::variable(total_vars(), index - 1);
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  mpz_class integer() {
    std::size_t start = pos_;
    while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return mpz_class(std::string(text_.substr(start, pos_ - start)), 10);
  }

  std::string_view text_;
  std::size_t nvars_;
  std::span<const std::string> extra_;
  std::size_t pos_ = 0;
};

}  // namespace

Poly parse_poly(std::string_view text, std::size_t nvars, std::span<const std::string> extra) {
  if (nvars == 0) throw std::invalid_argument("parse_poly: nvars must be positive");
  return Parser(text, nvars, extra).parse();
}

Rational parse_rational(std::string_view text, bool* was_decimal) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (was_decimal) *was_decimal = false;
  if (s.empty()) throw ParseError("empty number", 0);
  if (s.find_first_of(".eE") != std::string::npos) {
    // Decimal literal, converted from its digits: "0.1" is exactly 1/10.
    std::size_t i = 0;
    bool negative = false;
    if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
    std::string digits;
    long scale = 0;
    bool seen_dot = false, any_digit = false;
    for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
      if (s[i] == '.' && !seen_dot) {
        seen_dot = true;
      } else if (std::isdigit(static_cast<unsigned char>(s[i]))) {
        digits.push_back(s[i]);
        any_digit = true;
        if (seen_dot) --scale;
      } else {
        throw ParseError("bad number '" + s + "'", i);
      }
    }
    if (!any_digit) throw ParseError("bad number '" + s + "'", 0);
    if (i < s.size()) {
      std::string ex = s.substr(i + 1);
      std::size_t used = 0;
      long e = 0;
      try {
        e = std::stol(ex, &used);
      } catch (const std::exception&) {
        throw ParseError("bad exponent in '" + s + "'", i + 1);
      }
      if (used != ex.size() || e > 4000 || e < -4000) throw ParseError("bad exponent in '" + s + "'", i + 1);
      scale += e;
    }
    mpz_class num(digits, 10), ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational q = scale < 0 ? Rational(num, ten_pow) : Rational(num * ten_pow);
    q.canonicalize();
    if (negative) q = -q;
    if (was_decimal) *was_decimal = true;
    return q;
  }
  std::size_t slash = s.find('/');
  auto check_int = [&](std::string_view part, std::size_t offset) {
    std::size_t i = (!part.empty() && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
    if (i == part.size()) throw ParseError("bad number '" + s + "'", offset);
    for (; i < part.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(part[i]))) throw ParseError("bad number '" + s + "'", offset + i);
    }
  };
  if (slash == std::string::npos) {
    check_int(s, 0);
    return Rational(mpz_class(s[0] == '+' ? s.substr(1) : s, 10));
  }
  std::string num = s.substr(0, slash), den = s.substr(slash + 1);
  check_int(num, 0);
  check_int(den, slash + 1);
  mpz_class d(den[0] == '+' ? den.substr(1) : den, 10);
  if (d == 0) throw ParseError("zero denominator", slash + 1);
  Rational q(mpz_class(num[0] == '+' ? num.substr(1) : num, 10), d);
  q.canonicalize();
  return q;
}

}  // namespace degreelab::polycore
