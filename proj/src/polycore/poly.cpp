#include "degreelab/poly.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace degreelab::polycore {

bool GrlexLess::operator()(const Exponent& a, const Exponent& b) const {
  unsigned da = degreelab::polycore::total_degree(a);
  unsigned db = degreelab::polycore::total_degree(b);
  if (da != db) return da < db;
  // Larger exponent on an earlier variable ranks higher.
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

unsigned total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::runtime_error(what + " at position " + std::to_string(position)),
      position_(position) {}

Poly::Poly(std::size_t nvars) : nvars_(nvars) {
  if (nvars == 0) throw std::invalid_argument("Poly: nvars must be positive");
}

Poly Poly::constant(std::size_t nvars, const Rational& c) {
  Poly p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t index) {
  if (index >= nvars) throw std::out_of_range("Poly::variable: index out of range");
  Exponent e(nvars, 0);
  e[index] = 1;
  return monomial(std::move(e), 1);
}

Poly Poly::monomial(Exponent e, const Rational& c) {
  Poly p(e.size());
  p.add_term(e, c);
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && degreelab::polycore::total_degree(terms_.begin()->first) == 0);
}

Rational Poly::constant_term() const { return coeff(Exponent(nvars_, 0)); }

Rational Poly::coeff(const Exponent& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

PolyDegree Poly::degree() const {
  if (terms_.empty()) return {0, true};
  // Grlex puts the highest total degree last.
  return {degreelab::polycore::total_degree(terms_.rbegin()->first), false};
}

unsigned Poly::degree_in(std::size_t var) const {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e.at(var));
  return d;
}

Poly Poly::homogeneous_component(unsigned d) const {
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (degreelab::polycore::total_degree(e) == d) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

bool Poly::is_homogeneous(unsigned d) const {
  return std::all_of(terms_.begin(), terms_.end(),
                     [d](const auto& t) { return degreelab::polycore::total_degree(t.first) == d; });
}

void Poly::check_same_vars(const Poly& o) const {
  if (o.nvars_ != nvars_) throw std::invalid_argument("Poly: mismatched variable counts");
}

void Poly::add_term(const Exponent& e, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (inserted) {
    it->second.canonicalize();
  } else {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Poly& Poly::operator+=(const Poly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  check_same_vars(o);
  for (const auto& [e, c] : o.terms_) add_term(e, -c);
  return *this;
}

Poly& Poly::operator*=(const Rational& scalar) {
  Rational s = scalar;
  s.canonicalize();
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= s;
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  a.check_same_vars(b);
  Poly out(a.nvars_);
  Exponent e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Poly Poly::pow(unsigned k) const {
  Poly result = constant(nvars_, 1);
  Poly base = *this;
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return result;
}

Poly Poly::divide_exact(const Poly& divisor) const {
  check_same_vars(divisor);
  if (divisor.is_zero()) throw std::domain_error("Poly::divide_exact: division by zero");
  Poly quotient(nvars_);
  Poly rem = *this;
  const auto& [lead_e, lead_c] = *divisor.terms_.rbegin();
  Exponent q(nvars_);
  while (!rem.is_zero()) {
    const auto& [re, rc] = *rem.terms_.rbegin();
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (re[i] < lead_e[i]) throw std::domain_error("Poly::divide_exact: not divisible");
      q[i] = re[i] - lead_e[i];
    }
    Poly step = monomial(q, rc / lead_c);
    quotient += step;
    rem -= step * divisor;
  }
  return quotient;
}

Poly Poly::diff(std::size_t var) const {
  if (var >= nvars_) throw std::out_of_range("Poly::diff: variable index out of range");
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent d = e;
    d[var] -= 1;
    out.add_term(d, c * e[var]);
  }
  return out;
}

Rational Poly::evaluate(std::span<const Rational> point) const {
  if (point.size() != nvars_) throw std::invalid_argument("Poly::evaluate: dimension mismatch");
  std::vector<std::vector<Rational>> powers(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    unsigned d = degree_in(i);
    powers[i].resize(d + 1);
    powers[i][0] = 1;
    for (unsigned k = 1; k <= d; ++k) powers[i][k] = powers[i][k - 1] * point[i];
  }
  Rational sum = 0;
  for (const auto& [e, c] : terms_) {
    Rational t = c;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i]) t *= powers[i][e[i]];
    }
    sum += t;
  }
  return sum;
}

double Poly::evaluate(std::span<const double> point) const {
  if (point.size() != nvars_) throw std::invalid_argument("Poly::evaluate: dimension mismatch");
  return CompiledPoly(*this).evaluate(point);
}

Interval Poly::evaluate(const IntervalBox& box) const {
  if (box.dims() != nvars_) throw std::invalid_argument("Poly::evaluate: dimension mismatch");
  return CompiledPoly(*this).evaluate(box);
}

Poly Poly::compose(std::span<const Poly> g) const {
  if (g.size() != nvars_) throw std::invalid_argument("Poly::compose: need one polynomial per variable");
  const std::size_t m = g.front().nvars();
  for (const auto& gi : g) {
    if (gi.nvars() != m) throw std::invalid_argument("Poly::compose: inner variable counts differ");
  }
  std::vector<std::vector<Poly>> powers(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    unsigned d = degree_in(i);
    powers[i].reserve(d + 1);
    powers[i].push_back(constant(m, 1));
    for (unsigned k = 1; k <= d; ++k) powers[i].push_back(powers[i].back() * g[i]);
  }
  Poly out(m);
  for (const auto& [e, c] : terms_) {
    Poly t = constant(m, c);
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i]) t = t * powers[i][e[i]];
    }
    out += t;
  }
  return out;
}

Poly Poly::fix_last(const Rational& value) const {
  if (nvars_ < 2) throw std::invalid_argument("Poly::fix_last: need at least two variables");
  Poly out(nvars_ - 1);
  for (const auto& [e, c] : terms_) {
    Rational v = c;
    for (unsigned k = 0; k < e.back(); ++k) v *= value;
    out.add_term(Exponent(e.begin(), e.end() - 1), v);
  }
  return out;
}

Poly Poly::extend(std::size_t extra) const {
  Poly out(nvars_ + extra);
  for (const auto& [e, c] : terms_) {
    Exponent w = e;
    w.resize(nvars_ + extra, 0);
    out.terms_.emplace(std::move(w), c);
  }
  return out;
}

Poly Poly::permute(std::span<const std::size_t> perm) const {
  if (perm.size() != nvars_) throw std::invalid_argument("Poly::permute: bad permutation size");
  Poly out(nvars_);
  for (const auto& [e, c] : terms_) {
    Exponent w(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) w.at(perm[i]) = e[i];
    out.add_term(w, c);
  }
  return out;
}

std::string rational_to_string(const Rational& value) {
  Rational q = value;
  q.canonicalize();
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

std::string Poly::to_string() const {
  std::vector<std::string> names(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) names[i] = "x" + std::to_string(i + 1);
  return to_string(names);
}

std::string Poly::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    const auto& [e, c] = *it;
    Rational mag = abs(c);
    if (first) {
      if (c < 0) os << '-';
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    bool is_const = degreelab::polycore::total_degree(e) == 0;
    bool wrote = false;
    if (is_const || mag != 1) {
      os << rational_to_string(mag);
      wrote = true;
    }
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (wrote) os << '*';
      os << names[i];
      if (e[i] > 1) os << '^' << e[i];
      wrote = true;
    }
  }
  return os.str();
}

namespace {

double nearest_double(const Rational& q) {
  Interval enc = Interval::enclose(q);
  if (enc.lo == enc.hi || std::isinf(enc.lo) || std::isinf(enc.hi)) return q.get_d();
  Rational dlo = q - Rational(enc.lo);
  Rational dhi = Rational(enc.hi) - q;
  return dlo <= dhi ? enc.lo : enc.hi;
}

}  // namespace

CompiledPoly::CompiledPoly(const Poly& p) : nvars_(p.nvars()), max_degree_(p.nvars(), 0) {
  terms_.reserve(p.term_count());
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    for (std::size_t i = 0; i < nvars_; ++i) max_degree_[i] = std::max(max_degree_[i], e[i]);
    terms_.push_back({e, nearest_double(c), Interval::enclose(c)});
  }
}

double CompiledPoly::evaluate(std::span<const double> x) const {
  if (x.size() != nvars_) throw std::invalid_argument("CompiledPoly::evaluate: dimension mismatch");
  thread_local std::vector<std::vector<double>> powers;
  powers.resize(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    auto& row = powers[i];
    row.resize(max_degree_[i] + 1);
    row[0] = 1.0;
    for (unsigned k = 1; k <= max_degree_[i]; ++k) row[k] = row[k - 1] * x[i];
  }
  double sum = 0.0;
  for (const auto& t : terms_) {
    double v = t.coeff;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.exps[i]) v *= powers[i][t.exps[i]];
    }
    sum += v;
  }
  return sum;
}

Interval CompiledPoly::evaluate(std::span<const Interval> x) const {
  if (x.size() != nvars_) throw std::invalid_argument("CompiledPoly::evaluate: dimension mismatch");
  thread_local std::vector<std::vector<Interval>> powers;
  powers.resize(nvars_);
  for (std::size_t i = 0; i < nvars_; ++i) {
    auto& row = powers[i];
    row.resize(max_degree_[i] + 1);
    for (unsigned k = 0; k <= max_degree_[i]; ++k) row[k] = pow(x[i], k);
  }
  Interval sum(0.0);
  for (const auto& t : terms_) {
    Interval v = t.coeff_enclosure;
    for (std::size_t i = 0; i < nvars_; ++i) {
      if (t.exps[i]) v = v * powers[i][t.exps[i]];
    }
    sum = sum + v;
  }
  return sum;
}

}  // namespace degreelab::polycore
