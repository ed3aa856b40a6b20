#include "degreelab/polymap.hpp"

#include <mutex>
#include <stdexcept>

namespace degreelab::mapforms {

struct PolyMap::Cache {
  std::once_flag jacobian_once;
  std::once_flag det_once;
  PolyMatrix jacobian;
  std::optional<Poly> det;
};

PolyMap::PolyMap(std::vector<Poly> components)
    : components_(std::move(components)), cache_(std::make_shared<Cache>()) {
  if (components_.empty()) throw std::invalid_argument("PolyMap: no components");
  for (const auto& c : components_) {
    if (c.nvars() != components_.size()) {
      throw std::invalid_argument("PolyMap: every component must have nvars = n");
    }
  }
}

PolyMap PolyMap::identity(std::size_t n) {
  std::vector<Poly> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(Poly::variable(n, i));
  return PolyMap(std::move(c));
}

PolyMap PolyMap::parse(const std::vector<std::string>& components) {
  std::vector<Poly> c;
  for (const auto& s : components) c.push_back(polycore::parse_poly(s, components.size()));
  return PolyMap(std::move(c));
}

const PolyMatrix& PolyMap::jacobian() const {
  std::call_once(cache_->jacobian_once, [this] {
    const std::size_t n = components_.size();
    PolyMatrix j(n);
    for (std::size_t i = 0; i < n; ++i) {
      j[i].reserve(n);
      for (std::size_t k = 0; k < n; ++k) j[i].push_back(components_[i].diff(k));
    }
    cache_->jacobian = std::move(j);
  });
  return cache_->jacobian;
}

const Poly& PolyMap::jacobian_det() const {
  std::call_once(cache_->det_once, [this] {
    const auto& j = jacobian();
    cache_->det = j.size() <= 4 ? cofactor_determinant(j) : bareiss_determinant(j);
  });
  return *cache_->det;
}

std::vector<Rational> PolyMap::evaluate(std::span<const Rational> x) const {
  std::vector<Rational> out;
  out.reserve(n());
  for (const auto& c : components_) out.push_back(c.evaluate(x));
  return out;
}

std::vector<double> PolyMap::evaluate(std::span<const double> x) const {
  std::vector<double> out;
  out.reserve(n());
  for (const auto& c : components_) out.push_back(c.evaluate(x));
  return out;
}

PolyMap PolyMap::compose(const PolyMap& inner) const {
  if (inner.n() != n()) throw std::invalid_argument("PolyMap::compose: dimension mismatch");
  std::vector<Poly> c;
  for (const auto& p : components_) c.push_back(p.compose(inner.components_));
  return PolyMap(std::move(c));
}

PolyMap PolyMap::shifted(std::span<const Rational> z) const {
  if (z.size() != n()) throw std::invalid_argument("PolyMap::shifted: dimension mismatch");
  std::vector<Poly> c = components_;
  for (std::size_t i = 0; i < n(); ++i) c[i] -= Poly::constant(n(), z[i]);
  return PolyMap(std::move(c));
}

PolyMatrix jacobian_matrix(const PolyMap& f) { return f.jacobian(); }

Poly jacobian_det(const PolyMap& f) { return f.jacobian_det(); }

namespace {

template <class R>
R cofactor_impl(const std::vector<std::vector<R>>& m, std::vector<std::size_t>& cols, std::size_t row) {
  const std::size_t k = cols.size();
  if (k == 1) return m[row][cols[0]];
  if (k == 2) return m[row][cols[0]] * m[row + 1][cols[1]] - m[row][cols[1]] * m[row + 1][cols[0]];
  R acc = m[row][cols[0]] - m[row][cols[0]];  // zero of the right shape
  for (std::size_t j = 0; j < k; ++j) {
    const R& entry = m[row][cols[j]];
    if (entry == entry - entry) continue;
    std::size_t c = cols[j];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(j));
    R minor = cofactor_impl(m, cols, row + 1);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(j), c);
    if (j % 2 == 0) acc += entry * minor;
    else acc -= entry * minor;
  }
  return acc;
}

template <class R>
R cofactor_det(const std::vector<std::vector<R>>& m) {
  if (m.empty()) throw std::invalid_argument("determinant: empty matrix");
  for (const auto& row : m) {
    if (row.size() != m.size()) throw std::invalid_argument("determinant: matrix not square");
  }
  std::vector<std::size_t> cols(m.size());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  return cofactor_impl(m, cols, 0);
}

}  // namespace

Poly cofactor_determinant(const PolyMatrix& m) { return cofactor_det(m); }

Poly bareiss_determinant(PolyMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("determinant: empty matrix");
  for (const auto& row : m) {
    if (row.size() != n) throw std::invalid_argument("determinant: matrix not square");
  }
  const std::size_t nv = m[0][0].nvars();
  Poly prev = Poly::constant(nv, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t p = k + 1;
      while (p < n && m[p][k].is_zero()) ++p;
      if (p == n) return Poly(nv);
      std::swap(m[k], m[p]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).divide_exact(prev);
      }
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

std::string to_string(KellerKind k) {
  switch (k) {
    case KellerKind::nonzero_constant: return "nonzero_constant";
    case KellerKind::zero_constant: return "zero_constant";
    case KellerKind::nonconstant: return "nonconstant";
    case KellerKind::identically_zero: return "identically_zero";
  }
  return "?";
}

KellerStatus keller_check(const PolyMap& f) {
  const Poly& det = f.jacobian_det();
  if (det.is_zero()) return {KellerKind::identically_zero, Rational(0)};
  if (!det.is_constant()) return {KellerKind::nonconstant, std::nullopt};
  // A nonempty constant polynomial has a nonzero coefficient; zero_constant
  // is kept for callers that build KellerStatus from evaluated constants.
  Rational c = det.constant_term();
  if (c == 0) return {KellerKind::zero_constant, c};
  return {KellerKind::nonzero_constant, c};
}

std::map<unsigned, PolyMap> decompose_homogeneous(const PolyMap& f) {
  unsigned max_deg = 0;
  for (const auto& c : f.components()) max_deg = std::max(max_deg, c.total_degree());
  std::map<unsigned, PolyMap> out;
  for (unsigned d = 0; d <= max_deg; ++d) {
    std::vector<Poly> parts;
    bool any = false;
    for (const auto& c : f.components()) {
      parts.push_back(c.homogeneous_component(d));
      any = any || !parts.back().is_zero();
    }
    if (any) out.emplace(d, PolyMap(std::move(parts)));
  }
  return out;
}

std::string to_string(Form f) {
  switch (f) {
    case Form::cubic_homogeneous: return "cubic_homogeneous";
    case Form::druzkowski: return "druzkowski";
    case Form::neither: return "neither";
  }
  return "?";
}

namespace {

std::optional<mpz_class> exact_cbrt(const mpz_class& v) {
  mpz_class mag = abs(v), root;
  if (mpz_root(root.get_mpz_t(), mag.get_mpz_t(), 3) == 0) return std::nullopt;
  return v < 0 ? mpz_class(-root) : root;
}

std::optional<Rational> exact_cbrt(const Rational& q) {
  auto num = exact_cbrt(q.get_num());
  auto den = exact_cbrt(q.get_den());
  if (!num || !den) return std::nullopt;
  Rational r(*num, *den);
  r.canonicalize();
  return r;
}

// Recovers l with l^3 = h from the x_p^3 and x_p^2 x_k coefficients, where p
// is the first variable carrying a pure cube; then verifies exactly.
std::optional<std::vector<Rational>> linear_cube_root(const Poly& h) {
  const std::size_t n = h.nvars();
  std::optional<std::size_t> pivot;
  Rational a_p;
  for (std::size_t p = 0; p < n && !pivot; ++p) {
    polycore::Exponent e(n, 0);
    e[p] = 3;
    Rational c = h.coeff(e);
    if (c != 0) {
      auto r = exact_cbrt(c);
      if (!r) return std::nullopt;
      pivot = p;
      a_p = *r;
    }
  }
  if (!pivot) return std::nullopt;
  std::vector<Rational> a(n, Rational(0));
  a[*pivot] = a_p;
  for (std::size_t k = 0; k < n; ++k) {
    if (k == *pivot) continue;
    polycore::Exponent e(n, 0);
    e[*pivot] = 2;
    e[k] = 1;
    a[k] = h.coeff(e) / (3 * a_p * a_p);
  }
  Poly l(n);
  for (std::size_t k = 0; k < n; ++k) l += Poly::variable(n, k) * a[k];
  if (l.pow(3) != h) return std::nullopt;
  return a;
}

}  // namespace

FormWitness recognize_form(const PolyMap& f) {
  const std::size_t n = f.n();
  FormWitness w;
  w.linear_part_identity = true;
  bool cubic = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Poly& c = f[i];
    if (c.homogeneous_component(1) != Poly::variable(n, i)) w.linear_part_identity = false;
    for (const auto& [e, coef] : c.terms()) {
      unsigned d = polycore::total_degree(e);
      if (d != 1 && d != 3) cubic = false;
    }
  }
  if (!w.linear_part_identity || !cubic) return w;
  w.form = Form::cubic_homogeneous;

  RationalMatrix a(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    Poly h = f[i].homogeneous_component(3);
    if (h.is_zero()) continue;
    auto row = linear_cube_root(h);
    if (!row) return w;
    a[i] = std::move(*row);
  }
  w.form = Form::druzkowski;
  w.druzkowski_matrix = std::move(a);
  return w;
}

std::vector<Rational> euler_cubic_identity_check(const PolyMap& f, std::span<const Rational> a) {
  if (a.size() != f.n()) throw std::invalid_argument("euler_cubic_identity_check: dimension mismatch");
  if (recognize_form(f).form == Form::neither) {
    throw FormViolation("euler_cubic_identity_check: map is not of cubic homogeneous form");
  }
  const std::size_t n = f.n();
  const Rational t0_sq(1, 3);
  const auto& jac = f.jacobian();

  // JF(t a) = sum_d t^d J_(d)(a); the form guarantees d in {0, 2}.
  RationalMatrix jt(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      for (const auto& [e, c] : jac[i][k].terms()) {
        unsigned d = polycore::total_degree(e);
        if (d % 2 != 0) throw FormViolation("euler_cubic_identity_check: odd-degree Jacobian term");
        Rational scale = 1;
        for (unsigned s = 0; s < d / 2; ++s) scale *= t0_sq;
        Rational mono = c * scale;
        for (std::size_t v = 0; v < n; ++v) {
          for (unsigned p = 0; p < e[v]; ++p) mono *= a[v];
        }
        jt[i][k] += mono;
      }
    }
  }
  std::vector<Rational> residual = f.evaluate(a);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) residual[i] -= jt[i][k] * a[k];
  }
  return residual;
}

ComplexPoly& ComplexPoly::operator+=(const ComplexPoly& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ComplexPoly& ComplexPoly::operator-=(const ComplexPoly& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexPoly complex_jacobian_det(const ComplexPolyMap& f) {
  const std::size_t n = f.size();
  std::vector<std::vector<ComplexPoly>> j(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i].re.nvars() != n || f[i].im.nvars() != n) {
      throw std::invalid_argument("complex_jacobian_det: component variable count must equal n");
    }
    for (std::size_t k = 0; k < n; ++k) j[i].push_back(f[i].diff(k));
  }
  return cofactor_det(j);
}

ComplexPoly realify_poly(const ComplexPoly& p) {
  const std::size_t n = p.re.nvars();
  const std::size_t m = 2 * n;
  // Powers of z_k = x_k + i y_k as real/imaginary pairs.
  std::vector<std::vector<ComplexPoly>> zpow(n);
  for (std::size_t k = 0; k < n; ++k) {
    unsigned d = std::max(p.re.degree_in(k), p.im.degree_in(k));
    ComplexPoly z(Poly::variable(m, 2 * k), Poly::variable(m, 2 * k + 1));
    zpow[k].emplace_back(Poly::constant(m, 1), Poly(m));
    for (unsigned e = 1; e <= d; ++e) zpow[k].push_back(zpow[k].back() * z);
  }
  auto lift = [&](const polycore::Exponent& e) {
    ComplexPoly acc(Poly::constant(m, 1), Poly(m));
    for (std::size_t k = 0; k < n; ++k) {
      if (e[k]) acc = acc * zpow[k][e[k]];
    }
    return acc;
  };
  ComplexPoly out(m);
  for (const auto& [e, c] : p.re.terms()) {
    ComplexPoly t = lift(e);
    out.re += t.re * c;
    out.im += t.im * c;
  }
  for (const auto& [e, c] : p.im.terms()) {
    // i*c*(u + i v) = -c v + i c u
    ComplexPoly t = lift(e);
    out.re -= t.im * c;
    out.im += t.re * c;
  }
  return out;
}

PolyMap realify(const ComplexPolyMap& f) {
  std::vector<Poly> out;
  for (const auto& c : f) {
    if (c.re.nvars() != f.size() || c.im.nvars() != f.size()) {
      throw std::invalid_argument("realify: component variable count must equal n");
    }
    ComplexPoly r = realify_poly(c);
    out.push_back(std::move(r.re));
    out.push_back(std::move(r.im));
  }
  return PolyMap(std::move(out));
}

}  // namespace degreelab::mapforms
