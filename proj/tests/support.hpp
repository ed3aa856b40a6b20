#pragma once

#include <random>
#include <vector>

#include "degreelab/polymap.hpp"

namespace testsupport {

using degreelab::mapforms::ComplexPoly;
using degreelab::mapforms::ComplexPolyMap;
using degreelab::mapforms::PolyMap;
using degreelab::polycore::Exponent;
using degreelab::polycore::Poly;
using degreelab::polycore::Rational;

inline Rational small_rational(std::mt19937_64& rng, int num = 5, int den = 3) {
  std::uniform_int_distribution<int> n(-num, num), d(1, den);
  Rational q(n(rng), d(rng));
  q.canonicalize();
  return q;
}

inline int small_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// Random polynomial with `terms` monomials of total degree <= max_deg,
/// restricted to the listed variables.
inline Poly random_poly(std::mt19937_64& rng, std::size_t nvars, unsigned max_deg, int terms,
                        std::vector<std::size_t> vars = {}) {
  if (vars.empty()) {
    for (std::size_t i = 0; i < nvars; ++i) vars.push_back(i);
  }
  Poly p(nvars);
  for (int k = 0; k < terms; ++k) {
    Exponent e(nvars, 0);
    unsigned deg = static_cast<unsigned>(small_int(rng, 0, static_cast<int>(max_deg)));
    for (unsigned d = 0; d < deg; ++d) e[vars[static_cast<std::size_t>(small_int(rng, 0, static_cast<int>(vars.size()) - 1))]]++;
    p += Poly::monomial(e, small_rational(rng));
  }
  return p;
}

/// Homogeneous polynomial of degree d with random coefficients.
inline Poly random_homogeneous(std::mt19937_64& rng, std::size_t nvars, unsigned d, int terms) {
  Poly p(nvars);
  for (int k = 0; k < terms; ++k) {
    Exponent e(nvars, 0);
    for (unsigned j = 0; j < d; ++j) e[static_cast<std::size_t>(small_int(rng, 0, static_cast<int>(nvars) - 1))]++;
    p += Poly::monomial(e, small_rational(rng));
  }
  return p;
}

inline std::vector<Rational> random_point(std::mt19937_64& rng, std::size_t n, int num = 5, int den = 4) {
  std::vector<Rational> x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(small_rational(rng, num, den));
  return x;
}

/// x_i + p_i(x_{i+1}, ..., x_n): unit upper triangular, hence a polynomial automorphism.
inline PolyMap random_upper_triangular(std::mt19937_64& rng, std::size_t n, unsigned max_deg, int terms) {
  std::vector<Poly> c;
  for (std::size_t i = 0; i < n; ++i) {
    Poly p = Poly::variable(n, i);
    std::vector<std::size_t> later;
    for (std::size_t j = i + 1; j < n; ++j) later.push_back(j);
    if (!later.empty()) p += random_poly(rng, n, max_deg, terms, later);
    c.push_back(p);
  }
  return PolyMap(c);
}

/// x_i + p_i(x_1, ..., x_{i-1}).
inline PolyMap random_lower_triangular(std::mt19937_64& rng, std::size_t n, unsigned max_deg, int terms) {
  std::vector<Poly> c;
  for (std::size_t i = 0; i < n; ++i) {
    Poly p = Poly::variable(n, i);
    std::vector<std::size_t> earlier;
    for (std::size_t j = 0; j < i; ++j) earlier.push_back(j);
    if (!earlier.empty()) p += random_poly(rng, n, max_deg, terms, earlier);
    c.push_back(p);
  }
  return PolyMap(c);
}

/// Upper triangular composed with lower triangular: a Keller automorphism
/// that is not itself triangular.
inline PolyMap random_composed_triangular(std::mt19937_64& rng, std::size_t n, unsigned max_deg, int terms) {
  return random_upper_triangular(rng, n, max_deg, terms).compose(random_lower_triangular(rng, n, max_deg, terms));
}

/// x + (A x)^3 componentwise with A strictly upper triangular (nilpotent).
inline PolyMap random_nilpotent_druzkowski(std::mt19937_64& rng, std::size_t n, int num = 2, int den = 2) {
  std::vector<Poly> c;
  for (std::size_t i = 0; i < n; ++i) {
    Poly l(n);
    for (std::size_t j = i + 1; j < n; ++j) l += Poly::variable(n, j) * small_rational(rng, num, den);
    c.push_back(Poly::variable(n, i) + l.pow(3));
  }
  return PolyMap(c);
}

/// x + H with H homogeneous cubic (not necessarily Keller).
inline PolyMap random_cubic_form(std::mt19937_64& rng, std::size_t n) {
  std::vector<Poly> c;
  for (std::size_t i = 0; i < n; ++i) {
    c.push_back(Poly::variable(n, i) + random_homogeneous(rng, n, 3, small_int(rng, 0, 4)));
  }
  return PolyMap(c);
}

inline ComplexPolyMap random_complex_map(std::mt19937_64& rng, std::size_t n, unsigned max_deg) {
  ComplexPolyMap f;
  for (std::size_t i = 0; i < n; ++i) {
    f.emplace_back(random_poly(rng, n, max_deg, 3), random_poly(rng, n, max_deg, 3));
  }
  return f;
}

}  // namespace testsupport
