#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "ayoz/field.hpp"
#include "ayoz/polynomial.hpp"

using namespace ayoz;

namespace {

Poly random_poly(std::mt19937& rng, int maxDeg, int bound = 5) {
  std::uniform_int_distribution<int> deg(0, maxDeg);
  std::uniform_int_distribution<int> coeff(-bound, bound);
  int d = deg(rng);
  std::vector<Rational> c(d + 1);
  for (auto& q : c) q = Rational(coeff(rng));
  return Poly(std::move(c));
}

// Independent factorization oracle (Kronecker interpolation): searches for a
// factor of degree <= deg(f)/2 by enumerating divisor tuples of the values
// of f at small integer points and interpolating.
std::vector<Integer> divisors_signed(const Integer& vIn) {
  Integer v = ::abs(vIn);
  std::vector<Integer> out;
  for (Integer d(1); d * d <= v; ++d) {
    if (mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t())) {
      out.push_back(d);
      out.push_back(-d);
      if (d * d != v) {
        out.push_back(v / d);
        out.push_back(-(v / d));
      }
    }
  }
  return out;
}

Poly lagrange(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  Poly acc;
  for (size_t i = 0; i < xs.size(); ++i) {
    Poly term = Poly::constant(1);
    Rational denom(1);
    for (size_t j = 0; j < xs.size(); ++j) {
      if (i == j) continue;
      term = term * Poly({-xs[j], Rational(1)});
      denom *= xs[i] - xs[j];
    }
    acc = acc + (ys[i] / denom) * term;
  }
  return acc;
}

void kronecker_factor(const Poly& fIn, std::vector<Poly>& out) {
  Poly f = fIn;
  if (f.degree() < 1) return;
  if (f.degree() == 1) {
    out.push_back(f.monic());
    return;
  }
  static const std::vector<Rational> points = {Rational(0), Rational(1), Rational(-1),
                                               Rational(2), Rational(-2), Rational(3)};
  // Strip roots at sample points first so all values are nonzero.
  for (const Rational& x : points) {
    while (f.degree() >= 1 && sgn(f.evaluate(x)) == 0) {
      f = f / Poly({-x, Rational(1)});
      out.push_back(Poly({-x, Rational(1)}));
      if (f.degree() == 0) return;
    }
  }
  if (f.degree() == 1) {
    out.push_back(f.monic());
    return;
  }
  auto [z, scale] = f.integer_primitive();
  (void)scale;
  Poly fz = poly_from_integers(z);
  int half = f.degree() / 2;
  for (int k = 1; k <= half; ++k) {
    std::vector<Rational> xs(points.begin(), points.begin() + k + 1);
    std::vector<std::vector<Integer>> divs;
    for (const Rational& x : xs) {
      Rational v = fz.evaluate(x);
      divs.push_back(divisors_signed(v.get_num()));
    }
    std::vector<size_t> idx(k + 1, 0);
    while (true) {
      std::vector<Rational> ys(k + 1);
      for (int i = 0; i <= k; ++i) ys[i] = Rational(divs[i][idx[i]]);
      Poly g = lagrange(xs, ys);
      if (g.degree() >= 1) {
        bool intcoeffs = true;
        for (const Rational& q : g.coeffs())
          if (q.get_den() != 1) intcoeffs = false;
        if (intcoeffs) {
          auto [q, r] = fz.divmod(g);
          if (r.is_zero()) {
            kronecker_factor(g, out);
            kronecker_factor(q, out);
            return;
          }
        }
      }
      int pos = k;
      while (pos >= 0 && ++idx[pos] == divs[pos].size()) idx[pos--] = 0;
      if (pos < 0) break;
    }
  }
  out.push_back(f.monic());  // irreducible
}

std::vector<Poly> oracle_monic_factors(const Poly& f) {
  std::vector<Poly> out;
  kronecker_factor(f, out);
  for (auto& g : out) g = g.monic();
  std::sort(out.begin(), out.end(), [](const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = a.degree(); i >= 0; --i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  });
  return out;
}

}  // namespace

TEST_CASE("divmod inverts multiplication") {
  std::mt19937 rng(101);
  for (int i = 0; i < 500; ++i) {
    Poly f = random_poly(rng, 4), g = random_poly(rng, 4);
    if (g.is_zero()) continue;
    auto [q, r] = (f * g).divmod(g);
    REQUIRE(r.is_zero());
    REQUIRE(q == f);
    Poly h = random_poly(rng, 3);
    auto [q2, r2] = (f * g + h).divmod(g);
    REQUIRE(q2 * g + r2 == f * g + h);
    REQUIRE(r2.degree() < g.degree());
  }
}

TEST_CASE("gcd and squarefree decomposition") {
  Poly f({-1, 0, 1});      // x^2 - 1
  Poly g({1, 2, 1});       // (x+1)^2
  CHECK(gcd(f, g) == Poly({1, 1}));
  Poly h = f * f * g;      // (x-1)^2 (x+1)^4
  auto sq = squarefree_decomposition(h);
  REQUIRE(sq.size() == 2);
  CHECK(sq[0].first == Poly({-1, 1}));
  CHECK(sq[0].second == 2);
  CHECK(sq[1].first == Poly({1, 1}));
  CHECK(sq[1].second == 4);
  Poly rebuilt = Poly::constant(1);
  for (auto& [p, m] : sq)
    for (int i = 0; i < m; ++i) rebuilt = rebuilt * p;
  CHECK(rebuilt == h.monic());
}

TEST_CASE("sturm counting") {
  Poly f = Poly({-2, 0, 1}) * Poly({-1, 1});  // (x^2-2)(x-1)
  CHECK(sturm_count(f, Rational(-2), Rational(2)) == 3);
  CHECK(sturm_count(f, Rational(0), Rational(2)) == 2);
  CHECK(sturm_count(f, Rational(11, 10), Rational(2)) == 1);
  CHECK(sturm_count(f, Rational(3), Rational(4)) == 0);
  CHECK(sturm_count(f, Rational(0), Rational(1)) == 1);  // counts root at hi
}

TEST_CASE("eisenstein criterion") {
  CHECK(eisenstein_check(Poly({-2, 0, 0, 1}), 2));        // x^3 - 2
  CHECK_FALSE(eisenstein_check(Poly({-1, 0, 0, 1}), 2));  // x^3 - 1
  Poly q({-1, 0, 1, 0, 1, 0, 1});                         // x^6 + x^4 + x^2 - 1
  CHECK_FALSE(eisenstein_check(q, 2));
  auto hit = eisenstein_shift_search(q);
  REQUIRE(hit.has_value());
  CHECK(hit->first == 2);
  CHECK(hit->second == 1);
}

TEST_CASE("factorization matches the interpolation oracle") {
  std::mt19937 rng(424242);
  int tested = 0;
  while (tested < 300) {
    Poly f = random_poly(rng, 4);
    if (f.degree() < 1) continue;
    ++tested;
    auto lib = factorize(f);
    // library result multiset, flattened by multiplicity
    std::vector<Poly> flat;
    for (const auto& [g, m] : lib.factors)
      for (int i = 0; i < m; ++i) flat.push_back(g);
    std::sort(flat.begin(), flat.end(), [](const Poly& a, const Poly& b) {
      if (a.degree() != b.degree()) return a.degree() < b.degree();
      for (int i = a.degree(); i >= 0; --i)
        if (a[i] != b[i]) return a[i] < b[i];
      return false;
    });
    auto oracle = oracle_monic_factors(f);
    REQUIRE(flat.size() == oracle.size());
    for (size_t i = 0; i < flat.size(); ++i) REQUIRE(flat[i] == oracle[i]);
    // reconstruction
    Poly rebuilt = Poly::constant(lib.unit);
    for (const auto& [g, m] : lib.factors)
      for (int i = 0; i < m; ++i) rebuilt = rebuilt * g;
    REQUIRE(rebuilt == f);
  }
}

TEST_CASE("irreducibility of named polynomials") {
  IrreducibilityCertificate cert;
  CHECK(is_irreducible(Poly({-1, -1, -1, 1}), &cert));  // x^3 - x^2 - x - 1
  CHECK(is_irreducible(Poly({-1, 1, 1, 1})));           // x^3 + x^2 + x - 1
  CHECK(is_irreducible(Poly({-7, 19, -5, 1})));
  CHECK_FALSE(is_irreducible(Poly({-1, 0, 1})));
  CHECK_FALSE(is_irreducible(Poly({2})));
}

TEST_CASE("minimal polynomials of field elements") {
  FieldElement a = FieldElement::alpha();
  CHECK(minimal_polynomial(a) == Poly({-1, 1, 1, 1}));
  CHECK(minimal_polynomial(FieldElement(1) - Rational(2) * a * a) == Poly({-7, 19, -5, 1}));
  CHECK(minimal_polynomial(a * a) == Poly({-1, 3, 1, 1}));
  CHECK(minimal_polynomial(FieldElement(Rational(2), Rational(-4), Rational(1))) ==
        Poly({-7, 59, -9, 1}));
  CHECK(minimal_polynomial(FieldElement(Rational(5, 3))) == Poly({Rational(-5, 3), 1}));
  // verify the defining property on random elements
  std::mt19937 rng(77);
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> coeff(-5, 5);
    FieldElement x(Rational(coeff(rng)), Rational(coeff(rng)), Rational(coeff(rng)));
    Poly m = minimal_polynomial(x);
    REQUIRE(m.evaluate(x).is_zero());
    REQUIRE((m.degree() == 1) == x.is_rational());
  }
}

TEST_CASE("eigenvalue minimal polynomials") {
  FieldElement a = FieldElement::alpha();
  auto r1 = eigenvalue_minpoly(FieldElement(1) + Rational(2) * a + a * a, FieldElement(1));
  CHECK(r1.minpoly == Poly({-1, -1, -1, 1}));
  auto r2 = eigenvalue_minpoly(
      FieldElement(Rational(-72), Rational(-62), Rational(-40)), FieldElement(1));
  CHECK(r2.minpoly == Poly({1, 114, -409, 604, -409, 114, 1}));
  CHECK(is_irreducible(r2.minpoly));
  auto r3 = eigenvalue_minpoly(FieldElement(2), FieldElement(1));
  CHECK(r3.minpoly == Poly({-1, 1}));
}

TEST_CASE("minimal polynomials of square roots") {
  FieldElement a = FieldElement::alpha();
  auto s1 = minpoly_of_sqrt(a);
  CHECK(s1.minpoly == Poly({-1, 0, 1, 0, 1, 0, 1}));
  CHECK(s1.certificate.method.find("eisenstein") != std::string::npos);
  auto s2 = minpoly_of_sqrt(FieldElement(1) - Rational(2) * a * a);
  CHECK(s2.minpoly == Poly({-7, 0, 19, 0, -5, 0, 1}));
  CHECK(is_irreducible(s2.minpoly));
  auto s3 = minpoly_of_sqrt(FieldElement(4));
  CHECK(s3.minpoly == Poly({-2, 1}));
  auto s4 = minpoly_of_sqrt(FieldElement(0));
  CHECK(s4.minpoly == Poly({0, 1}));
}

TEST_CASE("squares in the field") {
  FieldElement a = FieldElement::alpha();
  auto r1 = fe_sqrt_in_field(a * a);
  REQUIRE(r1.has_value());
  CHECK(*r1 == a);
  auto r2 = fe_sqrt_in_field((FieldElement(1) + a) * (FieldElement(1) + a));
  REQUIRE(r2.has_value());
  CHECK(*r2 == FieldElement(1) + a);
  CHECK_FALSE(fe_sqrt_in_field(Rational(4) * a).has_value());
  CHECK_FALSE(fe_sqrt_in_field(FieldElement(2)).has_value());
  CHECK(fe_sqrt_in_field(FieldElement(Rational(9, 4))).has_value());
  std::mt19937 rng(99);
  for (int i = 0; i < 60; ++i) {
    std::uniform_int_distribution<int> coeff(-3, 3);
    FieldElement x(Rational(coeff(rng)), Rational(coeff(rng)), Rational(coeff(rng)));
    FieldElement sq = x * x;
    auto root = fe_sqrt_in_field(sq);
    REQUIRE(root.has_value());
    REQUIRE(*root * *root == sq);
  }
}

TEST_CASE("distinct sqrt extensions") {
  FieldElement a = FieldElement::alpha();
  FieldElement x = Rational(4) * a;
  FieldElement y = FieldElement(Rational(-8), Rational(12), Rational(8));
  CHECK(y.sign() > 0);
  CHECK(sqrt_extension_distinct(x, y));
  CHECK_FALSE(sqrt_extension_distinct(x, Rational(16) * a));  // product 64 a^2 is a square
  CHECK(sqrt_extension_distinct(FieldElement(4), x));  // trivial vs quadratic
}

TEST_CASE("resultants") {
  CHECK(resultant(Poly({-1, 0, 1}), Poly({-4, 0, 1})) == Rational(9));
  CHECK(resultant(Poly({-1, 1}), Poly({1, 1})) == Rational(2));
  // resultant of f and f' detects repeated roots via discriminant-like zero
  Poly f({1, 2, 1});  // (x+1)^2
  CHECK(resultant(f, f.derivative()) == Rational(0));
}
