#pragma once

// Exact arithmetic in the cubic number field Q(alpha), where alpha is the
// unique real root of x^3 + x^2 + x - 1 (alpha lies in [1/2, 5/9]).
// Elements are stored as rational triples (a, b, c) meaning a + b*alpha +
// c*alpha^2, kept canonical by eager reduction with alpha^3 = 1 - alpha -
// alpha^2. Signs and comparisons are exact, decided by interval bisection
// on the isolating interval of alpha.

#include <gmpxx.h>

#include <array>
#include <cctype>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ayoz {

using Integer = mpz_class;
using Rational = mpq_class;

inline int sgn(const Rational& q) { return mpq_sgn(q.get_mpq_t()); }
inline int sgn(const Integer& z) { return mpz_sgn(z.get_mpz_t()); }

inline Rational rational_from_string(std::string_view s) {
  mpq_class q;
  if (q.set_str(std::string(s), 10) != 0)
    throw std::invalid_argument("bad rational literal: " + std::string(s));
  q.canonicalize();
  return q;
}

inline std::string to_string(const Rational& q) { return q.get_str(); }

inline Integer floor_div(const Integer& num, const Integer& den) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return q;
}

inline Integer rational_floor(const Rational& q) {
  return floor_div(q.get_num(), q.get_den());
}

namespace detail {

// Shared isolating interval for alpha, refined on demand and cached.
// m(x) = x^3 + x^2 + x - 1 is strictly increasing, m(1/2) < 0 < m(5/9).
struct AlphaEnclosure {
  Rational lo{1, 2};
  Rational hi{5, 9};

  static int minpoly_sign(const Rational& x) {
    Rational v = ((x + 1) * x + 1) * x - 1;
    return sgn(v);
  }

  void refine_once() {
    Rational mid = (lo + hi) / 2;
    if (minpoly_sign(mid) < 0)
      lo = mid;
    else
      hi = mid;
  }

  void refine_below(const Rational& width) {
    while (hi - lo >= width) refine_once();
  }

  static AlphaEnclosure& shared() {
    static AlphaEnclosure e;
    return e;
  }
};

}  // namespace detail

class FieldElement {
 public:
  FieldElement() : a_(0), b_(0), c_(0) {}
  FieldElement(const Rational& a) : a_(a), b_(0), c_(0) {}
  FieldElement(long a) : a_(a), b_(0), c_(0) {}
  FieldElement(int a) : a_(a), b_(0), c_(0) {}
  FieldElement(Rational a, Rational b, Rational c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  static FieldElement alpha() { return FieldElement(0, 1, 0); }
  static FieldElement alpha2() { return FieldElement(0, 0, 1); }

  const Rational& coeff0() const { return a_; }
  const Rational& coeff1() const { return b_; }
  const Rational& coeff2() const { return c_; }

  bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0 && sgn(c_) == 0; }
  bool is_rational() const { return sgn(b_) == 0 && sgn(c_) == 0; }
  bool is_one() const { return is_rational() && a_ == 1; }

  // The rational value when is_rational() holds.
  const Rational& rational_value() const {
    if (!is_rational()) throw std::logic_error("value is not rational");
    return a_;
  }

  friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
    return FieldElement(x.a_ + y.a_, x.b_ + y.b_, x.c_ + y.c_);
  }
  friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
    return FieldElement(x.a_ - y.a_, x.b_ - y.b_, x.c_ - y.c_);
  }
  FieldElement operator-() const { return FieldElement(-a_, -b_, -c_); }

  friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
    // alpha^3 = 1 - alpha - alpha^2, alpha^4 = 2*alpha - 1.
    Rational d3 = x.b_ * y.c_ + x.c_ * y.b_;
    Rational d4 = x.c_ * y.c_;
    return FieldElement(x.a_ * y.a_ + d3 - d4,
                        x.a_ * y.b_ + x.b_ * y.a_ - d3 + 2 * d4,
                        x.a_ * y.c_ + x.b_ * y.b_ + x.c_ * y.a_ - d3);
  }

  FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
  FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
  FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }
  FieldElement& operator/=(const FieldElement& y) { return *this = *this / y; }

  // Multiplication-by-x matrix in the basis {1, alpha, alpha^2}; column j is
  // x * alpha^j.
  std::array<std::array<Rational, 3>, 3> times_matrix() const {
    return {{{a_, c_, b_ - c_},
             {b_, a_ - c_, 2 * c_ - b_},
             {c_, b_ - c_, a_ - b_}}};
  }

  FieldElement inverse() const {
    if (is_zero()) throw std::domain_error("division by zero field element");
    if (is_rational()) return FieldElement(Rational(1) / a_);
    auto m = times_matrix();
    // Solve m * y = e0 by Cramer's rule.
    auto det3 = [](const std::array<std::array<Rational, 3>, 3>& t) -> Rational {
      return t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
             t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
             t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0]);
    };
    Rational det = det3(m);
    if (sgn(det) == 0) throw std::logic_error("singular multiplication matrix");
    std::array<std::array<Rational, 3>, 3> m0 = m, m1 = m, m2 = m;
    for (int r = 0; r < 3; ++r) {
      m0[r][0] = (r == 0) ? 1 : 0;
      m1[r][1] = (r == 0) ? 1 : 0;
      m2[r][2] = (r == 0) ? 1 : 0;
    }
    return FieldElement(det3(m0) / det, det3(m1) / det, det3(m2) / det);
  }

  friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
    return x * y.inverse();
  }

  // Exact sign. A nonzero quadratic in alpha cannot vanish (the minimal
  // polynomial of alpha has degree 3), so the interval test terminates.
  int sign() const {
    if (is_rational()) return sgn(a_);
    auto& enc = detail::AlphaEnclosure::shared();
    while (true) {
      auto [plo, phi] = bounds_over(enc.lo, enc.hi);
      if (sgn(plo) > 0) return 1;
      if (sgn(phi) < 0) return -1;
      enc.refine_once();
    }
  }

  bool operator==(const FieldElement& y) const {
    return a_ == y.a_ && b_ == y.b_ && c_ == y.c_;
  }
  bool operator!=(const FieldElement& y) const { return !(*this == y); }
  std::strong_ordering operator<=>(const FieldElement& y) const {
    int s = (*this - y).sign();
    if (s < 0) return std::strong_ordering::less;
    if (s > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  FieldElement abs() const { return sign() < 0 ? -*this : *this; }

  FieldElement pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElement r(1), base = *this;
    while (e > 0) {
      if (e & 1) r *= base;
      base *= base;
      e >>= 1;
    }
    return r;
  }

  // Rational enclosure [lo, hi] of the value with hi - lo < width.
  std::pair<Rational, Rational> enclosure(const Rational& width) const {
    if (is_rational()) return {a_, a_};
    auto& enc = detail::AlphaEnclosure::shared();
    while (true) {
      auto [plo, phi] = bounds_over(enc.lo, enc.hi);
      if (phi - plo < width) return {plo, phi};
      enc.refine_once();
    }
  }

  Integer floor() const {
    if (is_rational()) return rational_floor(a_);
    auto [lo, hi] = enclosure(Rational(1, 4));
    Integer n = rational_floor(lo);
    while ((*this - FieldElement(Rational(n + 1))).sign() >= 0) n += 1;
    while ((*this - FieldElement(Rational(n))).sign() < 0) n -= 1;
    return n;
  }

  // frac(x) = x - floor(x), in [0, 1).
  FieldElement frac() const { return *this - FieldElement(Rational(floor())); }

  double to_double() const {
    auto [lo, hi] = enclosure(Rational(Integer(1), Integer(1) << 64));
    Rational mid = (lo + hi) / 2;
    return mid.get_d();
  }

  std::string to_string() const {
    std::string out;
    auto term = [&out](const Rational& q, const char* mono) {
      if (sgn(q) == 0) return;
      if (out.empty()) {
        if (q == -1 && *mono) out += "-";
        else if (!(q == 1 && *mono)) out += q.get_str();
      } else {
        out += sgn(q) < 0 ? " - " : " + ";
        Rational aq = ::abs(q);
        if (!(aq == 1 && *mono)) out += aq.get_str();
      }
      if (*mono) {
        if (!out.empty() && out.back() != '-' && out.back() != ' ' &&
            (std::isdigit(static_cast<unsigned char>(out.back())) ||
             out.back() == '/'))
          out += "*";
        out += mono;
      }
    };
    term(a_, "");
    term(b_, "x");
    term(c_, "x^2");
    if (out.empty()) out = "0";
    return out;
  }

  // Parses sums of terms "q", "q*x", "q*x^k", "x", "x^k" with optional signs
  // and whitespace; "x" denotes alpha.
  static FieldElement parse(std::string_view text);

 private:
  // Interval bounds of a + b x + c x^2 over x in [lo, hi], 0 < lo <= hi.
  std::pair<Rational, Rational> bounds_over(const Rational& lo,
                                            const Rational& hi) const {
    Rational lo2 = lo * lo, hi2 = hi * hi;
    Rational pmin = a_, pmax = a_;
    if (sgn(b_) >= 0) {
      pmin += b_ * lo;
      pmax += b_ * hi;
    } else {
      pmin += b_ * hi;
      pmax += b_ * lo;
    }
    if (sgn(c_) >= 0) {
      pmin += c_ * lo2;
      pmax += c_ * hi2;
    } else {
      pmin += c_ * hi2;
      pmax += c_ * lo2;
    }
    return {pmin, pmax};
  }

  Rational a_, b_, c_;
};

inline FieldElement operator*(const Rational& q, const FieldElement& x) {
  return FieldElement(q) * x;
}
inline FieldElement operator*(const FieldElement& x, const Rational& q) {
  return FieldElement(q) * x;
}

inline FieldElement FieldElement::parse(std::string_view text) {
  size_t i = 0;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i])))
      ++i;
  };
  auto parse_uint = [&]() -> std::string {
    size_t start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])))
      ++i;
    if (i == start) throw std::invalid_argument("expected digits in: " + std::string(text));
    return std::string(text.substr(start, i - start));
  };
  FieldElement total;
  skip_ws();
  bool first = true;
  while (i < text.size()) {
    int sign = 1;
    skip_ws();
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
      skip_ws();
    } else if (!first) {
      throw std::invalid_argument("expected + or - in: " + std::string(text));
    }
    if (i >= text.size()) throw std::invalid_argument("dangling sign in: " + std::string(text));
    Rational coeff = 1;
    bool have_coeff = false;
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      std::string num = parse_uint();
      std::string lit = num;
      skip_ws();
      if (i < text.size() && text[i] == '/') {
        ++i;
        skip_ws();
        lit += "/" + parse_uint();
      }
      coeff = rational_from_string(lit);
      have_coeff = true;
      skip_ws();
      if (i < text.size() && text[i] == '*') {
        ++i;
        skip_ws();
      }
    }
    long power = 0;
    if (i < text.size() && (text[i] == 'x' || text[i] == 'a')) {
      ++i;
      power = 1;
      skip_ws();
      if (i < text.size() && text[i] == '^') {
        ++i;
        skip_ws();
        power = std::stol(parse_uint());
      }
    } else if (!have_coeff) {
      throw std::invalid_argument("expected term in: " + std::string(text));
    }
    FieldElement term(coeff * sign);
    total += term * FieldElement::alpha().pow(power);
    skip_ws();
    first = false;
  }
  if (first) throw std::invalid_argument("empty field element literal");
  return total;
}

}  // namespace ayoz
