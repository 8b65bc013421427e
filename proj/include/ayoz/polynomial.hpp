#pragma once

// Univariate polynomials over Q: exact arithmetic, squarefree decomposition,
// factorization into irreducibles with machine-checkable certificates
// (rational roots, reduction mod small primes, degree-pattern pruning, and
// Hensel lifting with Mignotte-bounded factor combination), resultants,
// Sturm root counting, and the minimal-polynomial helpers for elements of
// Q(alpha) and their square roots.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <map>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "field.hpp"
#include "linalg.hpp"

namespace ayoz {

// A square-root construction was asked for a value that is not positive.
struct NonPositive : std::domain_error {
  using std::domain_error::domain_error;
};

class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<Rational> lowToHigh) : c_(lowToHigh) { normalize(); }
  explicit Poly(std::vector<Rational> lowToHigh) : c_(std::move(lowToHigh)) { normalize(); }
  static Poly constant(const Rational& q) { return Poly({q}); }
  static Poly monomial(int degree, const Rational& q = 1) {
    std::vector<Rational> v(degree + 1, Rational(0));
    v[degree] = q;
    return Poly(std::move(v));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const Rational& operator[](int i) const { return c_[i]; }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& lc() const { return c_.back(); }

  bool operator==(const Poly& g) const { return c_ == g.c_; }

  friend Poly operator+(const Poly& f, const Poly& g) {
    std::vector<Rational> v(std::max(f.c_.size(), g.c_.size()), Rational(0));
    for (size_t i = 0; i < f.c_.size(); ++i) v[i] += f.c_[i];
    for (size_t i = 0; i < g.c_.size(); ++i) v[i] += g.c_[i];
    return Poly(std::move(v));
  }
  friend Poly operator-(const Poly& f, const Poly& g) {
    std::vector<Rational> v(std::max(f.c_.size(), g.c_.size()), Rational(0));
    for (size_t i = 0; i < f.c_.size(); ++i) v[i] += f.c_[i];
    for (size_t i = 0; i < g.c_.size(); ++i) v[i] -= g.c_[i];
    return Poly(std::move(v));
  }
  Poly operator-() const {
    std::vector<Rational> v = c_;
    for (auto& q : v) q = -q;
    return Poly(std::move(v));
  }
  friend Poly operator*(const Poly& f, const Poly& g) {
    if (f.is_zero() || g.is_zero()) return Poly();
    std::vector<Rational> v(f.c_.size() + g.c_.size() - 1, Rational(0));
    for (size_t i = 0; i < f.c_.size(); ++i)
      for (size_t j = 0; j < g.c_.size(); ++j) v[i + j] += f.c_[i] * g.c_[j];
    return Poly(std::move(v));
  }
  friend Poly operator*(const Rational& q, const Poly& f) {
    if (sgn(q) == 0) return Poly();
    std::vector<Rational> v = f.c_;
    for (auto& x : v) x *= q;
    return Poly(std::move(v));
  }

  // Quotient and remainder with remainder degree < deg(divisor).
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("polynomial division by zero");
    std::vector<Rational> rem = c_;
    int dd = d.degree();
    if (degree() < dd) return {Poly(), *this};
    std::vector<Rational> quot(degree() - dd + 1, Rational(0));
    for (int i = degree(); i >= dd; --i) {
      Rational f = rem[i] / d.c_[dd];
      if (sgn(f) == 0) continue;
      quot[i - dd] = f;
      for (int j = 0; j <= dd; ++j) rem[i - dd + j] -= f * d.c_[j];
    }
    return {Poly(std::move(quot)), Poly(std::move(rem))};
  }
  Poly operator/(const Poly& d) const {
    auto [q, r] = divmod(d);
    if (!r.is_zero()) throw std::domain_error("inexact polynomial division");
    return q;
  }

  Poly derivative() const {
    if (degree() < 1) return Poly();
    std::vector<Rational> v(c_.size() - 1);
    for (size_t i = 1; i < c_.size(); ++i) v[i - 1] = Rational(static_cast<long>(i)) * c_[i];
    return Poly(std::move(v));
  }

  Poly monic() const {
    if (is_zero()) return *this;
    return Rational(Rational(1) / lc()) * *this;
  }

  // p(X + shift).
  Poly shifted(const Rational& shift) const {
    Poly result;
    Poly lin({shift, Rational(1)});
    for (int i = degree(); i >= 0; --i) result = result * lin + Poly::constant(c_[i]);
    return result;
  }

  // p(q * X).
  Poly scaled_arg(const Rational& q) const {
    std::vector<Rational> v = c_;
    Rational f(1);
    for (size_t i = 1; i < v.size(); ++i) {
      f *= q;
      v[i] *= f;
    }
    return Poly(std::move(v));
  }

  // p(X^2).
  Poly compose_square() const {
    if (is_zero()) return Poly();
    std::vector<Rational> v(2 * c_.size() - 1, Rational(0));
    for (size_t i = 0; i < c_.size(); ++i) v[2 * i] = c_[i];
    return Poly(std::move(v));
  }

  template <class T>
  T evaluate(const T& x) const {
    T acc(Rational(0));
    for (int i = degree(); i >= 0; --i) acc = acc * x + T(c_[i]);
    return acc;
  }
  Rational evaluate(const Rational& x) const {
    Rational acc(0);
    for (int i = degree(); i >= 0; --i) acc = acc * x + c_[i];
    return acc;
  }

  // Primitive integer representation: returns (integer coefficients, scale)
  // with poly == scale * sum(z_i X^i), content 1 and positive leading term.
  std::pair<std::vector<Integer>, Rational> integer_primitive() const {
    if (is_zero()) return {{}, Rational(0)};
    Integer denlcm(1);
    for (const auto& q : c_) {
      Integer d = q.get_den();
      mpz_lcm(denlcm.get_mpz_t(), denlcm.get_mpz_t(), d.get_mpz_t());
    }
    std::vector<Integer> z(c_.size());
    Integer content(0);
    for (size_t i = 0; i < c_.size(); ++i) {
      Rational scaled = c_[i] * Rational(denlcm);
      z[i] = scaled.get_num();
      mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), z[i].get_mpz_t());
    }
    if (sgn(z.back()) < 0) content = -content;
    for (auto& zi : z) zi /= content;
    return {z, Rational(content) / Rational(denlcm)};
  }

  std::string to_string(const std::string& var = "X") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const Rational& q = c_[i];
      if (sgn(q) == 0) continue;
      Rational aq = ::abs(q);
      if (out.empty()) {
        if (sgn(q) < 0) out += "-";
      } else {
        out += sgn(q) < 0 ? " - " : " + ";
      }
      bool unit = (aq == 1) && i > 0;
      if (!unit) out += aq.get_str();
      if (i > 0) {
        if (!unit) out += "*";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void normalize() {
    while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
  }
  std::vector<Rational> c_;  // low to high
};

inline Poly poly_from_integers(const std::vector<Integer>& z) {
  std::vector<Rational> v(z.size());
  for (size_t i = 0; i < z.size(); ++i) v[i] = Rational(z[i]);
  return Poly(std::move(v));
}

inline Poly gcd(const Poly& f, const Poly& g) {
  Poly a = f, b = g;
  while (!b.is_zero()) {
    Poly r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.is_zero() ? a : a.monic();
}

// Yun's squarefree decomposition: returns (squarefree factor, multiplicity)
// pairs whose product with multiplicities is monic(f).
inline std::vector<std::pair<Poly, int>> squarefree_decomposition(const Poly& fIn) {
  Poly f = fIn.monic();
  std::vector<std::pair<Poly, int>> out;
  if (f.degree() < 1) return out;
  Poly df = f.derivative();
  Poly a = gcd(f, df);
  Poly b = f / a;
  Poly c = df / a;
  Poly d = c - b.derivative();
  int i = 1;
  while (b.degree() > 0) {
    Poly h = gcd(b, d);
    if (h.degree() > 0) out.push_back({h, i});
    b = b / h;
    c = d / h;
    d = c - b.derivative();
    ++i;
  }
  return out;
}

inline Poly squarefree_part(const Poly& f) {
  Poly g = f.monic();
  if (g.degree() < 1) return g;
  return g / gcd(g, g.derivative());
}

// ---------------------------------------------------------------------------
// Arithmetic mod small primes (Berlekamp factorization support).

namespace modp {

using PolyP = std::vector<long>;  // low to high, entries in [0, p)

inline void trim(PolyP& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}
inline int deg(const PolyP& f) { return static_cast<int>(f.size()) - 1; }

inline long inv_mod(long a, long p) {
  long t = 0, newt = 1, r = p, newr = a % p;
  while (newr != 0) {
    long q = r / newr;
    std::swap(t -= q * newt, newt);
    std::swap(r -= q * newr, newr);
  }
  return ((t % p) + p) % p;
}

inline PolyP mul(const PolyP& f, const PolyP& g, long p) {
  if (f.empty() || g.empty()) return {};
  PolyP h(f.size() + g.size() - 1, 0);
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size(); ++j)
      h[i + j] = (h[i + j] + static_cast<__int128>(f[i]) * g[j]) % p;
  trim(h);
  return h;
}

inline PolyP sub(PolyP f, const PolyP& g, long p) {
  if (f.size() < g.size()) f.resize(g.size(), 0);
  for (size_t i = 0; i < g.size(); ++i) f[i] = ((f[i] - g[i]) % p + p) % p;
  trim(f);
  return f;
}

inline PolyP add(PolyP f, const PolyP& g, long p) {
  if (f.size() < g.size()) f.resize(g.size(), 0);
  for (size_t i = 0; i < g.size(); ++i) f[i] = (f[i] + g[i]) % p;
  trim(f);
  return f;
}

inline std::pair<PolyP, PolyP> divmod(PolyP f, const PolyP& d, long p) {
  int dd = deg(d);
  long dinv = inv_mod(d.back(), p);
  if (deg(f) < dd) return {{}, f};
  PolyP q(deg(f) - dd + 1, 0);
  for (int i = deg(f); i >= dd; --i) {
    long c = static_cast<long>(static_cast<__int128>(f[i]) * dinv % p);
    if (c == 0) continue;
    q[i - dd] = c;
    for (int j = 0; j <= dd; ++j)
      f[i - dd + j] = ((f[i - dd + j] - static_cast<__int128>(c) * d[j]) % p + p) % p;
  }
  trim(f);
  return {q, f};
}

inline PolyP gcd(PolyP a, PolyP b, long p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    PolyP r = divmod(a, b, p).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    long inv = inv_mod(a.back(), p);
    for (auto& x : a) x = static_cast<long>(static_cast<__int128>(x) * inv % p);
  }
  return a;
}

inline PolyP derivative(const PolyP& f, long p) {
  if (f.size() < 2) return {};
  PolyP d(f.size() - 1);
  for (size_t i = 1; i < f.size(); ++i) d[i - 1] = static_cast<long>(i % p * static_cast<__int128>(f[i]) % p);
  trim(d);
  return d;
}

inline PolyP powmod_x(long e, const PolyP& f, long p) {
  // X^e mod f via square and multiply on exponent bits.
  PolyP result{1};
  PolyP base{0, 1};
  base = divmod(base, f, p).second;
  while (e > 0) {
    if (e & 1) result = divmod(mul(result, base, p), f, p).second;
    base = divmod(mul(base, base, p), f, p).second;
    e >>= 1;
  }
  return result;
}

// Berlekamp: full factorization of a squarefree monic polynomial mod p into
// monic irreducibles.
inline std::vector<PolyP> berlekamp(const PolyP& fIn, long p) {
  PolyP f = fIn;
  long inv = inv_mod(f.back(), p);
  for (auto& x : f) x = static_cast<long>(static_cast<__int128>(x) * inv % p);
  int n = deg(f);
  if (n <= 1) return {f};
  // Kernel of (Q^T - I) where row i of Q is X^{p i} mod f.
  std::vector<std::vector<long>> m(n, std::vector<long>(n, 0));
  for (int i = 0; i < n; ++i) {
    PolyP xi = powmod_x(static_cast<long>(p) * i, f, p);
    for (int j = 0; j < n; ++j) {
      long q = (j < static_cast<int>(xi.size())) ? xi[j] : 0;
      m[j][i] = q;  // transpose while filling
    }
    m[i][i] = ((m[i][i] - 1) % p + p) % p;
  }
  // Nullspace basis by Gaussian elimination.
  std::vector<int> pivot_col(n, -1);
  int rank = 0;
  for (int col = 0; col < n && rank < n; ++col) {
    int piv = -1;
    for (int r = rank; r < n; ++r)
      if (m[r][col] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    long iv = inv_mod(m[rank][col], p);
    for (int j = 0; j < n; ++j) m[rank][j] = static_cast<long>(static_cast<__int128>(m[rank][j]) * iv % p);
    for (int r = 0; r < n; ++r) {
      if (r == rank || m[r][col] == 0) continue;
      long fctr = m[r][col];
      for (int j = 0; j < n; ++j)
        m[r][j] = ((m[r][j] - static_cast<__int128>(fctr) * m[rank][j]) % p + p) % p;
    }
    pivot_col[rank++] = col;
  }
  std::vector<PolyP> kernel;
  std::vector<bool> is_pivot(n, false);
  for (int r = 0; r < rank; ++r) is_pivot[pivot_col[r]] = true;
  for (int col = 0; col < n; ++col) {
    if (is_pivot[col]) continue;
    PolyP v(n, 0);
    v[col] = 1;
    for (int r = 0; r < rank; ++r)
      v[pivot_col[r]] = ((-m[r][col]) % p + p) % p;
    trim(v);
    kernel.push_back(v);
  }
  size_t r_target = kernel.size();  // number of irreducible factors
  std::vector<PolyP> factors{f};
  for (const PolyP& w : kernel) {
    if (factors.size() >= r_target) break;
    if (deg(w) < 1) continue;
    std::vector<PolyP> next;
    for (const PolyP& g : factors) {
      if (deg(g) <= 1) {
        next.push_back(g);
        continue;
      }
      PolyP remaining = g;
      for (long s = 0; s < p && deg(remaining) > 0; ++s) {
        PolyP ws = divmod(w, remaining, p).second;
        if (ws.empty()) ws.resize(1, 0);
        ws[0] = ((ws[0] - s) % p + p) % p;
        trim(ws);
        if (ws.empty()) continue;  // w is constant s on every factor here
        PolyP d = gcd(remaining, ws, p);
        if (deg(d) > 0 && deg(d) < deg(remaining)) {
          next.push_back(d);
          remaining = divmod(remaining, d, p).first;
        }
      }
      if (deg(remaining) > 0) next.push_back(remaining);
    }
    factors = std::move(next);
  }
  return factors;
}

}  // namespace modp

// ---------------------------------------------------------------------------
// Factorization over Q.

struct IrreducibilityCertificate {
  std::string method;
  std::string detail;
};

struct FactorizationResult {
  Rational unit{1};
  std::vector<std::pair<Poly, int>> factors;  // monic irreducible, multiplicity
  std::vector<IrreducibilityCertificate> certificates;  // parallel to factors
};

namespace detail {

inline Integer int_poly_norm2_ceil_sqrt(const std::vector<Integer>& z) {
  Integer s(0);
  for (const auto& zi : z) s += zi * zi;
  Integer r;
  mpz_sqrt(r.get_mpz_t(), s.get_mpz_t());
  if (r * r != s) r += 1;
  return r;
}

inline Integer symmetric_mod(const Integer& x, const Integer& q) {
  Integer r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
  if (r * 2 > q) r -= q;
  return r;
}

// Linear Hensel lift of f = g*h (mod p) to modulus p^K. All polys are
// integer vectors; g, h monic is not assumed, but lc(g)*lc(h) = lc(f) mod p.
struct HenselPair {
  std::vector<Integer> g, h;
};

inline std::vector<Integer> zpoly_mul(const std::vector<Integer>& a,
                                      const std::vector<Integer>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<Integer> c(a.size() + b.size() - 1, Integer(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  while (!c.empty() && sgn(c.back()) == 0) c.pop_back();
  return c;
}

inline std::vector<Integer> zpoly_sub(std::vector<Integer> a, const std::vector<Integer>& b) {
  if (a.size() < b.size()) a.resize(b.size(), Integer(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
  while (!a.empty() && sgn(a.back()) == 0) a.pop_back();
  return a;
}

}  // namespace detail

// Eisenstein's criterion at prime p for the primitive integer form of f.
inline bool eisenstein_check(const Poly& f, long p) {
  auto [z, scale] = f.integer_primitive();
  (void)scale;
  if (z.size() < 3) return false;
  Integer P(p);
  if (mpz_divisible_p(z.back().get_mpz_t(), P.get_mpz_t())) return false;
  for (size_t i = 0; i + 1 < z.size(); ++i)
    if (!mpz_divisible_p(z[i].get_mpz_t(), P.get_mpz_t())) return false;
  Integer P2 = P * P;
  return !mpz_divisible_p(z[0].get_mpz_t(), P2.get_mpz_t());
}

// Searches shifts s in [-maxShift, maxShift] and small primes for an
// Eisenstein witness of irreducibility of f(X + s).
inline std::optional<std::pair<long, long>> eisenstein_shift_search(const Poly& f,
                                                                    long maxShift = 4) {
  static const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  for (long s = 0; s <= maxShift; ++s) {
    for (long sign : {1, -1}) {
      long shift = s * sign;
      if (shift == 0 && sign < 0) continue;
      Poly g = f.shifted(Rational(shift));
      for (long p : primes)
        if (eisenstein_check(g, p)) return std::make_pair(p, shift);
    }
  }
  return std::nullopt;
}

namespace detail {

// Zassenhaus: factor a primitive squarefree integer polynomial (degree >= 1)
// into irreducible primitive integer polynomials.
inline std::vector<std::vector<Integer>> factor_squarefree_z(std::vector<Integer> f,
                                                             std::string* how) {
  std::vector<std::vector<Integer>> out;
  int n = static_cast<int>(f.size()) - 1;
  if (n <= 0) return out;
  if (n == 1) {
    out.push_back(f);
    if (how) *how = "degree 1";
    return out;
  }

  // Rational roots: candidates num/den with num | f(0), den | lc. Linear
  // factors are split off first.
  {
    bool changed = true;
    while (changed && static_cast<int>(f.size()) - 1 >= 1) {
      changed = false;
      Integer a0 = f.front(), an = f.back();
      if (sgn(a0) == 0) {
        out.push_back({Integer(0), Integer(1)});  // factor X
        f.erase(f.begin());
        changed = true;
        continue;
      }
      std::vector<Integer> nums, dens;
      auto divisors = [](Integer v) {
        std::vector<Integer> ds;
        v = ::abs(v);
        for (Integer d(1); d * d <= v; ++d)
          if (mpz_divisible_p(v.get_mpz_t(), d.get_mpz_t())) {
            ds.push_back(d);
            if (d * d != v) ds.push_back(v / d);
          }
        return ds;
      };
      // Cap divisor enumeration; large constant terms fall through to the
      // lifting path which also finds linear factors.
      if (mpz_sizeinbase(a0.get_mpz_t(), 2) <= 48 && mpz_sizeinbase(an.get_mpz_t(), 2) <= 48) {
        nums = divisors(a0);
        dens = divisors(an);
        Poly fq = poly_from_integers(f);
        for (const Integer& nu : nums) {
          for (const Integer& de : dens) {
            Integer g;
            mpz_gcd(g.get_mpz_t(), nu.get_mpz_t(), de.get_mpz_t());
            if (g != 1) continue;
            for (int s : {1, -1}) {
              Rational root = Rational(nu * s) / Rational(de);
              if (sgn(fq.evaluate(root)) == 0) {
                // factor (de X - s nu)
                std::vector<Integer> lin{-s * nu, de};
                out.push_back(lin);
                fq = fq / poly_from_integers(lin);
                auto [z2, sc2] = fq.integer_primitive();
                (void)sc2;
                f = z2;
                changed = true;
                break;
              }
            }
            if (changed) break;
          }
          if (changed) break;
        }
      } else {
        break;
      }
    }
    n = static_cast<int>(f.size()) - 1;
    if (n <= 0) {
      if (how) *how = "rational roots";
      return out;
    }
    if (n == 1) {
      out.push_back(f);
      if (how) *how = "rational roots";
      return out;
    }
  }

  // Reduction mod small primes: collect factor degree patterns. If the
  // intersection of attainable factor degrees is {0, n}, f is irreducible.
  static const long primes[] = {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  struct ModData {
    long p;
    std::vector<modp::PolyP> factors;
  };
  std::vector<ModData> mods;
  std::vector<bool> possible(n + 1, true);
  std::string patterns;
  for (long p : primes) {
    if (mods.size() >= 4) break;
    if (mpz_divisible_ui_p(f.back().get_mpz_t(), p)) continue;
    modp::PolyP fp(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
      Integer r;
      mpz_mod_ui(r.get_mpz_t(), f[i].get_mpz_t(), p);
      fp[i] = r.get_si();
    }
    modp::trim(fp);
    if (modp::deg(fp) != n) continue;
    modp::PolyP d = modp::derivative(fp, p);
    if (modp::deg(modp::gcd(fp, d, p)) > 0) continue;  // not squarefree mod p
    auto fs = modp::berlekamp(fp, p);
    // attainable degrees: subset sums of modular factor degrees
    std::vector<bool> attain(n + 1, false);
    attain[0] = true;
    for (const auto& g : fs) {
      int dg = modp::deg(g);
      for (int s = n; s >= dg; --s)
        if (attain[s - dg]) attain[s] = true;
    }
    for (int s = 0; s <= n; ++s) possible[s] = possible[s] && attain[s];
    if (!patterns.empty()) patterns += "; ";
    patterns += "p=" + std::to_string(p) + ":";
    for (size_t i = 0; i < fs.size(); ++i)
      patterns += (i ? "," : "") + std::to_string(modp::deg(fs[i]));
    mods.push_back({p, std::move(fs)});
    bool only_trivial = true;
    for (int s = 1; s < n; ++s)
      if (possible[s]) only_trivial = false;
    if (only_trivial) {
      out.push_back(f);
      if (how) *how = "degree patterns (" + patterns + ")";
      return out;
    }
  }
  if (mods.empty())
    throw std::runtime_error("no usable prime for factorization (degree cap exceeded?)");

  // Hensel lift the factorization with the fewest modular factors, then
  // combine factor subsets, testing division against the Mignotte bound.
  const ModData& best = *std::min_element(
      mods.begin(), mods.end(),
      [](const ModData& a, const ModData& b) { return a.factors.size() < b.factors.size(); });
  long p = best.p;

  Integer bound = detail::int_poly_norm2_ceil_sqrt(f);
  bound *= ::abs(f.back());
  mpz_mul_2exp(bound.get_mpz_t(), bound.get_mpz_t(), n + 1);  // 2^(n+1) * |lc| * ||f||_2
  Integer pk(p);
  int K = 1;
  while (pk <= 2 * bound) {
    pk *= p;
    ++K;
  }

  // Lift: maintain f = prod(lifted) * (unit) mod p^K via iterated two-factor
  // lifting of (g_i, product of the rest).
  std::vector<std::vector<Integer>> lifted;
  {
    // initial modular factors as integer vectors, with lc(f) folded in on the
    // convention that the first factor absorbs lc adjustments; keep all monic
    // mod p (berlekamp returns monic) and track f_monic = f / lc mod p^K.
    // We lift the monic factorization of f_monic where f_monic = f * lc^{-1}
    // mod p^K; at combination time multiply candidates by lc and take
    // primitive parts, which absorbs the unit.
    std::vector<std::vector<Integer>> current;
    for (const auto& g : best.factors) {
      std::vector<Integer> gz(g.size());
      for (size_t i = 0; i < g.size(); ++i) gz[i] = Integer(g[i]);
      current.push_back(std::move(gz));
    }
    // f_monic mod p^K: multiply f by inverse of lc mod p^K.
    Integer lcinv;
    {
      Integer lc = f.back();
      if (!mpz_invert(lcinv.get_mpz_t(), lc.get_mpz_t(), pk.get_mpz_t()))
        throw std::runtime_error("leading coefficient not invertible mod p^K");
    }
    std::vector<Integer> fm(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
      Integer v = f[i] * lcinv;
      mpz_mod(v.get_mpz_t(), v.get_mpz_t(), pk.get_mpz_t());
      fm[i] = v;
    }

    // Iteratively lift pairs (g, h = rest) from p to p^K.
    std::function<std::vector<std::vector<Integer>>(std::vector<Integer>,
                                                    std::vector<std::vector<Integer>>)>
        lift_list = [&](std::vector<Integer> target,
                        std::vector<std::vector<Integer>> gs) -> std::vector<std::vector<Integer>> {
      if (gs.size() == 1) {
        // target itself is the lift of the single factor
        return {target};
      }
      size_t half = gs.size() / 2;
      std::vector<std::vector<Integer>> left(gs.begin(), gs.begin() + half);
      std::vector<std::vector<Integer>> right(gs.begin() + half, gs.end());
      // g = prod(left) mod p, h = prod(right) mod p
      auto prod_mod_p = [&](const std::vector<std::vector<Integer>>& list) {
        modp::PolyP acc{1};
        for (const auto& gz : list) {
          modp::PolyP gp(gz.size());
          for (size_t i = 0; i < gz.size(); ++i) {
            Integer r;
            mpz_mod_ui(r.get_mpz_t(), gz[i].get_mpz_t(), p);
            gp[i] = r.get_si();
          }
          modp::trim(gp);
          acc = modp::mul(acc, gp, p);
        }
        return acc;
      };
      modp::PolyP gp = prod_mod_p(left), hp = prod_mod_p(right);
      // Bezout: s*g + t*h = 1 mod p via extended euclid on polynomials.
      modp::PolyP s{}, t{};
      {
        modp::PolyP r0 = gp, r1 = hp;
        modp::PolyP s0{1}, s1{}, t0{}, t1{1};
        while (!r1.empty()) {
          auto [q, r2] = modp::divmod(r0, r1, p);
          modp::PolyP s2 = modp::sub(s0, modp::mul(q, s1, p), p);
          modp::PolyP t2 = modp::sub(t0, modp::mul(q, t1, p), p);
          r0 = r1;
          r1 = r2;
          s0 = s1;
          s1 = s2;
          t0 = t1;
          t1 = t2;
        }
        // r0 = gcd = nonzero constant
        long c = r0.empty() ? 1 : r0[0];
        long cinv = modp::inv_mod(c, p);
        for (auto& x : s0) x = static_cast<long>(static_cast<__int128>(x) * cinv % p);
        for (auto& x : t0) x = static_cast<long>(static_cast<__int128>(x) * cinv % p);
        s = s0;
        t = t0;
      }
      // Lift g,h so target = g*h mod p^K, then recurse.
      std::vector<Integer> G(gp.size()), H(hp.size());
      for (size_t i = 0; i < gp.size(); ++i) G[i] = Integer(gp[i]);
      for (size_t i = 0; i < hp.size(); ++i) H[i] = Integer(hp[i]);
      Integer q(p);
      while (q < pk) {
        // e = (target - G*H)/q mod p
        std::vector<Integer> e = detail::zpoly_sub(target, detail::zpoly_mul(G, H));
        for (auto& x : e) x /= q;
        modp::PolyP ep(e.size());
        for (size_t i = 0; i < e.size(); ++i) {
          Integer r;
          mpz_mod_ui(r.get_mpz_t(), e[i].get_mpz_t(), p);
          ep[i] = r.get_si();
        }
        modp::trim(ep);
        // dg = (t*e) mod gp ; dh = s*e + ((t*e) div gp) * hp  (all mod p)
        auto te = modp::mul(t, ep, p);
        auto [qt, dg] = modp::divmod(te, gp, p);
        auto dh = modp::add(modp::mul(s, ep, p), modp::mul(qt, hp, p), p);
        if (G.size() < dg.size() + 0) G.resize(dg.size(), Integer(0));
        for (size_t i = 0; i < dg.size(); ++i) G[i] += q * Integer(dg[i]);
        if (H.size() < dh.size()) H.resize(dh.size(), Integer(0));
        for (size_t i = 0; i < dh.size(); ++i) H[i] += q * Integer(dh[i]);
        q *= p;
        // reduce coefficients mod q to keep them small
        for (auto& x : G) {
          mpz_mod(x.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
        }
        for (auto& x : H) {
          mpz_mod(x.get_mpz_t(), x.get_mpz_t(), q.get_mpz_t());
        }
      }
      auto leftLifted = lift_list(G, left);
      auto rightLifted = lift_list(H, right);
      leftLifted.insert(leftLifted.end(), rightLifted.begin(), rightLifted.end());
      return leftLifted;
    };
    lifted = lift_list(fm, current);
  }

  // Factor combination.
  std::vector<int> alive(lifted.size());
  std::iota(alive.begin(), alive.end(), 0);
  std::vector<Integer> rem = f;
  bool progress = true;
  auto try_subset = [&](const std::vector<int>& subset) -> bool {
    std::vector<Integer> cand{rem.back()};  // lc(rem)
    for (int idx : subset) cand = detail::zpoly_mul(cand, lifted[idx]);
    for (auto& x : cand) x = detail::symmetric_mod(x, pk);
    // primitive part
    Integer content(0);
    for (const auto& x : cand) mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), x.get_mpz_t());
    if (sgn(content) == 0) return false;
    if (sgn(cand.back()) < 0) content = -content;
    for (auto& x : cand) x /= content;
    Poly candQ = poly_from_integers(cand);
    Poly remQ = poly_from_integers(rem);
    auto [quot, r] = remQ.divmod(candQ);
    if (!r.is_zero()) return false;
    out.push_back(cand);
    auto [z2, sc2] = quot.integer_primitive();
    (void)sc2;
    rem = z2;
    for (int idx : subset)
      alive.erase(std::find(alive.begin(), alive.end(), idx));
    return true;
  };
  while (progress && alive.size() > 0 && static_cast<int>(rem.size()) - 1 > 0) {
    progress = false;
    size_t r = alive.size();
    for (size_t card = 1; card <= r / 2 && !progress; ++card) {
      // iterate subsets of `alive` of size `card`
      std::vector<size_t> idx(card);
      std::iota(idx.begin(), idx.end(), 0);
      while (true) {
        std::vector<int> subset;
        for (size_t i : idx) subset.push_back(alive[i]);
        if (try_subset(subset)) {
          progress = true;
          break;
        }
        // next combination
        size_t i = card;
        while (i > 0 && idx[i - 1] == r - card + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (size_t j = i; j < card; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  if (static_cast<int>(rem.size()) - 1 > 0) out.push_back(rem);
  if (how) *how = "hensel lifting mod " + std::to_string(p) + "^" + std::to_string(K) +
                  " with bounded factor combination (" + patterns + ")";
  return out;
}

}  // namespace detail

inline FactorizationResult factorize(const Poly& fIn) {
  FactorizationResult result;
  if (fIn.is_zero()) throw std::domain_error("cannot factor the zero polynomial");
  result.unit = fIn.lc();
  if (fIn.degree() == 0) return result;
  if (fIn.degree() > 12)
    throw std::domain_error("factorization degree cap (12) exceeded");
  auto sq = squarefree_decomposition(fIn);
  for (const auto& [sf, mult] : sq) {
    auto [z, scale] = sf.integer_primitive();
    (void)scale;
    std::string how;
    auto zfactors = detail::factor_squarefree_z(z, &how);
    for (const auto& zf : zfactors) {
      Poly qf = poly_from_integers(zf).monic();
      bool merged = false;
      for (auto& [g, m] : result.factors)
        if (g == qf) {
          m += mult;
          merged = true;
          break;
        }
      if (!merged) {
        result.factors.push_back({qf, mult});
        std::string method;
        if (qf.degree() == 1)
          method = "linear";
        else if (zfactors.size() == 1)
          method = how;
        else
          method = how;
        result.certificates.push_back({method, "degree " + std::to_string(qf.degree())});
      }
    }
  }
  std::sort(result.factors.begin(), result.factors.end(),
            [](const auto& a, const auto& b) { return a.first.degree() < b.first.degree(); });
  return result;
}

inline bool is_irreducible(const Poly& f, IrreducibilityCertificate* cert = nullptr) {
  if (f.degree() < 1) return false;
  auto r = factorize(f);
  bool irr = r.factors.size() == 1 && r.factors[0].second == 1 &&
             r.factors[0].first.degree() == f.degree();
  if (irr && cert) {
    // prefer an Eisenstein witness when one exists; fall back to the
    // factorization method string
    if (auto e = eisenstein_shift_search(f)) {
      *cert = {e->second == 0 ? "eisenstein" : "eisenstein after shift",
               "p=" + std::to_string(e->first) +
                   (e->second ? ", shift=" + std::to_string(e->second) : "")};
    } else {
      // re-run to recover the method description
      auto [z, scale] = squarefree_part(f).integer_primitive();
      (void)scale;
      std::string how;
      detail::factor_squarefree_z(z, &how);
      *cert = {"factorization", how};
    }
  }
  return irr;
}

// ---------------------------------------------------------------------------
// Sturm sequences and root isolation.

inline int sturm_sign_variations(const std::vector<Poly>& chain, const Rational& x) {
  int var = 0, last = 0;
  for (const Poly& p : chain) {
    int s = sgn(p.evaluate(x));
    if (s == 0) continue;
    if (last != 0 && s != last) ++var;
    last = s;
  }
  return var;
}

inline std::vector<Poly> sturm_chain(const Poly& f) {
  std::vector<Poly> chain;
  chain.push_back(squarefree_part(f));
  if (chain[0].degree() < 1) return chain;
  chain.push_back(chain[0].derivative());
  while (chain.back().degree() > 0) {
    Poly r = chain[chain.size() - 2].divmod(chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(-r);
  }
  return chain;
}

// Number of distinct real roots of f in the half-open interval (lo, hi].
inline int sturm_count(const Poly& f, const Rational& lo, const Rational& hi) {
  auto chain = sturm_chain(f);
  if (chain[0].degree() < 1) return 0;
  return sturm_sign_variations(chain, lo) - sturm_sign_variations(chain, hi);
}

// Outer rational enclosure of sqrt over the value interval [lo, hi]: returns
// [a, b] with a^2 <= lo and b^2 >= hi, each bound within `slack` of the true
// square root. The caller controls total width by refining [lo, hi].
inline std::pair<Rational, Rational> sqrt_enclosure(Rational lo, Rational hi,
                                                    const Rational& slack) {
  if (sgn(lo) < 0) lo = 0;
  Rational a(0), b = hi < 1 ? Rational(1) : hi;  // b^2 >= hi
  // lower bound for sqrt(lo)
  Rational alo = a, ahi = b;
  while (ahi - alo > slack) {
    Rational mid = (alo + ahi) / 2;
    if (mid * mid <= lo)
      alo = mid;
    else
      ahi = mid;
  }
  // upper bound for sqrt(hi)
  Rational blo(0), bhi = b;
  while (bhi - blo > slack) {
    Rational mid = (blo + bhi) / 2;
    if (mid * mid >= hi)
      bhi = mid;
    else
      blo = mid;
  }
  return {alo, bhi};
}

// ---------------------------------------------------------------------------
// Minimal polynomials over Q for elements of Q(alpha).

inline Poly minimal_polynomial(const FieldElement& x) {
  if (x.is_rational()) return Poly({-x.rational_value(), Rational(1)});
  // degree 3: solve for monic cubic with x^3 + c2 x^2 + c1 x + c0 = 0
  FieldElement x2 = x * x;
  FieldElement x3 = x2 * x;
  using RF = RationalField;
  std::vector<std::vector<RF>> A = {
      {RF(Rational(1)), RF(x.coeff0()), RF(x2.coeff0())},
      {RF(Rational(0)), RF(x.coeff1()), RF(x2.coeff1())},
      {RF(Rational(0)), RF(x.coeff2()), RF(x2.coeff2())}};
  std::vector<RF> rhs = {RF(-x3.coeff0()), RF(-x3.coeff1()), RF(-x3.coeff2())};
  auto sol = solve_square(A, rhs);
  if (!sol) throw std::logic_error("minimal polynomial system is singular");
  return Poly({(*sol)[0].v, (*sol)[1].v, (*sol)[2].v, Rational(1)});
}

// The minimal polynomial of alpha itself: X^3 + X^2 + X - 1.
inline Poly alpha_minimal_polynomial() { return Poly({-1, 1, 1, 1}); }

// Determinant of a square matrix with polynomial entries, by expansion with
// memoization over column subsets (sizes here stay <= 9).
inline Poly poly_matrix_det(const std::vector<std::vector<Poly>>& m) {
  size_t n = m.size();
  std::map<uint32_t, Poly> memo;
  std::function<Poly(uint32_t)> det = [&](uint32_t colmask) -> Poly {
    size_t row = static_cast<size_t>(__builtin_popcount(colmask));
    if (colmask == (1u << n) - 1) return Poly::constant(1);
    auto it = memo.find(colmask);
    if (it != memo.end()) return it->second;
    Poly acc;
    int parity = 0;
    for (size_t col = 0; col < n; ++col) {
      if (colmask & (1u << col)) continue;
      if (!m[row][col].is_zero()) {
        Poly sub = det(colmask | (1u << col));
        Poly term = m[row][col] * sub;
        acc = (parity % 2 == 0) ? acc + term : acc - term;
      }
      ++parity;
    }
    memo[colmask] = acc;
    return acc;
  };
  return det(0);
}

// Resultant of f and g with respect to Y where both are given as polynomials
// in Y with coefficients in Q[X] (outer index = power of Y).
inline Poly resultant_in_y(const std::vector<Poly>& f, const std::vector<Poly>& g) {
  int df = static_cast<int>(f.size()) - 1, dg = static_cast<int>(g.size()) - 1;
  int n = df + dg;
  std::vector<std::vector<Poly>> syl(n, std::vector<Poly>(n));
  for (int i = 0; i < dg; ++i)
    for (int j = 0; j <= df; ++j) syl[i][i + j] = f[df - j];
  for (int i = 0; i < df; ++i)
    for (int j = 0; j <= dg; ++j) syl[dg + i][i + j] = g[dg - j];
  return poly_matrix_det(syl);
}

// Resultant of two rational polynomials (Sylvester determinant).
inline Rational resultant(const Poly& f, const Poly& g) {
  std::vector<Poly> fy(f.degree() + 1), gy(g.degree() + 1);
  for (int i = 0; i <= f.degree(); ++i) fy[i] = Poly::constant(f[i]);
  for (int i = 0; i <= g.degree(); ++i) gy[i] = Poly::constant(g[i]);
  Poly r = resultant_in_y(fy, gy);
  return r.is_zero() ? Rational(0) : r[0];
}

// ---------------------------------------------------------------------------
// Minimal polynomials of matrix eigenvalues and of square roots.

struct CertifiedPoly {
  Poly minpoly;
  IrreducibilityCertificate certificate;
};

namespace detail {

// Selects, among the distinct-root factors of a squarefree polynomial, the
// unique one vanishing at the target value, which is located by a shrinking
// rational enclosure. `enclose` must return an interval containing the
// target of width at most its argument. Rational targets must be resolved
// by the caller beforehand.
inline const Poly* select_factor_at(
    const std::vector<std::pair<Poly, int>>& factors,
    const std::function<std::pair<Rational, Rational>(const Rational&)>& enclose) {
  Rational width(1, 4);
  for (int iter = 0; iter < 256; ++iter) {
    auto [lo, hi] = enclose(width);
    int total = 0;
    const Poly* hit = nullptr;
    for (const auto& [g, mult] : factors) {
      (void)mult;
      int c = sturm_count(g, lo, hi);
      total += c;
      if (c > 0) hit = &g;
    }
    if (total == 1) return hit;
    width /= 16;
  }
  throw std::logic_error("failed to isolate algebraic value among factors");
}

}  // namespace detail

// Resultant eliminating Y from m_alpha(Y) and X^2 - T(Y) X + D(Y), where T
// and D are the trace and determinant written as quadratics in Y.
inline Poly eigenvalue_char_resultant(const FieldElement& tr, const FieldElement& det) {
  std::vector<Poly> m = {Poly::constant(-1), Poly::constant(1), Poly::constant(1),
                         Poly::constant(1)};
  std::vector<Poly> chi;
  chi.push_back(Poly({det.coeff0(), -tr.coeff0(), Rational(1)}));
  chi.push_back(Poly({det.coeff1(), -tr.coeff1()}));
  chi.push_back(Poly({det.coeff2(), -tr.coeff2()}));
  while (chi.size() > 1 && chi.back().is_zero()) chi.pop_back();
  return resultant_in_y(m, chi);
}

// Minimal polynomial over Q of the larger-modulus eigenvalue of any 2x2
// matrix over Q(alpha) with the given trace and determinant. Real
// eigenvalues only.
inline CertifiedPoly eigenvalue_minpoly(const FieldElement& tr, const FieldElement& det) {
  FieldElement disc = tr * tr - Rational(4) * det;
  int ds = disc.sign();
  if (ds < 0) throw std::domain_error("eigenvalues are not real");
  if (ds == 0) {
    Poly m = minimal_polynomial(Rational(1, 2) * tr);
    CertifiedPoly out{m, {}};
    is_irreducible(m, &out.certificate);
    return out;
  }
  int ts = tr.sign();
  Poly p = squarefree_part(eigenvalue_char_resultant(tr, det));
  auto fac = factorize(p);
  // Rational eigenvalue: verify linear-factor roots exactly.
  for (const auto& [g, mult] : fac.factors) {
    (void)mult;
    if (g.degree() != 1) continue;
    Rational root = -g[0];
    FieldElement lam(root);
    if (!(lam * lam - tr * lam + det).is_zero()) continue;
    FieldElement other = tr - lam;
    if ((lam * lam - other * other).sign() >= 0) {
      CertifiedPoly out{g, {"linear", "rational eigenvalue " + root.get_str()}};
      return out;
    }
  }
  auto enclose = [&](const Rational& w) -> std::pair<Rational, Rational> {
    Rational w4 = w / 4;
    auto [tlo, thi] = tr.enclosure(w4);
    auto [dlo, dhi] = disc.enclosure(w4);
    auto [slo, shi] = sqrt_enclosure(dlo, dhi, w4);
    // lambda = (t + s*sqrt(disc)) / 2 with s = sign chosen for larger modulus
    if (ts >= 0) return {(tlo + slo) / 2, (thi + shi) / 2};
    return {(tlo - shi) / 2, (thi - slo) / 2};
  };
  const Poly* sel = detail::select_factor_at(fac.factors, enclose);
  CertifiedPoly out{*sel, {}};
  is_irreducible(*sel, &out.certificate);
  return out;
}

// Minimal polynomial over Q of sqrt(x) for a nonnegative x in Q(alpha).
inline CertifiedPoly minpoly_of_sqrt(const FieldElement& x) {
  int s = x.sign();
  if (s < 0) throw std::domain_error("square root of a negative value");
  if (s == 0) return {Poly({Rational(0), Rational(1)}), {"linear", "sqrt(0) = 0"}};
  Poly p = minimal_polynomial(x).compose_square();
  auto fac = factorize(squarefree_part(p));
  // Rational square root: verify linear factors exactly.
  for (const auto& [g, mult] : fac.factors) {
    (void)mult;
    if (g.degree() != 1) continue;
    Rational root = -g[0];
    if (sgn(root) >= 0 && FieldElement(root * root) == x)
      return {g, {"linear", "rational square root " + root.get_str()}};
  }
  auto enclose = [&](const Rational& w) -> std::pair<Rational, Rational> {
    auto [lo, hi] = x.enclosure(w / 4);
    return sqrt_enclosure(lo, hi, w / 4);
  };
  const Poly* sel = detail::select_factor_at(fac.factors, enclose);
  CertifiedPoly out{*sel, {}};
  is_irreducible(*sel, &out.certificate);
  return out;
}

// Exact square test in Q(alpha): returns the nonnegative square root when x
// is a square in the field.
inline std::optional<FieldElement> fe_sqrt_in_field(const FieldElement& x) {
  int s = x.sign();
  if (s < 0) return std::nullopt;
  if (s == 0) return FieldElement(0);
  if (x.is_rational()) {
    Rational q = x.rational_value();
    Integer num = q.get_num(), den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
      return std::nullopt;
    Integer rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    return FieldElement(Rational(rn) / Rational(rd));
  }
  Poly p = minimal_polynomial(x).compose_square();
  auto fac = factorize(squarefree_part(p));
  const Poly* cubic = nullptr;
  for (const auto& [g, mult] : fac.factors) {
    (void)mult;
    if (g.degree() == 3) {
      cubic = &g;
      break;
    }
  }
  if (!cubic) return std::nullopt;
  // In Q[Y]/(g), x is represented by Y^2. Express Y in the basis
  // {1, x, x^2} to pull the square root back into Q(alpha).
  const Poly& g = *cubic;
  Poly y2 = Poly::monomial(2).divmod(g).second;
  Poly y4 = (y2 * y2).divmod(g).second;
  using RF = RationalField;
  auto coord = [](const Poly& q, int i) {
    return RF(i <= q.degree() ? q[i] : Rational(0));
  };
  std::vector<std::vector<RF>> A(3, std::vector<RF>(3));
  for (int i = 0; i < 3; ++i) {
    A[i][0] = RF(i == 0 ? Rational(1) : Rational(0));
    A[i][1] = coord(y2, i);
    A[i][2] = coord(y4, i);
  }
  std::vector<RF> rhs = {RF(Rational(0)), RF(Rational(1)), RF(Rational(0))};
  auto sol = solve_square(A, rhs);
  if (!sol) throw std::logic_error("square-root basis change is singular");
  FieldElement y = FieldElement((*sol)[0].v) + FieldElement((*sol)[1].v) * x +
                   FieldElement((*sol)[2].v) * x * x;
  if (!(y * y == x)) throw std::logic_error("square-root recovery failed verification");
  return y.sign() >= 0 ? y : -y;
}

inline bool fe_is_square(const FieldElement& x) { return fe_sqrt_in_field(x).has_value(); }

// True when Q(alpha)(sqrt(x)) and Q(alpha)(sqrt(y)) are distinct extensions.
// For nonsquare positive x and y this is the Kummer criterion: the fields
// coincide exactly when x*y is a square in Q(alpha).
inline bool sqrt_extension_distinct(const FieldElement& x, const FieldElement& y) {
  if (x.sign() <= 0 || y.sign() <= 0)
    throw NonPositive("sqrt extension comparison needs positive arguments");
  bool xs = fe_is_square(x), ys = fe_is_square(y);
  if (xs && ys) return false;      // both extensions trivial
  if (xs != ys) return true;       // one trivial, one quadratic
  return !fe_is_square(x * y);
}

}  // namespace ayoz
