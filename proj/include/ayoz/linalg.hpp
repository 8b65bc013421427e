#pragma once

// Exact 2x2 matrix / vector helpers over the cubic field, plus a small
// dense Gaussian solver used for minimal polynomials and basis changes.

#include <optional>
#include <stdexcept>
#include <vector>

#include "field.hpp"

namespace ayoz {

struct Vec2 {
  FieldElement x, y;

  Vec2() = default;
  Vec2(FieldElement px, FieldElement py) : x(std::move(px)), y(std::move(py)) {}

  friend Vec2 operator+(const Vec2& u, const Vec2& v) { return {u.x + v.x, u.y + v.y}; }
  friend Vec2 operator-(const Vec2& u, const Vec2& v) { return {u.x - v.x, u.y - v.y}; }
  Vec2& operator+=(const Vec2& v) { x += v.x; y += v.y; return *this; }
  Vec2& operator-=(const Vec2& v) { x -= v.x; y -= v.y; return *this; }
  Vec2 operator-() const { return {-x, -y}; }
  friend Vec2 operator*(const FieldElement& s, const Vec2& v) { return {s * v.x, s * v.y}; }
  bool operator==(const Vec2& v) const { return x == v.x && y == v.y; }
  bool is_zero() const { return x.is_zero() && y.is_zero(); }

  // Squared euclidean length, an exact field element.
  FieldElement norm2() const { return x * x + y * y; }
};

inline FieldElement cross(const Vec2& u, const Vec2& v) { return u.x * v.y - u.y * v.x; }
inline FieldElement dot(const Vec2& u, const Vec2& v) { return u.x * v.x + u.y * v.y; }

// Row-major 2x2 matrix over the field.
struct Mat2 {
  FieldElement a, b, c, d;

  Mat2() : a(1), b(0), c(0), d(1) {}
  Mat2(FieldElement pa, FieldElement pb, FieldElement pc, FieldElement pd)
      : a(std::move(pa)), b(std::move(pb)), c(std::move(pc)), d(std::move(pd)) {}

  static Mat2 identity() { return Mat2(); }
  static Mat2 from_columns(const Vec2& u, const Vec2& v) { return Mat2(u.x, v.x, u.y, v.y); }

  Vec2 column(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }

  FieldElement det() const { return a * d - b * c; }
  FieldElement trace() const { return a + d; }
  Mat2 transpose() const { return Mat2(a, c, b, d); }

  Mat2 inverse() const {
    FieldElement dt = det();
    if (dt.is_zero()) throw std::domain_error("singular 2x2 matrix");
    FieldElement inv = dt.inverse();
    return Mat2(inv * d, inv * -b, inv * -c, inv * a);
  }

  friend Mat2 operator*(const Mat2& m, const Mat2& n) {
    return Mat2(m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
                m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d);
  }
  Vec2 apply(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
  friend Mat2 operator*(const FieldElement& s, const Mat2& m) {
    return Mat2(s * m.a, s * m.b, s * m.c, s * m.d);
  }
  friend Mat2 operator-(const Mat2& m, const Mat2& n) {
    return Mat2(m.a - n.a, m.b - n.b, m.c - n.c, m.d - n.d);
  }
  bool operator==(const Mat2& n) const { return a == n.a && b == n.b && c == n.c && d == n.d; }

  Mat2 pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    Mat2 r = identity(), base = *this;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }
};

// Solves A x = rhs by Gaussian elimination over any exact field type with
// is_zero() and division. Returns nullopt when A is singular.
template <class T>
std::optional<std::vector<T>> solve_square(std::vector<std::vector<T>> A, std::vector<T> rhs) {
  const size_t n = A.size();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && A[piv][col].is_zero()) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    T inv = A[col][col].inverse();
    for (size_t j = col; j < n; ++j) A[col][j] = inv * A[col][j];
    rhs[col] = inv * rhs[col];
    for (size_t r = 0; r < n; ++r) {
      if (r == col || A[r][col].is_zero()) continue;
      T f = A[r][col];
      for (size_t j = col; j < n; ++j) A[r][j] = A[r][j] - f * A[col][j];
      rhs[r] = rhs[r] - f * rhs[col];
    }
  }
  return rhs;
}

// Rational wrapper with the interface solve_square expects.
struct RationalField {
  Rational v;
  RationalField() : v(0) {}
  RationalField(Rational q) : v(std::move(q)) {}
  bool is_zero() const { return sgn(v) == 0; }
  RationalField inverse() const {
    if (is_zero()) throw std::domain_error("division by zero");
    return RationalField(Rational(1) / v);
  }
  friend RationalField operator*(const RationalField& x, const RationalField& y) {
    return RationalField(x.v * y.v);
  }
  friend RationalField operator-(const RationalField& x, const RationalField& y) {
    return RationalField(x.v - y.v);
  }
};

}  // namespace ayoz
