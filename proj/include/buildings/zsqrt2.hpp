#pragma once

#include <cstdint>
#include <compare>

namespace buildings {

// Element a + b*sqrt(2) of Z[sqrt 2].  Exact coordinates for the reflection
// representation of Coxeter systems with m_st <= 4 (2*cos(pi/4) = sqrt 2).
struct Zr2 {
  std::int64_t a = 0;
  std::int64_t b = 0;

  friend Zr2 operator+(Zr2 x, Zr2 y) { return {x.a + y.a, x.b + y.b}; }
  friend Zr2 operator-(Zr2 x, Zr2 y) { return {x.a - y.a, x.b - y.b}; }
  friend Zr2 operator-(Zr2 x) { return {-x.a, -x.b}; }
  friend Zr2 operator*(Zr2 x, Zr2 y) {
    return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend bool operator==(const Zr2&, const Zr2&) = default;
  friend auto operator<=>(const Zr2&, const Zr2&) = default;  // structural, for map keys

  bool is_zero() const { return a == 0 && b == 0; }

  // Sign of a + b*sqrt(2) as a real number.
  int sign() const {
    if (a == 0 && b == 0) return 0;
    if (a >= 0 && b >= 0) return 1;
    if (a <= 0 && b <= 0) return -1;
    // Opposite signs: compare a^2 with 2 b^2; a + b*sqrt2 > 0 iff the
    // positive-signed term dominates.
    const std::int64_t a2 = a * a, b22 = 2 * b * b;
    if (a > 0) return a2 > b22 ? 1 : (a2 < b22 ? -1 : 0);
    return a2 < b22 ? 1 : (a2 > b22 ? -1 : 0);
  }
  bool is_positive() const { return sign() > 0; }
  bool is_negative() const { return sign() < 0; }
};

}  // namespace buildings
