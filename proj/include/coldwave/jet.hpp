#pragma once
#include <cmath>

namespace coldwave {

// Second-order forward-mode jet: value plus first and second derivative with
// respect to a single scalar variable. Used so that initial-data profiles and
// time-dependent coefficient functions carry exact derivatives (no finite
// differences anywhere in the criteria or Hill-coefficient paths).
struct Jet2 {
  double f = 0, d1 = 0, d2 = 0;

  static Jet2 var(double x) { return {x, 1, 0}; }
  static Jet2 con(double c) { return {c, 0, 0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.f + b.f, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.f - b.f, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(Jet2 a) { return {-a.f, -a.d1, -a.d2}; }
inline Jet2 operator*(Jet2 a, Jet2 b) {
  return {a.f * b.f, a.d1 * b.f + a.f * b.d1, a.d2 * b.f + 2 * a.d1 * b.d1 + a.f * b.d2};
}
inline Jet2 operator*(double c, Jet2 a) { return {c * a.f, c * a.d1, c * a.d2}; }
inline Jet2 operator*(Jet2 a, double c) { return c * a; }
inline Jet2 operator+(Jet2 a, double c) { return {a.f + c, a.d1, a.d2}; }
inline Jet2 operator+(double c, Jet2 a) { return a + c; }
inline Jet2 operator-(Jet2 a, double c) { return {a.f - c, a.d1, a.d2}; }
inline Jet2 operator-(double c, Jet2 a) { return {c - a.f, -a.d1, -a.d2}; }

inline Jet2 inv(Jet2 a) {
  double i = 1.0 / a.f;
  double d1 = -a.d1 * i * i;
  return {i, d1, (2 * a.d1 * a.d1 * i - a.d2) * i * i};
}
inline Jet2 operator/(Jet2 a, Jet2 b) { return a * inv(b); }
inline Jet2 operator/(Jet2 a, double c) { return a * (1.0 / c); }
inline Jet2 operator/(double c, Jet2 a) { return c * inv(a); }

inline Jet2 sqrt(Jet2 a) {
  double r = std::sqrt(a.f);
  double d1 = a.d1 / (2 * r);
  return {r, d1, (a.d2 / 2 - d1 * d1) / r};
}

inline Jet2 sin(Jet2 a) {
  double s = std::sin(a.f), c = std::cos(a.f);
  return {s, c * a.d1, c * a.d2 - s * a.d1 * a.d1};
}

inline Jet2 cos(Jet2 a) {
  double s = std::sin(a.f), c = std::cos(a.f);
  return {c, -s * a.d1, -s * a.d2 - c * a.d1 * a.d1};
}

// integer powers only; enough for the coefficient algebra
inline Jet2 powi(Jet2 a, int n) {
  Jet2 r = Jet2::con(1);
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

}  // namespace coldwave
