#pragma once

// Forward-mode dual numbers over an arbitrary scalar. Nesting Dual<Dual<double>> yields
// exact mixed second directional derivatives; the library uses up to five levels when
// evaluating iterated Lie brackets.

#include <cmath>
#include <cstddef>
#include <type_traits>

namespace subriemann {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value), d(0.0) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(T value, T derivative) : v(value), d(derivative) {}

  Dual& operator+=(const Dual& o) {
    v += o.v;
    d += o.d;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    d -= o.d;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    d = d * o.v + v * o.d;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const T inv = T(1.0) / o.v;
    v *= inv;
    d = (d - v * o.d) * inv;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T>
struct is_dual<Dual<T>> : std::true_type {};

/// Number of Dual layers wrapped around double.
template <class T>
struct dual_depth : std::integral_constant<int, 0> {};
template <class T>
struct dual_depth<Dual<T>> : std::integral_constant<int, 1 + dual_depth<T>::value> {};
template <class T>
inline constexpr int dual_depth_v = dual_depth<T>::value;

inline double primal(double x) { return x; }
template <class T>
double primal(const Dual<T>& x) {
  return primal(x.v);
}

// Scalar tower used throughout: Real<n> has n nested derivative layers.
using Real1 = Dual<double>;
using Real2 = Dual<Real1>;
using Real3 = Dual<Real2>;
using Real4 = Dual<Real3>;
using Real5 = Dual<Real4>;

template <class T>
Dual<T> operator+(Dual<T> a, const Dual<T>& b) {
  return a += b;
}
template <class T>
Dual<T> operator-(Dual<T> a, const Dual<T>& b) {
  return a -= b;
}
template <class T>
Dual<T> operator*(Dual<T> a, const Dual<T>& b) {
  return a *= b;
}
template <class T>
Dual<T> operator/(Dual<T> a, const Dual<T>& b) {
  return a /= b;
}
template <class T>
Dual<T> operator-(const Dual<T>& a) {
  return {-a.v, -a.d};
}

template <class T>
Dual<T> operator+(Dual<T> a, double b) {
  a.v += b;
  return a;
}
template <class T>
Dual<T> operator+(double b, Dual<T> a) {
  a.v += b;
  return a;
}
template <class T>
Dual<T> operator-(Dual<T> a, double b) {
  a.v -= b;
  return a;
}
template <class T>
Dual<T> operator-(double b, const Dual<T>& a) {
  return {b - a.v, -a.d};
}
template <class T>
Dual<T> operator*(const Dual<T>& a, double b) {
  return {a.v * b, a.d * b};
}
template <class T>
Dual<T> operator*(double b, const Dual<T>& a) {
  return {a.v * b, a.d * b};
}
template <class T>
Dual<T> operator/(const Dual<T>& a, double b) {
  return {a.v / b, a.d / b};
}
template <class T>
Dual<T> operator/(double b, const Dual<T>& a) {
  const T inv = T(1.0) / a.v;
  return {b * inv, -b * a.d * inv * inv};
}

template <class T>
Dual<T> sin(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {sin(a.v), a.d * cos(a.v)};
}
template <class T>
Dual<T> cos(const Dual<T>& a) {
  using std::cos;
  using std::sin;
  return {cos(a.v), -(a.d * sin(a.v))};
}
template <class T>
Dual<T> exp(const Dual<T>& a) {
  using std::exp;
  const T e = exp(a.v);
  return {e, a.d * e};
}
template <class T>
Dual<T> log(const Dual<T>& a) {
  using std::log;
  return {log(a.v), a.d / a.v};
}
template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  return {s, a.d / (2.0 * s)};
}

/// a^k for integer k (repeated squaring; k may be negative).
template <class T>
T ipow(const T& a, long k) {
  if (k < 0) return T(1.0) / ipow(a, -k);
  T result(1.0);
  T base = a;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

/// a^r for real r with a > 0.
template <class T>
Dual<T> pow(const Dual<T>& a, double r) {
  using std::pow;
  return {pow(a.v, r), a.d * r * pow(a.v, r - 1.0)};
}

}  // namespace subriemann
