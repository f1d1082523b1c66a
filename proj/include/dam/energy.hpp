#pragma once

#include <cassert>

namespace dam {

enum class EnergyKind { Polynomial, RectifiedPolynomial };

// Interaction energy family F(x) = x^n (polynomial) or max(x,0)^n (rectified).
// n = 2 polynomial is the standard quadratic associative memory.
struct EnergyModel {
  int power = 2;
  EnergyKind kind = EnergyKind::Polynomial;

  bool valid() const { return power >= 1; }
};

constexpr EnergyModel polynomial(int n) { return {n, EnergyKind::Polynomial}; }
constexpr EnergyModel rectified(int n) { return {n, EnergyKind::RectifiedPolynomial}; }

// x^p by repeated squaring; pow_int(x, 0) == 1 for every x, including 0.
// Real-valued std::pow is deliberately avoided: integer bases stay exact in
// double up to 2^53 and small powers cost a handful of multiplies.
template <class Scalar>
constexpr Scalar pow_int(Scalar x, int p) {
  assert(p >= 0);
  Scalar acc(1);
  Scalar base = x;
  while (p > 0) {
    if (p & 1) acc *= base;
    p >>= 1;
    if (p) base *= base;
  }
  return acc;
}

// Rectified power max(x,0)^p. rep(x, 0) is the unit step with rep(0,0) = 0,
// matching the zero branch of the rectified family.
template <class Scalar>
constexpr Scalar rep(Scalar x, int p) {
  if (x <= Scalar(0)) return Scalar(0);
  return p == 0 ? Scalar(1) : pow_int(x, p);
}

// Plain or rectified power p, selected by kind.
template <class Scalar>
constexpr Scalar kind_power(Scalar x, int p, EnergyKind kind) {
  return kind == EnergyKind::Polynomial ? pow_int(x, p) : rep(x, p);
}

template <class Scalar>
constexpr Scalar eval_F(Scalar x, const EnergyModel& model) {
  assert(model.valid());
  return kind_power(x, model.power, model.kind);
}

// F'(x). The rectified kind takes the subgradient 0 at x = 0, so f is the
// zero function on x <= 0 for every power.
template <class Scalar>
constexpr Scalar eval_f(Scalar x, const EnergyModel& model) {
  assert(model.valid());
  return Scalar(model.power) * kind_power(x, model.power - 1, model.kind);
}

}  // namespace dam
