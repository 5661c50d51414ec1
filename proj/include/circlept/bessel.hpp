#pragma once

// Modified Bessel functions of the first kind I_l(x) for integer order, 0 <= x <= 50.

#include <cmath>

#include "circlept/types.hpp"

namespace circlept {

inline constexpr double kBesselMaxArgument = 50.0;

/// Power series sum_k (x/2)^{2k+l} / (k! (k+l)!).
///
/// All terms are positive, so summation is stable; the series is cut once the next
/// term falls below 1e-18 of the partial sum and the geometric remainder bound
/// confirms it. The leading term is formed in log space so large orders underflow
/// cleanly to zero instead of producing inf/inf.
template <typename Scalar>
Scalar bessel_i_series(Index order, Scalar x) {
  using std::exp;
  using std::log;
  using std::lgamma;
  if (order < 0 || !(x >= Scalar(0))) throw Error(ErrorCode::BadParams, "bessel_i needs order >= 0 and x >= 0");
  if (x > Scalar(kBesselMaxArgument)) throw Error(ErrorCode::Overflow, "bessel_i supports x <= 50");
  if (x == Scalar(0)) return order == 0 ? Scalar(1) : Scalar(0);

  const Scalar half = x / Scalar(2);
  const Scalar q = half * half;
  const Scalar l = static_cast<Scalar>(order);
  Scalar term = exp(l * log(half) - lgamma(l + Scalar(1)));
  if (term == Scalar(0)) return Scalar(0);
  Scalar sum = term;
  for (Index k = 1; k < 10000; ++k) {
    term *= q / (static_cast<Scalar>(k) * (static_cast<Scalar>(k) + l));
    sum += term;
    // remainder <= term * r / (1 - r), r = q / ((k+1)(k+1+l)) once r < 1
    const Scalar r = q / ((static_cast<Scalar>(k) + 1) * (static_cast<Scalar>(k) + 1 + l));
    if (r < Scalar(0.5) && term * r / (Scalar(1) - r) <= sum * Scalar(1e-19)) break;
  }
  return sum;
}

/// I_l(x) by the power series.
double bessel_i(Index order, double x);

/// I_0(x), ..., I_L(x) by Miller's downward recurrence normalized with the series I_0.
Vec bessel_i_sequence(Index max_order, double x);

}  // namespace circlept
