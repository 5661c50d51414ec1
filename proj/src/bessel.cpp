#include "circlept/bessel.hpp"

#include <algorithm>

namespace circlept {

double bessel_i(Index order, double x) { return bessel_i_series<double>(order, x); }

Vec bessel_i_sequence(Index max_order, double x) {
  if (max_order < 0 || !(x >= 0.0)) throw Error(ErrorCode::BadParams, "bessel_i_sequence needs L >= 0 and x >= 0");
  if (x > kBesselMaxArgument) throw Error(ErrorCode::Overflow, "bessel_i supports x <= 50");
  Vec out = Vec::Zero(max_order + 1);
  out[0] = bessel_i(0, x);
  if (x == 0.0 || max_order == 0) return out;

  // Start well past both L and x: the ratio I_{k+1}/I_k ~ x/(2k) makes the error of the
  // arbitrary starting values decay geometrically on the way down.
  const Index start = std::max<Index>(max_order, static_cast<Index>(x)) + 60 +
                      static_cast<Index>(2.0 * std::sqrt(40.0 * static_cast<double>(max_order + 1)));
  const double rescale = 1e250;
  double above = 0.0;
  double current = 1e-300;
  for (Index k = start; k >= 1; --k) {
    const double below = above + (2.0 * static_cast<double>(k) / x) * current;
    above = current;
    current = below;
    if (k - 1 <= max_order) out[k - 1] = current;
    if (std::abs(current) > rescale) {
      current /= rescale;
      above /= rescale;
      for (Index j = k - 1; j <= max_order; ++j) out[j] /= rescale;
    }
  }
  // out[k] now holds I_k(x) up to a common factor; fix it with I_0 from the series.
  const double factor = bessel_i(0, x) / out[0];
  out *= factor;
  return out;
}

}  // namespace circlept
