#ifndef OPTOQNG_SPECIAL_HPP
#define OPTOQNG_SPECIAL_HPP

#include "optoqng/errors.hpp"

#include <cmath>
#include <vector>

namespace optoqng {

/// Generalized Laguerre polynomial L_n^{(alpha)}(x) by the three-term recurrence.
inline double laguerre(int n, double alpha, double x) {
  detail::require(n >= 0, "laguerre: degree must be non-negative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + alpha - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double laguerre(int n, double x) { return laguerre(n, 0.0, x); }

/// e^{-x/2} L_k(x) for k = 0..n. The scaling is applied to the seeds, so
/// large x does not overflow before the Gaussian factor kicks in.
inline std::vector<double> scaled_laguerre_sequence(int n, double x) {
  detail::require(n >= 0, "laguerre: degree must be non-negative");
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  const double g = std::exp(-0.5 * x);
  out[0] = g;
  if (n == 0) return out;
  out[1] = (1.0 - x) * g;
  for (int k = 1; k < n; ++k) {
    out[static_cast<std::size_t>(k) + 1] =
        ((2.0 * k + 1.0 - x) * out[static_cast<std::size_t>(k)] - k * out[static_cast<std::size_t>(k) - 1]) /
        (k + 1.0);
  }
  return out;
}

}  // namespace optoqng

#endif  // OPTOQNG_SPECIAL_HPP
