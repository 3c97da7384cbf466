#ifndef OPTOQNG_BUNCHING_HPP
#define OPTOQNG_BUNCHING_HPP

// N identical Fock-diagonal copies interfering in a balanced multiport,
// conditioned on every phonon leaving through one port.

#include "optoqng/errors.hpp"
#include "optoqng/qng.hpp"
#include "optoqng/states.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace optoqng {

inline constexpr int max_bunched_excitations = 200;

struct BunchingSpec {
  int copies = 1;
  FockDistribution input;
  std::vector<double> r_grid = radial_grid(10.0, 0.02);

  void validate() const {
    detail::require(copies >= 1, "bunching: need at least one copy");
    detail::require(input.size() > 0, "bunching: empty input distribution");
    detail::require(std::abs(input.total() - 1.0) <= 1e-6, "bunching: input must be normalized");
    if (static_cast<long>(copies) * input.k_max() > max_bunched_excitations)
      throw InvalidArgument("bunching: copies * cutoff exceeds " +
                            std::to_string(max_bunched_excitations));
  }
};

/**
 * Fock distribution of the bunched output. Weights over the total excitation
 * s = m_1 + ... + m_N are accumulated one copy at a time,
 *   d_{j+1}(s) = sum_m C(s, m) d_j(s - m) p_m / N^m,
 * which equals s!/N^s times the N-fold convolution of p_m/m!.
 */
inline FockDistribution bunched_distribution(const BunchingSpec& spec) {
  spec.validate();
  const int m_max = spec.input.k_max();
  const int s_max = spec.copies * m_max;
  const double n = spec.copies;
  std::vector<double> scaled(static_cast<std::size_t>(m_max) + 1);
  for (int m = 0; m <= m_max; ++m)
    scaled[static_cast<std::size_t>(m)] = spec.input[static_cast<std::size_t>(m)] * std::pow(n, -m);

  std::vector<double> d(static_cast<std::size_t>(s_max) + 1, 0.0);
  d[0] = 1.0;
  for (int j = 0; j < spec.copies; ++j) {
    std::vector<double> next(d.size(), 0.0);
    const int reach = (j + 1) * m_max;
    for (int s = 0; s <= reach; ++s) {
      double acc = 0.0;
      for (int m = 0; m <= std::min(s, m_max); ++m) {
        const double prev = d[static_cast<std::size_t>(s - m)];
        if (prev == 0.0) continue;
        const double binom = std::exp(std::lgamma(s + 1.0) - std::lgamma(m + 1.0) - std::lgamma(s - m + 1.0));
        acc += binom * prev * scaled[static_cast<std::size_t>(m)];
      }
      next[static_cast<std::size_t>(s)] = acc;
    }
    d = std::move(next);
  }
  double total = 0.0;
  for (double v : d) total += v;
  if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("bunching: degenerate output weights");
  for (auto& v : d) v /= total;
  return FockDistribution(std::move(d));
}

/// Normalized Wigner cut of the bunched output port.
inline WignerCut bunched_wigner(const BunchingSpec& spec) {
  return wigner_cut(bunched_distribution(spec), spec.r_grid);
}

/// Tr[rho1 rho2] = 4 pi * (2 pi int r W1 W2 dr) for phase-insensitive states.
inline double rotational_overlap(const WignerCut& w1, const WignerCut& w2) {
  if (w1.r != w2.r) throw InvalidArgument("rotational_overlap: cuts are on different grids");
  std::vector<double> product(w1.w.size());
  for (std::size_t i = 0; i < product.size(); ++i) product[i] = w1.w[i] * w2.w[i];
  return 4.0 * std::numbers::pi * 2.0 * std::numbers::pi * w1.radial_integral(product);
}

/// Indices i where w changes sign between grid points i-1 and i (exact zeros skipped).
inline std::vector<std::size_t> sign_changes(const WignerCut& cut, double floor = 0.0) {
  std::vector<std::size_t> out;
  int last = 0;
  for (std::size_t i = 0; i < cut.w.size(); ++i) {
    const double v = cut.w[i];
    if (std::abs(v) <= floor) continue;
    const int sign = v > 0.0 ? 1 : -1;
    if (last != 0 && sign != last) out.push_back(i);
    last = sign;
  }
  return out;
}

/// Interior local extrema (strict on at least one side) of the cut.
inline std::vector<std::size_t> local_extrema(const WignerCut& cut) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < cut.w.size(); ++i) {
    const double a = cut.w[i - 1], b = cut.w[i], c = cut.w[i + 1];
    if ((b > a && b >= c) || (b < a && b <= c)) out.push_back(i);
  }
  return out;
}

}  // namespace optoqng

#endif  // OPTOQNG_BUNCHING_HPP
