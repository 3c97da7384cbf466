#ifndef OPTOQNG_SENSING_HPP
#define OPTOQNG_SENSING_HPP

// Estimating the magnitude N_c of a phase-randomized displacement with
// Fock-diagonal probes and phonon counting.

#include "optoqng/errors.hpp"
#include "optoqng/special.hpp"
#include "optoqng/states.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace optoqng {

struct ProbeState {
  FockDistribution distribution;
  std::string label;

  ProbeState(FockDistribution p, std::string name) : distribution(std::move(p)), label(std::move(name)) {
    detail::require(distribution.size() > 0, "probe distribution is empty");
    detail::require(std::abs(distribution.total() - 1.0) <= 1e-6, "probe distribution must be normalized");
    for (double v : distribution.values())
      detail::require(v >= -1e-10, "probe distribution has negative entries");
  }

  /// Fock distribution of a heralded mixture, truncated at k_max and renormalized.
  static ProbeState from_mixture(const SignedThermalMixture& state, std::string name, int k_max = 80) {
    return ProbeState(state.fock(k_max).normalized(), std::move(name));
  }
};

/**
 * |<n|D(sqrt(N_c))|m>|^2 = (m_<!/m_>!) N_c^{|n-m|} e^{-N_c} [L_{m_<}^{(|n-m|)}(N_c)]^2,
 * evaluated in the log domain for the prefactor.
 */
inline double displacement_kernel(int n, int m, double n_c) {
  detail::require(n >= 0 && m >= 0 && n_c >= 0.0, "displacement_kernel: bad arguments");
  if (n_c == 0.0) return n == m ? 1.0 : 0.0;
  const int lo = std::min(n, m);
  const int hi = std::max(n, m);
  const double lag = laguerre(lo, static_cast<double>(hi - lo), n_c);
  if (lag == 0.0) return 0.0;
  const double log_pref = std::lgamma(lo + 1.0) - std::lgamma(hi + 1.0) + (hi - lo) * std::log(n_c) - n_c;
  return std::exp(log_pref + 2.0 * std::log(std::abs(lag)));
}

inline int default_output_cutoff(int input_k_max, double n_c) {
  return input_k_max + static_cast<int>(std::ceil(10.0 * (1.0 + n_c))) + 10;
}

/// Row P(n | m, N_c) for n = 0..n_max.
inline std::vector<double> displaced_fock_distribution(int m, double n_c, int n_max) {
  detail::require(m >= 0 && n_c >= 0.0, "displaced_fock_distribution: need m >= 0, N_c >= 0");
  detail::require(n_max >= m + 10.0 * (1.0 + n_c), "displaced_fock_distribution: n_max too small");
  std::vector<double> row(static_cast<std::size_t>(n_max) + 1);
  double total = 0.0;
  for (int n = 0; n <= n_max; ++n) total += row[static_cast<std::size_t>(n)] = displacement_kernel(n, m, n_c);
  if (std::abs(1.0 - total) > 1e-8)
    throw NumericalError("displaced_fock_distribution: truncation leakage " + std::to_string(1.0 - total));
  return row;
}

/// p_f(n | N_c) = sum_m p_in(m) P(n | m, N_c).
inline FockDistribution phase_randomized_output(const ProbeState& probe, double n_c, int n_max = -1) {
  detail::require(n_c >= 0.0, "phase_randomized_output: N_c must be non-negative");
  const int k_in = probe.distribution.k_max();
  if (n_max < 0) n_max = default_output_cutoff(k_in, n_c);
  std::vector<double> out(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int m = 0; m <= k_in; ++m) {
    const double w = probe.distribution[static_cast<std::size_t>(m)];
    if (w == 0.0) continue;
    for (int n = 0; n <= n_max; ++n) out[static_cast<std::size_t>(n)] += w * displacement_kernel(n, m, n_c);
  }
  return FockDistribution(std::move(out));
}

namespace detail {

inline constexpr double fisher_relative_step = 1e-4;
inline constexpr double fisher_probability_floor = 1e-14;

// k_max < 0 means full resolution.
inline double fisher_at_step(const ProbeState& probe, double n_c, int n_max, int k_max, double h) {
  const auto p = phase_randomized_output(probe, n_c, n_max);
  const auto up = phase_randomized_output(probe, n_c + h, n_max);
  const auto down = phase_randomized_output(probe, n_c - h, n_max);
  const std::size_t size = p.size();
  const std::size_t resolved = k_max < 0 ? size : std::min(size, static_cast<std::size_t>(k_max) + 1);
  double f = 0.0;
  for (std::size_t n = 0; n < resolved; ++n) {
    if (p[n] < fisher_probability_floor) continue;
    const double d = (up[n] - down[n]) / (2.0 * h);
    f += d * d / p[n];
  }
  if (resolved < size) {
    double tail = 0.0;
    double d_tail = 0.0;
    for (std::size_t n = resolved; n < size; ++n) {
      tail += p[n];
      d_tail += (up[n] - down[n]) / (2.0 * h);
    }
    if (tail >= fisher_probability_floor) f += d_tail * d_tail / tail;
  }
  return f;
}

inline double checked_fisher(const ProbeState& probe, double n_c, int n_max, int k_max) {
  detail::require(n_c > 0.0, "fisher_information: N_c must be positive");
  if (n_max < 0) n_max = default_output_cutoff(probe.distribution.k_max(), n_c);
  const double h = fisher_relative_step * n_c;
  const double f = fisher_at_step(probe, n_c, n_max, k_max, h);
  const double f_half = fisher_at_step(probe, n_c, n_max, k_max, 0.5 * h);
  if (!(f > 0.0) || std::abs(f - f_half) > 1e-3 * f)
    throw NumericalError("fisher_information: finite-difference derivative is unstable");
  return f;
}

}  // namespace detail

/// F = sum_n (d p_f / d N_c)^2 / p_f with a central finite difference.
inline double fisher_information(const ProbeState& probe, double n_c, int n_max = -1) {
  return detail::checked_fisher(probe, n_c, n_max, -1);
}

/// Fisher information of a detector resolving 0..k_max and lumping the rest into one outcome.
inline double fisher_finite_resolution(const ProbeState& probe, double n_c, int k_max, int n_max = -1) {
  detail::require(k_max >= 0, "fisher_finite_resolution: k_max must be non-negative");
  return detail::checked_fisher(probe, n_c, n_max, k_max);
}

/// Cramer-Rao bound on the variance for M independent probes.
inline double cramer_rao_error(double fisher, int copies) {
  detail::require(fisher > 0.0, "cramer_rao_error: Fisher information must be positive");
  detail::require(copies >= 1, "cramer_rao_error: need at least one copy");
  return 1.0 / (copies * fisher);
}

/// 40 log-spaced points in [1e-3, 1].
inline std::vector<double> default_sensing_grid(int points = 40, double lo = 1e-3, double hi = 1.0) {
  detail::require(points >= 2 && lo > 0.0 && hi > lo, "sensing grid: bad bounds");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return g;
}

inline constexpr double linear_fit_limit = 0.3;
inline constexpr double error_scale = 1e4;

/**
 * Slope of the ordinary least-squares line (with intercept) through
 * (N_c, 1e4 * Delta^2 N_c) over the points with N_c <= 0.3.
 */
inline double linear_fit_coefficient(const std::vector<double>& n_c, const std::vector<double>& delta2) {
  detail::require(n_c.size() == delta2.size(), "linear_fit_coefficient: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < n_c.size(); ++i) {
    if (n_c[i] <= linear_fit_limit) {
      xs.push_back(n_c[i]);
      ys.push_back(error_scale * delta2[i]);
    }
  }
  detail::require(xs.size() >= 10, "linear_fit_coefficient: need at least 10 points with N_c <= 0.3");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

struct SensingReport {
  std::string label;
  int copies = 0;
  std::vector<double> n_c;
  std::vector<double> fisher;
  std::vector<double> delta2;
  double fit_coefficient = 0.0;

  /// 1e4 * Delta^2 N_c / N_c at grid point i.
  double scaled_error(std::size_t i) const { return error_scale * delta2[i] / n_c[i]; }
};

/// Fisher curve, Cramer-Rao errors and the linear-fit coefficient. A
/// non-negative `k_max` restricts the detector resolution.
inline SensingReport sensing_report(const ProbeState& probe, int copies,
                                    const std::vector<double>& grid = default_sensing_grid(),
                                    int k_max = -1) {
  SensingReport rep{probe.label, copies, grid, {}, {}, 0.0};
  for (double x : grid) {
    const double f = k_max < 0 ? fisher_information(probe, x) : fisher_finite_resolution(probe, x, k_max);
    rep.fisher.push_back(f);
    rep.delta2.push_back(cramer_rao_error(f, copies));
  }
  rep.fit_coefficient = linear_fit_coefficient(rep.n_c, rep.delta2);
  return rep;
}

}  // namespace optoqng

#endif  // OPTOQNG_SENSING_HPP
