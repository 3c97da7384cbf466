#ifndef OPTOQNG_STATES_HPP
#define OPTOQNG_STATES_HPP

#include "optoqng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

namespace optoqng {

/// Phonon/photon-number probabilities p_0 .. p_kmax of a Fock-diagonal state.
class FockDistribution {
public:
  FockDistribution() = default;
  explicit FockDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {}

  static FockDistribution fock_state(int m, int k_max) {
    detail::require(m >= 0 && k_max >= m, "fock_state: need 0 <= m <= k_max");
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
    p[static_cast<std::size_t>(m)] = 1.0;
    return FockDistribution(std::move(p));
  }

  static FockDistribution thermal(double n, int k_max) {
    detail::require(n >= 0.0 && k_max >= 0, "thermal: need n >= 0 and k_max >= 0");
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1);
    const double x = n / (n + 1.0);
    double term = 1.0 / (n + 1.0);
    for (auto& pk : p) {
      pk = term;
      term *= x;
    }
    return FockDistribution(std::move(p));
  }

  /// Ideal a^{dag j} rho_th(n0) a^j (normalized):
  /// p_k = C(k, j) n0^(k-j) / (n0 + 1)^(k+1).
  static FockDistribution phonon_added_thermal(double n0, int added, int k_max) {
    detail::require(n0 >= 0.0 && added >= 0 && k_max >= added,
                    "phonon_added_thermal: need n0 >= 0 and k_max >= added");
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (int k = added; k <= k_max; ++k) {
      const double log_binom =
          std::lgamma(k + 1.0) - std::lgamma(added + 1.0) - std::lgamma(k - added + 1.0);
      if (n0 == 0.0 && k > added) continue;
      const double log_power = (k - added) > 0 ? (k - added) * std::log(n0) : 0.0;
      p[static_cast<std::size_t>(k)] = std::exp(log_binom + log_power - (k + 1.0) * std::log1p(n0));
    }
    return FockDistribution(std::move(p));
  }

  /// Ideal single-phonon-subtracted thermal state, p_n = (n+1) n0^n / (n0+1)^(n+2).
  static FockDistribution phonon_subtracted_thermal(double n0, int k_max) {
    detail::require(n0 > 0.0 && k_max >= 0, "phonon_subtracted_thermal: need n0 > 0");
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1);
    for (int n = 0; n <= k_max; ++n) {
      p[static_cast<std::size_t>(n)] =
          (n + 1.0) * std::exp(n * std::log(n0) - (n + 2.0) * std::log1p(n0));
    }
    return FockDistribution(std::move(p));
  }

  std::size_t size() const { return p_.size(); }
  int k_max() const { return static_cast<int>(p_.size()) - 1; }
  double operator[](std::size_t k) const { return k < p_.size() ? p_[k] : 0.0; }
  std::span<const double> values() const { return p_; }
  const std::vector<double>& vector() const { return p_; }
  double total() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

  FockDistribution normalized() const {
    const double s = total();
    detail::require(s > 0.0, "cannot normalize an empty distribution");
    std::vector<double> p = p_;
    for (auto& x : p) x /= s;
    return FockDistribution(std::move(p));
  }

  friend bool operator==(const FockDistribution&, const FockDistribution&) = default;

private:
  std::vector<double> p_;
};

/// Loss channel on a Fock-diagonal state (binomial thinning with survival 1 - zeta).
inline FockDistribution attenuate(const FockDistribution& state, double zeta) {
  detail::require(zeta >= 0.0 && zeta <= 1.0, "loss zeta must lie in [0, 1]");
  const std::size_t size = state.size();
  std::vector<double> out(size, 0.0);
  const double eta = 1.0 - zeta;
  for (std::size_t n = 0; n < size; ++n) {
    const double pn = state[n];
    if (pn == 0.0) continue;
    for (std::size_t k = 0; k <= n; ++k) {
      double term;
      if (eta == 0.0) {
        term = (k == 0) ? 1.0 : 0.0;
      } else if (zeta == 0.0) {
        term = (k == n) ? 1.0 : 0.0;
      } else {
        const double log_binom = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
        term = std::exp(log_binom + static_cast<double>(k) * std::log(eta) +
                        static_cast<double>(n - k) * std::log(zeta));
      }
      out[k] += pn * term;
    }
  }
  return FockDistribution(std::move(out));
}

struct ThermalComponent {
  double weight;
  double occupation;
};

/**
 * Phase-insensitive state written as a signed mixture of thermal states,
 * rho = sum_j w_j rho_th(n_j) with sum_j w_j = 1. Individual weights may be
 * negative; the mixture as a whole must still be a density operator.
 */
class SignedThermalMixture {
public:
  static constexpr double prune_threshold = 1e-14;

  SignedThermalMixture() : components_{{1.0, 0.0}} {}

  static SignedThermalMixture thermal(double occupation) {
    detail::require(occupation >= 0.0, "thermal occupation must be non-negative");
    return SignedThermalMixture(std::vector<ThermalComponent>{{1.0, occupation}});
  }

  /// Normalizes the weights, merges equal occupations and drops negligible terms.
  static SignedThermalMixture from_unnormalized(std::vector<ThermalComponent> parts) {
    for (auto& c : parts) {
      detail::require(std::isfinite(c.weight) && std::isfinite(c.occupation),
                      "mixture component is not finite");
      if (c.occupation < 0.0) {
        if (c.occupation < -1e-10 * std::max(1.0, std::abs(c.weight)))
          throw NumericalError("mixture component has negative occupation");
        c.occupation = 0.0;
      }
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.occupation < b.occupation; });
    std::vector<ThermalComponent> merged;
    for (const auto& c : parts) {
      if (!merged.empty() &&
          std::abs(merged.back().occupation - c.occupation) <=
              1e-12 * std::max(1.0, c.occupation)) {
        merged.back().weight += c.weight;
      } else {
        merged.push_back(c);
      }
    }
    double total = 0.0;
    for (const auto& c : merged) total += c.weight;
    if (!(std::abs(total) > 0.0)) throw NumericalError("mixture weights sum to zero");
    std::vector<ThermalComponent> kept;
    for (auto c : merged) {
      c.weight /= total;
      if (std::abs(c.weight) >= prune_threshold) kept.push_back(c);
    }
    return SignedThermalMixture(std::move(kept));
  }

  const std::vector<ThermalComponent>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }

  double weight_sum() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight;
    return s;
  }

  /// Apply a single-mode phase-insensitive Gaussian channel n -> f(n) to every term.
  template <typename Map>
  SignedThermalMixture map_occupations(Map&& map) const {
    std::vector<ThermalComponent> out;
    out.reserve(components_.size());
    for (const auto& c : components_) out.push_back({c.weight, map(c.occupation)});
    return from_unnormalized(std::move(out));
  }

  /// p_k = sum_j w_j n_j^k / (n_j + 1)^(k+1).
  FockDistribution fock(int k_max) const {
    detail::require(k_max >= 0, "k_max must be non-negative");
    std::vector<double> p(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (const auto& c : components_) {
      const double x = c.occupation / (c.occupation + 1.0);
      double term = c.weight / (c.occupation + 1.0);
      for (auto& pk : p) {
        pk += term;
        term *= x;
      }
    }
    return FockDistribution(std::move(p));
  }

  double mean_occupation() const {
    double s = 0.0;
    for (const auto& c : components_) s += c.weight * c.occupation;
    return s;
  }

  /// Radial Wigner function, normalized so that 2 pi int r W dr = 1.
  double wigner(double r) const {
    double w = 0.0;
    for (const auto& c : components_) {
      const double var = 2.0 * c.occupation + 1.0;
      w += c.weight * std::exp(-r * r / (2.0 * var)) / var;
    }
    return w / (2.0 * std::numbers::pi);
  }

  /// Fock probabilities within [-tol, 1 + tol] up to `cutoff` and summing to ~1.
  bool is_physical(int cutoff = 200, double tolerance = 1e-10) const {
    const auto p = fock(cutoff);
    for (double pk : p.values())
      if (pk < -tolerance || pk > 1.0 + tolerance) return false;
    return std::abs(weight_sum() - 1.0) <= 1e-12;
  }

private:
  explicit SignedThermalMixture(std::vector<ThermalComponent> parts)
      : components_(std::move(parts)) {}

  std::vector<ThermalComponent> components_;
};

}  // namespace optoqng

#endif  // OPTOQNG_STATES_HPP
