#ifndef OPTOQNG_QNG_HPP
#define OPTOQNG_QNG_HPP

// Multiphonon quantum non-Gaussianity thresholds, Wigner cuts and the two
// robustness measures (QNG depth under thermalization, negativity depth
// under loss).

#include "optoqng/errors.hpp"
#include "optoqng/gaussian_dynamics.hpp"
#include "optoqng/heralding.hpp"
#include "optoqng/nelder_mead.hpp"
#include "optoqng/special.hpp"
#include "optoqng/states.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace optoqng {

// ---------------------------------------------------------------- Wigner cuts

/// Radial cut W(r) of a phase-insensitive state, normalized so that
/// the phase-space integral 2 pi int r W dr equals one.
struct WignerCut {
  std::vector<double> r;
  std::vector<double> w;

  /// 2 pi int r W dr by Simpson's rule (trapezoid if the panel count is odd).
  double normalization() const { return 2.0 * std::numbers::pi * radial_integral(w); }

  double radial_integral(const std::vector<double>& values) const {
    detail::require(values.size() == r.size() && r.size() >= 2, "WignerCut: grid mismatch");
    const std::size_t panels = r.size() - 1;
    const double h = (r.back() - r.front()) / static_cast<double>(panels);
    bool uniform = true;
    for (std::size_t i = 1; i < r.size(); ++i)
      uniform = uniform && std::abs(r[i] - r[i - 1] - h) <= 1e-9 * std::max(1.0, h);
    if (uniform && panels % 2 == 0) {
      double s = r.front() * values.front() + r.back() * values.back();
      for (std::size_t i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * r[i] * values[i];
      return s * h / 3.0;
    }
    double s = 0.0;
    for (std::size_t i = 1; i < r.size(); ++i)
      s += 0.5 * (r[i] - r[i - 1]) * (r[i] * values[i] + r[i - 1] * values[i - 1]);
    return s;
  }

  double minimum() const { return *std::min_element(w.begin(), w.end()); }
};

/// Uniform grid 0, step, ..., r_max.
inline std::vector<double> radial_grid(double r_max, double step) {
  detail::require(r_max > 0.0 && step > 0.0, "radial_grid: r_max and step must be positive");
  const auto n = static_cast<std::size_t>(std::llround(r_max / step));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = step * static_cast<double>(i);
  return g;
}

/// W(r) = (1/2pi) sum_k p_k (-1)^k e^{-r^2/2} L_k(r^2).
inline double wigner_value(const FockDistribution& p, double r) {
  if (p.size() == 0) return 0.0;
  const auto lag = scaled_laguerre_sequence(p.k_max(), r * r);
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += (k % 2 ? -1.0 : 1.0) * p[k] * lag[k];
  return s / (2.0 * std::numbers::pi);
}

inline WignerCut wigner_cut(const FockDistribution& p, const std::vector<double>& r_grid) {
  detail::require(p.total() <= 1.0 + 1e-9, "wigner_cut: probabilities sum above one");
  WignerCut cut{r_grid, std::vector<double>(r_grid.size())};
  for (std::size_t i = 0; i < r_grid.size(); ++i) cut.w[i] = wigner_value(p, r_grid[i]);
  return cut;
}

inline WignerCut wigner_cut(const SignedThermalMixture& state, const std::vector<double>& r_grid) {
  WignerCut cut{r_grid, std::vector<double>(r_grid.size())};
  for (std::size_t i = 0; i < r_grid.size(); ++i) cut.w[i] = state.wigner(r_grid[i]);
  return cut;
}

// ------------------------------------------------------------ QNG thresholds

/// Operator order inside the threshold overlap <k| . |psi_{k-1}>.
enum class OperatorOrder { displace_squeeze, squeeze_displace };

namespace detail {

// exp(t G) for a real antisymmetric G through the spectrum of the Hermitian iG.
class AntisymmetricExponential {
public:
  explicit AntisymmetricExponential(const Eigen::MatrixXd& generator) {
    using Complex = std::complex<double>;
    const Eigen::MatrixXcd h = Complex(0.0, 1.0) * generator.cast<Complex>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    vectors_ = solver.eigenvectors();
    values_ = solver.eigenvalues();
  }

  /// Rows [0, rows) and columns [0, cols) of exp(t G).
  Eigen::MatrixXd corner(Eigen::Index rows, Eigen::Index cols, double t) const {
    using Complex = std::complex<double>;
    Eigen::VectorXcd phase(values_.size());
    for (Eigen::Index j = 0; j < values_.size(); ++j) phase(j) = std::exp(Complex(0.0, -t * values_(j)));
    return (vectors_.topRows(rows) * phase.asDiagonal() * vectors_.topRows(cols).adjoint()).real();
  }

  /// Row `row`, columns [0, cols).
  Eigen::RowVectorXd row(Eigen::Index row, Eigen::Index cols, double t) const {
    using Complex = std::complex<double>;
    Eigen::VectorXcd phase(values_.size());
    for (Eigen::Index j = 0; j < values_.size(); ++j) phase(j) = std::exp(Complex(0.0, -t * values_(j)));
    return (vectors_.row(row) * phase.asDiagonal() * vectors_.topRows(cols).adjoint()).real();
  }

private:
  Eigen::MatrixXcd vectors_;
  Eigen::VectorXd values_;
};

inline Eigen::MatrixXd annihilation(Eigen::Index n) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a(i, i + 1) = std::sqrt(static_cast<double>(i + 1));
  return a;
}

}  // namespace detail

inline constexpr int threshold_padding = 40;

inline int default_threshold_cutoff(int k) { return 4 * k + 20; }

/// Generators of D(alpha) = exp(alpha (a - a^dag)) and S(r) = exp(r (a^dag^2 - a^2))
/// for real parameters, truncated at `dimension`.
inline Eigen::MatrixXd displacement_generator(Eigen::Index dimension) {
  const Eigen::MatrixXd a = detail::annihilation(dimension);
  return a - a.transpose();
}

inline Eigen::MatrixXd squeezing_generator(Eigen::Index dimension) {
  const Eigen::MatrixXd a = detail::annihilation(dimension);
  const Eigen::MatrixXd a2 = a * a;
  return a2.transpose() - a2;
}

/**
 * Evaluates sum_{i<k} |<k| D S |i>|^2 (or with S D) for a fixed truncation,
 * i.e. the largest k-phonon probability reachable from superpositions of
 * |0>..|k-1> by the given Gaussian unitary.
 */
class ThresholdLandscape {
public:
  ThresholdLandscape(int k_max, int cutoff, OperatorOrder order = OperatorOrder::displace_squeeze)
      : k_max_(k_max),
        cutoff_(cutoff),
        order_(order),
        d_(displacement_generator(cutoff + threshold_padding)),
        s_(squeezing_generator(cutoff + threshold_padding)) {
    detail::require(k_max >= 1, "threshold: k must be >= 1");
    detail::require(cutoff >= default_threshold_cutoff(k_max), "threshold: cutoff must be >= 4k + 20");
  }

  int k_max() const { return k_max_; }
  int cutoff() const { return cutoff_; }
  OperatorOrder order() const { return order_; }

  double probability(int k, double alpha, double r) const {
    detail::require(k >= 1 && k <= k_max_, "threshold: k out of range");
    const auto& left = order_ == OperatorOrder::displace_squeeze ? d_ : s_;
    const auto& right = order_ == OperatorOrder::displace_squeeze ? s_ : d_;
    const double tl = order_ == OperatorOrder::displace_squeeze ? alpha : r;
    const double tr = order_ == OperatorOrder::displace_squeeze ? r : alpha;
    const Eigen::RowVectorXd amp = left.row(k, cutoff_, tl) * right.corner(cutoff_, k, tr);
    return amp.squaredNorm();
  }

  /// Row block [0, k_max] of the left operator and column block [0, k_max) of
  /// the right operator, for grid caching.
  Eigen::MatrixXd left_rows(double t) const {
    return (order_ == OperatorOrder::displace_squeeze ? d_ : s_).corner(k_max_ + 1, cutoff_, t);
  }
  Eigen::MatrixXd right_columns(double t) const {
    return (order_ == OperatorOrder::displace_squeeze ? s_ : d_).corner(cutoff_, k_max_, t);
  }

private:
  int k_max_;
  int cutoff_;
  OperatorOrder order_;
  detail::AntisymmetricExponential d_;
  detail::AntisymmetricExponential s_;
};

struct ThresholdResult {
  int k = 0;
  double probability = 0.0;
  double alpha = 0.0;
  double r = 0.0;
  int agreeing_starts = 0;
};

struct ThresholdSearchOptions {
  double alpha_max = 3.0;
  double r_max = 1.5;
  double alpha_step = 0.05;
  double r_step = 0.01;
  int starts = 16;
  double agreement = 1e-3;
};

/// k -> p_k^G for k = 1..k_max.
class ThresholdTable {
public:
  ThresholdTable() = default;
  explicit ThresholdTable(std::vector<ThresholdResult> rows) : rows_(std::move(rows)) {}

  int k_max() const { return static_cast<int>(rows_.size()); }
  double operator[](int k) const { return at(k).probability; }
  const ThresholdResult& at(int k) const {
    detail::require(k >= 1 && k <= k_max(), "threshold table: k out of range");
    return rows_[static_cast<std::size_t>(k) - 1];
  }
  const std::vector<ThresholdResult>& rows() const { return rows_; }

private:
  std::vector<ThresholdResult> rows_;
};

namespace detail {

struct GridPoint {
  double value;
  std::size_t ia;
  std::size_t ir;
};

inline ThresholdResult refine_threshold(const ThresholdLandscape& land, int k,
                                        const std::vector<double>& alphas,
                                        const std::vector<double>& rs,
                                        const std::vector<double>& grid,
                                        const ThresholdSearchOptions& opt) {
  const std::size_t na = alphas.size();
  const std::size_t nr = rs.size();
  auto at = [&](std::size_t ia, std::size_t ir) { return grid[ia * nr + ir]; };

  std::vector<GridPoint> maxima;
  std::vector<GridPoint> all;
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t ir = 0; ir < nr; ++ir) {
      const double v = at(ia, ir);
      all.push_back({v, ia, ir});
      bool peak = true;
      for (int da = -1; da <= 1 && peak; ++da) {
        for (int dr = -1; dr <= 1; ++dr) {
          if (da == 0 && dr == 0) continue;
          const auto ja = static_cast<long>(ia) + da;
          const auto jr = static_cast<long>(ir) + dr;
          if (ja < 0 || jr < 0 || ja >= static_cast<long>(na) || jr >= static_cast<long>(nr)) continue;
          if (at(static_cast<std::size_t>(ja), static_cast<std::size_t>(jr)) > v) {
            peak = false;
            break;
          }
        }
      }
      if (peak) maxima.push_back({v, ia, ir});
    }
  }
  auto by_value = [](const GridPoint& a, const GridPoint& b) { return a.value > b.value; };
  std::sort(maxima.begin(), maxima.end(), by_value);
  if (maxima.size() < static_cast<std::size_t>(opt.starts)) {
    std::sort(all.begin(), all.end(), by_value);
    for (const auto& p : all) {
      if (maxima.size() >= static_cast<std::size_t>(opt.starts)) break;
      const bool seen = std::any_of(maxima.begin(), maxima.end(),
                                    [&](const GridPoint& m) { return m.ia == p.ia && m.ir == p.ir; });
      if (!seen) maxima.push_back(p);
    }
  }
  maxima.resize(std::min(maxima.size(), static_cast<std::size_t>(opt.starts)));

  const Eigen::Vector2d lower(0.0, -opt.r_max);
  const Eigen::Vector2d upper(opt.alpha_max, opt.r_max);
  auto objective = [&](const Eigen::VectorXd& x) { return -land.probability(k, x(0), x(1)); };
  NelderMeadOptions nm;
  nm.initial_step = 0.5 * opt.r_step;
  nm.x_tolerance = 1e-8;
  nm.f_tolerance = 1e-12;

  std::vector<NelderMeadResult> runs;
  for (const auto& m : maxima) {
    runs.push_back(nelder_mead(objective, Eigen::Vector2d(alphas[m.ia], rs[m.ir]), lower, upper, nm));
  }
  auto best_run = [&] {
    return *std::min_element(runs.begin(), runs.end(),
                             [](const auto& a, const auto& b) { return a.value < b.value; });
  };
  auto agreeing = [&](double best) {
    return static_cast<int>(std::count_if(runs.begin(), runs.end(), [&](const auto& r) {
      return std::abs(r.value - best) <= opt.agreement;
    }));
  };
  auto best = best_run();
  if (agreeing(best.value) < 2) {
    // Confirm an isolated optimum from nearby perturbed starts.
    const std::array<Eigen::Vector2d, 4> offsets{
        Eigen::Vector2d(opt.alpha_step, 0.0), Eigen::Vector2d(-opt.alpha_step, 0.0),
        Eigen::Vector2d(0.0, opt.r_step), Eigen::Vector2d(0.0, -opt.r_step)};
    for (const auto& o : offsets)
      runs.push_back(nelder_mead(objective, Eigen::VectorXd(best.x + o), lower, upper, nm));
    best = best_run();
  }
  const int agree = agreeing(best.value);
  if (agree < 2)
    throw ConvergenceError("qng_threshold: multi-start search did not converge for k = " +
                           std::to_string(k));
  return {k, -best.value, best.x(0), best.x(1), agree};
}

}  // namespace detail

/**
 * Absolute k-phonon QNG thresholds p_k^G for k = 1..k_max from one shared
 * truncation. The landscape is first tabulated on a grid over
 * (alpha, r) in [0, alpha_max] x [-r_max, r_max], then the best grid maxima
 * are polished by a bounded simplex search.
 */
inline ThresholdTable threshold_table(int k_max, int cutoff = -1,
                                      OperatorOrder order = OperatorOrder::displace_squeeze,
                                      const ThresholdSearchOptions& opt = {}) {
  if (cutoff < 0) cutoff = default_threshold_cutoff(k_max);
  const ThresholdLandscape land(k_max, cutoff, order);

  std::vector<double> alphas, rs;
  for (long i = 0; i <= std::lround(opt.alpha_max / opt.alpha_step); ++i) alphas.push_back(i * opt.alpha_step);
  const long nr_half = std::lround(opt.r_max / opt.r_step);
  for (long i = -nr_half; i <= nr_half; ++i) rs.push_back(i * opt.r_step);

  const bool ds = order == OperatorOrder::displace_squeeze;
  std::vector<Eigen::MatrixXd> left, right;
  for (double a : alphas) (ds ? left : right).push_back(ds ? land.left_rows(a) : land.right_columns(a));
  for (double r : rs) (ds ? right : left).push_back(ds ? land.right_columns(r) : land.left_rows(r));

  // grids[k-1][ia * nr + ir]
  std::vector<std::vector<double>> grids(static_cast<std::size_t>(k_max),
                                         std::vector<double>(alphas.size() * rs.size()));
  for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
    for (std::size_t ir = 0; ir < rs.size(); ++ir) {
      const Eigen::MatrixXd amp = ds ? Eigen::MatrixXd(left[ia] * right[ir])
                                     : Eigen::MatrixXd(left[ir] * right[ia]);
      for (int k = 1; k <= k_max; ++k) {
        grids[static_cast<std::size_t>(k) - 1][ia * rs.size() + ir] =
            amp.row(k).head(k).squaredNorm();
      }
    }
  }
  std::vector<ThresholdResult> rows;
  for (int k = 1; k <= k_max; ++k)
    rows.push_back(detail::refine_threshold(land, k, alphas, rs,
                                            grids[static_cast<std::size_t>(k) - 1], opt));
  return ThresholdTable(std::move(rows));
}

inline ThresholdResult qng_threshold_result(int k, int cutoff = -1,
                                            OperatorOrder order = OperatorOrder::displace_squeeze,
                                            const ThresholdSearchOptions& opt = {}) {
  detail::require(k >= 1, "qng_threshold: k must be >= 1");
  if (cutoff < 0) cutoff = default_threshold_cutoff(k);
  detail::require(cutoff >= default_threshold_cutoff(k), "qng_threshold: cutoff must be >= 4k + 20");
  // Lower rows of the table come for free with the shared grid.
  return threshold_table(k, cutoff, order, opt).at(k);
}

/// p_k^G, the largest k-phonon probability of a Gaussian-evolved superposition of |0>..|k-1>.
inline double qng_threshold(int k, int cutoff = -1, OperatorOrder order = OperatorOrder::displace_squeeze) {
  return qng_threshold_result(k, cutoff, order).probability;
}

// -------------------------------------------------------- Gaussian p0-p1 edge

/// Edge of the Gaussian region on the (p0, p1) plane, parametrized by r >= 0
/// with d^2 = (e^{4r} - 1)/4.
inline double gaussian_edge_p0(double r) {
  const double d2 = 0.25 * std::expm1(4.0 * r);
  return std::exp(-d2 * (1.0 - std::tanh(r))) / std::cosh(r);
}

inline double gaussian_edge_p1(double r) {
  const double d2 = 0.25 * std::expm1(4.0 * r);
  const double c = std::cosh(r);
  return d2 * std::exp(-d2 * (1.0 - std::tanh(r))) / (c * c * c);
}

/// Largest p1 reachable by a Gaussian state with vacuum probability p0.
inline double gaussian_boundary_p1(double p0) {
  detail::require(p0 > 0.0 && p0 <= 1.0, "gaussian_boundary_p1: p0 must lie in (0, 1]");
  if (p0 == 1.0) return 0.0;
  double lo = 0.0;
  double hi = 0.5;
  while (gaussian_edge_p0(hi) > p0) {
    hi *= 2.0;
    if (hi > 64.0) throw NumericalError("gaussian_boundary_p1: p0 too small to invert");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gaussian_edge_p0(mid) > p0 ? lo : hi) = mid;
  }
  return gaussian_edge_p1(0.5 * (lo + hi));
}

struct GaussianEdgePeak {
  double r;
  double p0;
  double p1;
};

/// Maximum of p1 along the edge: dense scan over r in [0, 3] and golden-section polish.
inline GaussianEdgePeak gaussian_boundary_peak() {
  constexpr int n = 3000;
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (gaussian_edge_p1(3.0 * i / n) > gaussian_edge_p1(3.0 * best / n)) best = i;
  double a = 3.0 * std::max(0, best - 1) / n;
  double b = 3.0 * std::min(n, best + 1) / n;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 200 && b - a > 1e-13; ++i) {
    const double x1 = b - phi * (b - a);
    const double x2 = a + phi * (b - a);
    if (gaussian_edge_p1(x1) < gaussian_edge_p1(x2))
      a = x1;
    else
      b = x2;
  }
  const double r = 0.5 * (a + b);
  return {r, gaussian_edge_p0(r), gaussian_edge_p1(r)};
}

// ------------------------------------------------------------------ QNG depth

struct QngDepth {
  double tau = 0.0;      ///< thermalization time that brings p_k down to p_k^G
  double n_depth = 0.0;  ///< tau * gamma * n_th, in phonons
  double p_k = 0.0;      ///< p_k after thermalizing for tau
};

inline double fock_probability(const SignedThermalMixture& state, int k) {
  return state.fock(k)[static_cast<std::size_t>(k)];
}

/**
 * Thermal noise (in phonons) that removes k-phonon QNG: bisection on the
 * decoherence time until p_k equals the threshold. Zero when the state does
 * not exceed the threshold.
 */
inline QngDepth qng_depth(const SignedThermalMixture& state, int k, const SystemParams& params,
                          double threshold) {
  detail::require(k >= 1, "qng_depth: k must be >= 1");
  params.validate();
  auto pk = [&](double tau) { return fock_probability(thermal_decoherence(state, tau, params), k); };
  const double start = pk(0.0);
  if (!(start > threshold)) return {0.0, 0.0, start};
  double lo = 0.0;
  double hi = 1e-3 / params.gamma;
  int expansions = 0;
  while (pk(hi) > threshold) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200) throw NumericalError("qng_depth: thermalization never removes QNG");
  }
  double mid = hi;
  double p = pk(hi);
  for (int i = 0; i < 300; ++i) {
    mid = 0.5 * (lo + hi);
    p = pk(mid);
    if (std::abs(p - threshold) <= 1e-8 || hi - lo <= 1e-15 * hi) break;
    (p > threshold ? lo : hi) = mid;
  }
  return {mid, mid * params.gamma * params.n_th, p};
}

inline QngDepth qng_depth(const SignedThermalMixture& state, int k, const SystemParams& params,
                          const ThresholdTable& table) {
  return qng_depth(state, k, params, table[k]);
}

/**
 * Initial thermal occupation n0 at which the state heralded by `protocol`
 * stops exceeding p_k^G. Bisection on n0 in [0, n0_max] to `tolerance`.
 * Returns 0 when even the ground state does not exceed the threshold.
 */
inline double qng_boundary_occupation(const PreparedProtocol& protocol, int k, double threshold,
                                      double n0_max = 2.0, double tolerance = 1e-6) {
  auto excess = [&](double n0) { return fock_probability(protocol.run(n0).state, k) - threshold; };
  if (!(excess(0.0) > 0.0)) return 0.0;
  double lo = 0.0;
  double hi = n0_max;
  while (excess(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4) throw NumericalError("qng_boundary_occupation: QNG survives every n0");
  }
  while (hi - lo > tolerance) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ----------------------------------------------------------- Negativity depth

struct NegativityDepth {
  double zeta_crit = 0.0;
  /// -10 log10(zeta_crit); zero when the state has no negativity.
  double decibels() const { return zeta_crit > 0.0 ? -10.0 * std::log10(zeta_crit) : 0.0; }
};

struct NegativitySearchOptions {
  double r_max = 8.0;
  int points = 2000;
  double zeta_tolerance = 1e-8;
};

/// Minimum of a radial function: grid scan plus golden-section polish around the best cell.
inline double radial_minimum(const std::function<double(double)>& w, double r_max, int points) {
  detail::require(points >= 3 && r_max > 0.0, "radial_minimum: bad grid");
  const double h = r_max / (points - 1);
  int best = 0;
  double best_value = w(0.0);
  for (int i = 1; i < points; ++i) {
    const double v = w(i * h);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }
  double a = std::max(0, best - 1) * h;
  double b = std::min(points - 1, best + 1) * h;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int i = 0; i < 100 && b - a > 1e-12; ++i) {
    const double x1 = b - phi * (b - a);
    const double x2 = a + phi * (b - a);
    if (w(x1) < w(x2))
      b = x2;
    else
      a = x1;
  }
  return std::min(best_value, w(0.5 * (a + b)));
}

namespace detail {

template <typename LossyWigner>
NegativityDepth negativity_bisection(LossyWigner&& wigner_after_loss, const NegativitySearchOptions& opt) {
  auto min_w = [&](double zeta) {
    const auto w = wigner_after_loss(zeta);
    return radial_minimum(w, opt.r_max, opt.points);
  };
  if (!(min_w(0.0) < 0.0)) return {0.0};
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > opt.zeta_tolerance) {
    const double mid = 0.5 * (lo + hi);
    (min_w(mid) < 0.0 ? lo : hi) = mid;
  }
  return {0.5 * (lo + hi)};
}

}  // namespace detail

/// Loss zeta at which the Wigner function stops being negative anywhere.
inline NegativityDepth negativity_depth(const SignedThermalMixture& state,
                                        const NegativitySearchOptions& opt = {}) {
  return detail::negativity_bisection(
      [&](double zeta) {
        const auto lossy = loss_channel(state, zeta);
        return std::function<double(double)>([lossy](double r) { return lossy.wigner(r); });
      },
      opt);
}

inline NegativityDepth negativity_depth(const FockDistribution& state,
                                        const NegativitySearchOptions& opt = {}) {
  return detail::negativity_bisection(
      [&](double zeta) {
        const auto lossy = attenuate(state, zeta);
        return std::function<double(double)>([lossy](double r) { return wigner_value(lossy, r); });
      },
      opt);
}

}  // namespace optoqng

#endif  // OPTOQNG_QNG_HPP
