#ifndef OPTOQNG_GAUSSIAN_DYNAMICS_HPP
#define OPTOQNG_GAUSSIAN_DYNAMICS_HPP

// Linearized pulsed optomechanics in the resolved-sideband regime: drift
// matrix, propagator, temporal detector modes and the Gaussian covariance
// of (mechanics, detector mode) at the end of a pulse.

#include "optoqng/covariance.hpp"
#include "optoqng/errors.hpp"
#include "optoqng/linalg.hpp"
#include "optoqng/states.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string_view>
#include <vector>

namespace optoqng {

enum class Detuning { blue, red };

inline std::string_view to_string(Detuning d) { return d == Detuning::blue ? "blue" : "red"; }

constexpr double two_pi = 2.0 * std::numbers::pi;

/**
 * Physical configuration of the optomechanical system. All rates are angular
 * (rad/s); kappa is the amplitude decay rate of the cavity, so the full
 * linewidth is 2*kappa.
 */
struct SystemParams {
  double omega_m = two_pi * 315.3e6;
  /// Energy damping rate; the mechanical amplitude decays at gamma/2.
  double gamma = 3.12e3;
  double kappa = two_pi * 23.6e6;
  double g = two_pi * 0.1e6;
  Detuning detuning = Detuning::blue;
  double n0 = 0.0;
  double n_th = 1.2;
  double pulse_duration = 2.5e-6;

  /// Superfluid-helium defaults (write pulse).
  static SystemParams superfluid() { return {}; }

  /// Same, with gamma = 2pi * 3.12e3 s^-1 and the
  /// bath occupation of the cryostat (1.3).
  static SystemParams angular_damping() {
    SystemParams p;
    p.gamma = two_pi * 3.12e3;
    p.n_th = 1.3;
    return p;
  }

  /// Coupling and duration of the red-detuned verification pulse.
  static constexpr double readout_coupling = two_pi * 1.0e6;
  static constexpr double readout_duration = 9.5e-6;

  void validate() const {
    detail::require(omega_m > 0.0 && gamma > 0.0 && kappa > 0.0,
                    "rates omega_m, gamma and kappa must be strictly positive");
    detail::require(g >= 0.0, "coupling g must be non-negative");
    detail::require(n0 >= 0.0 && n_th >= 0.0, "occupations must be non-negative");
    detail::require(pulse_duration >= 0.0, "pulse duration must be non-negative");
    detail::require(std::isfinite(omega_m + gamma + kappa + g + n0 + n_th + pulse_duration),
                    "parameters must be finite");
  }

  /// The linearized model assumes g <= kappa.
  bool weak_coupling() const { return g <= kappa; }

  SystemParams with(Detuning d, double coupling) const {
    SystemParams p = *this;
    p.detuning = d;
    p.g = coupling;
    return p;
  }
};

/// Drift matrix over (X_m, P_m, X_c, P_c).
struct DriftMatrix {
  Eigen::Matrix4d a;
  double g_blue = 0.0;
  double g_red = 0.0;
};

inline DriftMatrix build_drift_matrix(const SystemParams& params) {
  params.validate();
  DriftMatrix drift;
  drift.g_blue = params.detuning == Detuning::blue ? params.g : 0.0;
  drift.g_red = params.detuning == Detuning::red ? params.g : 0.0;
  const double minus = drift.g_blue - drift.g_red;
  const double plus = drift.g_blue + drift.g_red;
  const double half_gamma = 0.5 * params.gamma;
  // clang-format off
  drift.a << -half_gamma, 0.0,         0.0,           minus,
             0.0,         -half_gamma, plus,          0.0,
             0.0,         minus,       -params.kappa, 0.0,
             plus,        0.0,         0.0,           -params.kappa;
  // clang-format on
  return drift;
}

/// M(t) = exp(A t).
inline Eigen::Matrix4d propagator(const DriftMatrix& drift, double t) {
  detail::require(t >= 0.0 && std::isfinite(t), "propagation time must be finite and >= 0");
  return expm((drift.a * t).eval());
}

/**
 * Real temporal mode function on [0, duration], piecewise constant on
 * `size()` equal cells. Sample i is the value on cell i (taken at the cell
 * midpoint). Normalized so that sum_i f_i^2 * step = 1.
 */
class FilterFunction {
public:
  FilterFunction(double duration, std::vector<double> cell_values)
      : duration_(duration), values_(std::move(cell_values)) {
    detail::require(duration_ > 0.0 && std::isfinite(duration_), "filter duration must be > 0");
    detail::require(!values_.empty(), "filter needs at least one cell");
    const double n = norm();
    if (!(n > 0.0)) throw InvalidArgument("filter function is identically zero");
    const double scale = 1.0 / std::sqrt(n);
    for (auto& v : values_) v *= scale;
  }

  double duration() const { return duration_; }
  std::size_t size() const { return values_.size(); }
  double step() const { return duration_ / static_cast<double>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double midpoint(std::size_t i) const { return (static_cast<double>(i) + 0.5) * step(); }

  /// sum_i f_i^2 * step, the exact L2 norm of the piecewise-constant function.
  double norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s * step();
  }

  double operator()(double t) const {
    if (t < 0.0 || t > duration_) return 0.0;
    auto i = static_cast<std::size_t>(t / step());
    if (i >= values_.size()) i = values_.size() - 1;
    return values_[i];
  }

private:
  double duration_;
  std::vector<double> values_;
};

enum class FilterKind { optimal, flat };

inline constexpr int default_filter_cells = 4096;

/// Flat-top mode f = tau^{-1/2}.
inline FilterFunction flat_filter(double tau, int grid_points = default_filter_cells) {
  detail::require(tau > 0.0, "flat_filter: tau must be positive");
  detail::require(grid_points >= 1, "flat_filter: need at least one cell");
  return FilterFunction(tau, std::vector<double>(static_cast<std::size_t>(grid_points),
                                                 1.0 / std::sqrt(tau)));
}

/**
 * Mode maximizing the weight of the initial mechanical quadrature in the
 * detector mode: f(t) proportional to the response of the cavity P quadrature
 * to X_m(0), i.e. M(t)(3, 0) in zero-based indexing.
 */
inline FilterFunction optimal_filter(const SystemParams& params, double tau,
                                     int grid_points = default_filter_cells) {
  detail::require(tau > 0.0, "optimal_filter: tau must be positive");
  detail::require(grid_points >= 100, "optimal_filter: need at least 100 grid points");
  const auto drift = build_drift_matrix(params);
  const double h = tau / grid_points;
  const Eigen::Matrix4d step = propagator(drift, h);
  Eigen::Matrix4d m = propagator(drift, 0.5 * h);
  std::vector<double> f(static_cast<std::size_t>(grid_points));
  double largest = 0.0;
  for (auto& v : f) {
    v = m(3, 0);
    largest = std::max(largest, std::abs(v));
    m = step * m;
  }
  if (!(largest > 0.0))
    throw InvalidArgument("optimal_filter: output carries no mechanical signature (g = 0)");
  return FilterFunction(tau, std::move(f));
}

inline FilterFunction make_filter(FilterKind kind, const SystemParams& params, double tau,
                                  int grid_points = default_filter_cells) {
  return kind == FilterKind::optimal ? optimal_filter(params, tau, grid_points)
                                     : flat_filter(tau, grid_points);
}

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/**
 * Linear map from the start to the end of one pulse for the extended state
 * z = (X_m, P_m, X_c, P_c, X_L, P_L), where (X_L, P_L) accumulate the
 * filtered output field a_out = -a_in + sqrt(2 kappa) a_c. With z(0) having
 * zero detector entries, Cov z(tau) = transfer * Cov z(0) * transfer^T + noise.
 */
struct PulseResponse {
  Matrix6d transfer = Matrix6d::Identity();
  Matrix6d noise = Matrix6d::Zero();
  double duration = 0.0;

  /// Full 6x6 covariance for initial mechanics variance sigma_m and cavity
  /// variance sigma_c (vacuum = 1).
  Matrix6d covariance(double sigma_m, double sigma_c = 1.0) const {
    Matrix6d initial = Matrix6d::Zero();
    initial(0, 0) = initial(1, 1) = sigma_m;
    initial(2, 2) = initial(3, 3) = sigma_c;
    return transfer * initial * transfer.transpose() + noise;
  }

  /// Covariance of (X_m, P_m, X_L, P_L) right before detection.
  CovMatrix detection_covariance(double sigma_m) const {
    const Matrix6d full = covariance(sigma_m);
    constexpr std::array<int, 4> index{0, 1, 4, 5};
    Eigen::Matrix4d v;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) v(i, j) = full(index[i], index[j]);
    return CovMatrix(v);
  }

  /// Squared weight of the initial mechanical quadrature in the detector mode.
  double transmittance() const {
    return transfer(4, 0) * transfer(4, 0) + transfer(5, 0) * transfer(5, 0);
  }
};

namespace detail {

// Exact propagation over one cell of constant filter value (Van Loan):
// exp([[-A, D], [0, A^T]] h) = [[*, G], [0, F^T]] with F = exp(A h) and
// accumulated noise F * G.
inline void propagate_cell(const Eigen::Matrix4d& drift, const SystemParams& p, double f,
                           double h, Matrix6d& transfer, Matrix6d& noise) {
  const double sqrt_2k = std::sqrt(2.0 * p.kappa);
  Matrix6d a = Matrix6d::Zero();
  a.topLeftCorner<4, 4>() = drift;
  a(4, 2) = f * sqrt_2k;
  a(5, 3) = f * sqrt_2k;

  // Noise inputs (x_th, p_th, x_in, p_in) with variances (sigma_th, sigma_th, 1, 1).
  Eigen::Matrix<double, 6, 4> b = Eigen::Matrix<double, 6, 4>::Zero();
  b(0, 0) = b(1, 1) = std::sqrt(p.gamma);
  b(2, 2) = b(3, 3) = sqrt_2k;
  b(4, 2) = b(5, 3) = -f;
  const double sigma_th = 2.0 * p.n_th + 1.0;
  const Eigen::Vector4d q(sigma_th, sigma_th, 1.0, 1.0);
  const Matrix6d diffusion = b * q.asDiagonal() * b.transpose();

  Eigen::Matrix<double, 12, 12> block = Eigen::Matrix<double, 12, 12>::Zero();
  block.topLeftCorner<6, 6>() = -a * h;
  block.topRightCorner<6, 6>() = diffusion * h;
  block.bottomRightCorner<6, 6>() = a.transpose() * h;
  const Eigen::Matrix<double, 12, 12> e = expm(block);
  transfer = e.bottomRightCorner<6, 6>().transpose();
  noise = transfer * e.topRightCorner<6, 6>();
  noise = (0.5 * (noise + noise.transpose())).eval();
}

}  // namespace detail

inline PulseResponse propagate_pulse(const SystemParams& params, const FilterFunction& filter) {
  const auto drift = build_drift_matrix(params);
  const double h = filter.step();
  PulseResponse response;
  response.duration = filter.duration();
  Matrix6d cell_transfer, cell_noise;
  double cached = std::numeric_limits<double>::quiet_NaN();
  for (double f : filter.values()) {
    if (!(f == cached)) {
      detail::propagate_cell(drift.a, params, f, h, cell_transfer, cell_noise);
      cached = f;
    }
    response.transfer = (cell_transfer * response.transfer).eval();
    response.noise = (cell_transfer * response.noise * cell_transfer.transpose() + cell_noise).eval();
  }
  response.noise = (0.5 * (response.noise + response.noise.transpose())).eval();
  return response;
}

/**
 * Covariance of (X_m, P_m, X_L, P_L) at the end of a pulse that starts with
 * the mechanics in a thermal state of variance sigma_m_init = 2n + 1 and the
 * cavity in vacuum.
 */
inline CovMatrix pre_detection_covariance(const SystemParams& params, const FilterFunction& filter,
                                          double sigma_m_init) {
  detail::require(sigma_m_init >= 1.0 - 1e-12, "sigma_m_init must be >= 1 (2n + 1 with n >= 0)");
  const CovMatrix v = propagate_pulse(params, filter).detection_covariance(sigma_m_init);
  if (!v.is_physical()) throw NumericalError("pre-detection covariance violates the uncertainty relation");
  return v;
}

inline double readout_transmittance(const SystemParams& params, const FilterFunction& filter) {
  return propagate_pulse(params, filter).transmittance();
}

/// Readout efficiency with the optimal filter; a zero-length pulse reads nothing.
inline double readout_transmittance(const SystemParams& params, double tau,
                                    int grid_points = default_filter_cells) {
  detail::require(tau >= 0.0, "readout duration must be non-negative");
  if (tau == 0.0) return 0.0;
  return readout_transmittance(params, optimal_filter(params, tau, grid_points));
}

/// Thermalization over a free delay: n -> e^{-gamma tau} n + (1 - e^{-gamma tau}) n_th.
inline SignedThermalMixture thermal_decoherence(const SignedThermalMixture& state, double tau_del,
                                                const SystemParams& params) {
  detail::require(tau_del >= 0.0, "delay must be non-negative");
  const double keep = std::exp(-params.gamma * tau_del);
  return state.map_occupations(
      [&](double n) { return keep * n + (1.0 - keep) * params.n_th; });
}

inline CovMatrix thermal_decoherence(const CovMatrix& v, double tau_del, const SystemParams& params) {
  detail::require(tau_del >= 0.0, "delay must be non-negative");
  const double keep = std::exp(-params.gamma * tau_del);
  const auto dim = v.dimension();
  return CovMatrix(keep * v.matrix() +
                   (1.0 - keep) * (2.0 * params.n_th + 1.0) * Eigen::MatrixXd::Identity(dim, dim));
}

/// Pure loss: V -> (1 - zeta) V + zeta I, i.e. n -> (1 - zeta) n.
inline SignedThermalMixture loss_channel(const SignedThermalMixture& state, double zeta) {
  detail::require(zeta >= 0.0 && zeta <= 1.0, "loss zeta must lie in [0, 1]");
  return state.map_occupations([&](double n) { return (1.0 - zeta) * n; });
}

inline CovMatrix loss_channel(const CovMatrix& v, double zeta) {
  detail::require(zeta >= 0.0 && zeta <= 1.0, "loss zeta must lie in [0, 1]");
  const auto dim = v.dimension();
  return CovMatrix((1.0 - zeta) * v.matrix() + zeta * Eigen::MatrixXd::Identity(dim, dim));
}

inline FockDistribution loss_channel(const FockDistribution& state, double zeta) {
  return attenuate(state, zeta);
}

}  // namespace optoqng

#endif  // OPTOQNG_GAUSSIAN_DYNAMICS_HPP
