#ifndef OPTOQNG_HERALDING_HPP
#define OPTOQNG_HERALDING_HPP

// Non-Gaussian conditioning by on-off detectors. The click POVM element
// 1 - |0><0| is a difference of two Gaussian operations, so every heralded
// state stays a signed mixture of thermal states.

#include "optoqng/covariance.hpp"
#include "optoqng/errors.hpp"
#include "optoqng/gaussian_dynamics.hpp"
#include "optoqng/states.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace optoqng {

struct HeraldResult {
  SignedThermalMixture state;
  double probability = 0.0;
};

/// Outcome of projecting some modes of a Gaussian state onto vacuum.
struct VacuumProjection {
  double probability;
  Eigen::MatrixXd conditional;  ///< covariance of the unmeasured modes
};

/**
 * Projects `measured` modes of the state with covariance `v` onto vacuum:
 * p = 2^N / sqrt(det(C_BB + I)), V_A' = C_AA - C_AB (C_BB + I)^{-1} C_AB^T.
 */
inline VacuumProjection project_on_vacuum(const Eigen::MatrixXd& v, std::span<const int> measured) {
  const auto modes = v.rows() / 2;
  std::vector<int> kept;
  std::vector<bool> is_measured(static_cast<std::size_t>(modes), false);
  for (int m : measured) {
    detail::require(m >= 0 && m < modes, "project_on_vacuum: mode index out of range");
    is_measured[static_cast<std::size_t>(m)] = true;
  }
  for (int m = 0; m < modes; ++m)
    if (!is_measured[static_cast<std::size_t>(m)]) kept.push_back(m);

  const auto nb = static_cast<Eigen::Index>(2 * measured.size());
  const auto na = static_cast<Eigen::Index>(2 * kept.size());
  Eigen::MatrixXd cbb(nb, nb), cab(na, nb), caa(na, na);
  auto quad = [](std::span<const int> list, Eigen::Index i) {
    return 2 * list[static_cast<std::size_t>(i / 2)] + static_cast<int>(i % 2);
  };
  for (Eigen::Index i = 0; i < nb; ++i)
    for (Eigen::Index j = 0; j < nb; ++j) cbb(i, j) = v(quad(measured, i), quad(measured, j));
  for (Eigen::Index i = 0; i < na; ++i) {
    for (Eigen::Index j = 0; j < nb; ++j) cab(i, j) = v(quad(kept, i), quad(measured, j));
    for (Eigen::Index j = 0; j < na; ++j) caa(i, j) = v(quad(kept, i), quad(kept, j));
  }
  const Eigen::MatrixXd shifted = cbb + Eigen::MatrixXd::Identity(nb, nb);
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
  const double det = shifted.determinant();
  if (!(det > 0.0)) throw NumericalError("project_on_vacuum: C_BB + I is not positive definite");
  VacuumProjection out;
  out.probability = std::pow(2.0, static_cast<double>(measured.size())) / std::sqrt(det);
  out.conditional = caa - cab * ldlt.solve(cab.transpose());
  return out;
}

namespace detail {

inline void require_phase_insensitive(const Eigen::Matrix2d& block, const char* what) {
  const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
  const double defect = std::max(std::abs(block(0, 0) - block(1, 1)),
                                 std::max(std::abs(block(0, 1)), std::abs(block(1, 0))));
  if (defect > 1e-8 * scale)
    throw InvalidArgument(std::string("covariance block is not phase-insensitive: ") + what);
}

// Unnormalized heralded terms: P(click) * rho_cond = rho(C_mm) - p_off rho(C'_mm).
struct HeraldTerms {
  std::vector<ThermalComponent> parts;
  double probability;
};

inline HeraldTerms click_terms(const CovMatrix& v) {
  detail::require(v.dimension() == 4, "condition_on_click expects a 4x4 covariance");
  require_phase_insensitive(v.block(0, 0), "C_mm");
  require_phase_insensitive(v.block(1, 1), "C_LL");
  const std::array<int, 1> light{1};
  const auto off = project_on_vacuum(v.matrix(), light);
  HeraldTerms t;
  t.probability = 1.0 - off.probability;
  t.parts = {{1.0, occupation_of(v.block(0, 0))},
             {-off.probability, occupation_of(off.conditional)}};
  return t;
}

inline HeraldTerms coincidence_terms(const CovMatrix& v) {
  detail::require(v.dimension() == 4, "condition_on_coincidence expects a 4x4 covariance");
  require_phase_insensitive(v.block(0, 0), "C_mm");
  require_phase_insensitive(v.block(1, 1), "C_LL");

  // (M, L) plus a vacuum ancilla A, then a balanced beamsplitter on L and A.
  Eigen::MatrixXd full = Eigen::MatrixXd::Identity(6, 6);
  full.topLeftCorner<4, 4>() = v.matrix();
  const double t = std::sqrt(0.5);
  const double r = std::sqrt(0.5);
  Eigen::MatrixXd bs = Eigen::MatrixXd::Identity(6, 6);
  bs.block<2, 2>(2, 2) = t * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(2, 4) = r * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(4, 2) = -r * Eigen::Matrix2d::Identity();
  bs.block<2, 2>(4, 4) = t * Eigen::Matrix2d::Identity();
  const Eigen::MatrixXd hbt = bs * full * bs.transpose();

  // Marginals (M, L) and (M, A); tracing a mode drops its rows and columns.
  const std::array<int, 2> ml{0, 2};
  const std::array<int, 2> ma{0, 4};
  auto marginal = [&](const std::array<int, 2>& start) {
    Eigen::Matrix4d m;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = hbt.block<2, 2>(start[i], start[j]);
    return Eigen::MatrixXd(m);
  };
  const std::array<int, 1> second{1};
  const std::array<int, 2> both{1, 2};
  const auto off_l = project_on_vacuum(marginal(ml), second);
  const auto off_a = project_on_vacuum(marginal(ma), second);
  const auto off_al = project_on_vacuum(hbt, both);

  HeraldTerms terms;
  terms.probability = 1.0 - off_l.probability - off_a.probability + off_al.probability;
  terms.parts = {{1.0, occupation_of(hbt.block<2, 2>(0, 0))},
                 {-off_l.probability, occupation_of(off_l.conditional)},
                 {-off_a.probability, occupation_of(off_a.conditional)},
                 {off_al.probability, occupation_of(off_al.conditional)}};
  return terms;
}

}  // namespace detail

/// Vacuum-projection probabilities of the HBT arms, exposed for diagnostics.
struct CoincidenceDiagnostics {
  double p_vacuum_l;
  double p_vacuum_a;
  double p_vacuum_al;
};

inline CoincidenceDiagnostics coincidence_diagnostics(const CovMatrix& v) {
  const auto terms = detail::coincidence_terms(v);
  return {-terms.parts[1].weight, -terms.parts[2].weight, terms.parts[3].weight};
}

/**
 * State of the mechanics heralded by a click of an on-off detector watching
 * the detector mode; `v` is the covariance of (X_m, P_m, X_L, P_L).
 */
inline HeraldResult condition_on_click(const CovMatrix& v) {
  auto terms = detail::click_terms(v);
  const double p_off = 1.0 - terms.probability;
  if (p_off >= 1.0 - 1e-12) throw HeraldImpossible("click probability is zero (p_off = 1)");
  return {SignedThermalMixture::from_unnormalized(std::move(terms.parts)), terms.probability};
}

/// Two-click (HBT) herald behind a balanced beamsplitter with a vacuum ancilla.
inline HeraldResult condition_on_coincidence(const CovMatrix& v) {
  auto terms = detail::coincidence_terms(v);
  if (terms.probability < 1e-14) throw HeraldImpossible("coincidence probability is zero");
  return {SignedThermalMixture::from_unnormalized(std::move(terms.parts)), terms.probability};
}

enum class Detector { apd, hbt };

inline std::string_view to_string(Detector d) { return d == Detector::apd ? "apd" : "hbt"; }

/**
 * Heralds a whole mixture through one pulse. Each component is conditioned
 * independently; the unnormalized results add with the component weights and
 * the herald probability is the weighted sum of per-component probabilities.
 */
inline HeraldResult herald(const SignedThermalMixture& state, const PulseResponse& pulse,
                           Detector detector) {
  std::vector<ThermalComponent> parts;
  double probability = 0.0;
  for (const auto& c : state.components()) {
    const CovMatrix v = pulse.detection_covariance(2.0 * c.occupation + 1.0);
    const auto terms =
        detector == Detector::apd ? detail::click_terms(v) : detail::coincidence_terms(v);
    probability += c.weight * terms.probability;
    for (const auto& t : terms.parts) parts.push_back({c.weight * t.weight, t.occupation});
  }
  const double floor = detector == Detector::apd ? 1e-12 : 1e-14;
  if (!(probability > floor)) throw HeraldImpossible("herald probability is zero");
  if (probability > 1.0 + 1e-12) throw NumericalError("herald probability exceeds one");
  return {SignedThermalMixture::from_unnormalized(std::move(parts)), probability};
}

struct Pulse {
  Detuning detuning = Detuning::blue;
  double duration = 0.0;
  /// Enhanced coupling; falls back to SystemParams::g when empty.
  std::optional<double> coupling;
};

struct HeraldStep {
  Pulse pulse;
  Detector detector = Detector::apd;
  double delay_after = 0.0;
};

struct ReadoutStage {
  double duration = SystemParams::readout_duration;
  double zeta = 0.0;
  /// Falls back to SystemParams::readout_coupling when empty.
  std::optional<double> coupling;
};

/// Ordered pulses with their detectors, optionally followed by a red readout.
struct HeraldingPlan {
  std::vector<HeraldStep> steps;
  std::optional<ReadoutStage> readout;
  FilterKind filter = FilterKind::optimal;
  int filter_cells = default_filter_cells;

  void validate() const {
    for (const auto& s : steps) {
      detail::require(s.pulse.duration > 0.0, "pulse durations must be positive");
      detail::require(s.delay_after >= 0.0, "delays must be non-negative");
      if (s.pulse.coupling) detail::require(*s.pulse.coupling >= 0.0, "coupling must be >= 0");
    }
    if (readout) {
      detail::require(readout->duration >= 0.0, "readout duration must be non-negative");
      detail::require(readout->zeta >= 0.0 && readout->zeta <= 1.0, "readout zeta must be in [0, 1]");
    }
    detail::require(filter_cells >= 1, "filter needs at least one cell");
  }
};

namespace plans {

inline HeraldStep write_step(const SystemParams& params, Detector detector, double delay = 0.0) {
  return {{Detuning::blue, params.pulse_duration, std::nullopt}, detector, delay};
}

/// Single-phonon addition.
inline HeraldingPlan blue_apd(const SystemParams& params) {
  return {{write_step(params, Detector::apd)}, std::nullopt};
}

/// Two-phonon addition by one pulse and a coincidence.
inline HeraldingPlan blue_hbt(const SystemParams& params) {
  return {{write_step(params, Detector::hbt)}, std::nullopt};
}

inline constexpr double default_inter_pulse_delay = 0.1e-6;

/// Two-phonon addition by two heralded pulses in sequence.
inline HeraldingPlan blue_apd_twice(const SystemParams& params,
                                    double delay = default_inter_pulse_delay) {
  return {{write_step(params, Detector::apd, delay), write_step(params, Detector::apd)},
          std::nullopt};
}

/// Single-phonon subtraction.
inline HeraldingPlan red_apd(const SystemParams& params) {
  return {{{{Detuning::red, params.pulse_duration, std::nullopt}, Detector::apd, 0.0}},
          std::nullopt};
}

}  // namespace plans

struct ProtocolResult {
  SignedThermalMixture state;
  std::vector<double> step_probabilities;
  /// Detector-mode state of the readout pulse, including loss zeta.
  std::optional<SignedThermalMixture> readout_state;
  std::optional<double> readout_transmittance;

  double success_probability() const {
    double p = 1.0;
    for (double s : step_probabilities) p *= s;
    return p;
  }
};

/// Mechanical state -> detector-mode state of a red readout pulse with loss.
inline SignedThermalMixture read_out(const SignedThermalMixture& mechanics, const PulseResponse& pulse,
                                     double zeta) {
  std::vector<ThermalComponent> parts;
  for (const auto& c : mechanics.components()) {
    const CovMatrix v = pulse.detection_covariance(2.0 * c.occupation + 1.0);
    parts.push_back({c.weight, occupation_of(v.block(1, 1))});
  }
  return loss_channel(SignedThermalMixture::from_unnormalized(std::move(parts)), zeta);
}

namespace detail {

template <typename Body>
auto with_step_context(std::size_t i, Body&& body) {
  try {
    return body();
  } catch (const HeraldImpossible& e) {
    throw HeraldImpossible("step " + std::to_string(i) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError("step " + std::to_string(i) + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("step " + std::to_string(i) + ": " + e.what());
  }
}

}  // namespace detail

/**
 * A plan with its pulse responses precomputed. The responses do not depend on
 * the initial mechanical state, so one instance serves any number of n0.
 * The cavity starts every pulse in vacuum and the mechanics only thermalizes
 * during the delays.
 */
class PreparedProtocol {
public:
  PreparedProtocol(HeraldingPlan plan, const SystemParams& params)
      : plan_(std::move(plan)), params_(params) {
    params_.validate();
    plan_.validate();
    for (std::size_t i = 0; i < plan_.steps.size(); ++i) {
      const auto& pulse = plan_.steps[i].pulse;
      const SystemParams pp = params_.with(pulse.detuning, pulse.coupling.value_or(params_.g));
      responses_.push_back(detail::with_step_context(i, [&] {
        return propagate_pulse(pp, make_filter(plan_.filter, pp, pulse.duration, plan_.filter_cells));
      }));
    }
    if (plan_.readout && plan_.readout->duration > 0.0) {
      const auto& ro = *plan_.readout;
      const SystemParams rp =
          params_.with(Detuning::red, ro.coupling.value_or(SystemParams::readout_coupling));
      readout_ = propagate_pulse(rp, make_filter(plan_.filter, rp, ro.duration, plan_.filter_cells));
    }
  }

  const HeraldingPlan& plan() const { return plan_; }
  const SystemParams& params() const { return params_; }
  const std::vector<PulseResponse>& responses() const { return responses_; }

  ProtocolResult run(const SignedThermalMixture& initial) const {
    ProtocolResult result{initial, {}, std::nullopt, std::nullopt};
    for (std::size_t i = 0; i < plan_.steps.size(); ++i) {
      const auto& step = plan_.steps[i];
      auto heralded =
          detail::with_step_context(i, [&] { return herald(result.state, responses_[i], step.detector); });
      result.step_probabilities.push_back(heralded.probability);
      result.state = thermal_decoherence(heralded.state, step.delay_after, params_);
    }
    if (plan_.readout) {
      const double zeta = plan_.readout->zeta;
      if (readout_) {
        result.readout_transmittance = readout_->transmittance();
        result.readout_state = read_out(result.state, *readout_, zeta);
      } else {
        result.readout_transmittance = 0.0;
        result.readout_state = loss_channel(SignedThermalMixture::thermal(0.0), zeta);
      }
    }
    return result;
  }

  ProtocolResult run(double n0) const {
    detail::require(n0 >= 0.0, "initial occupation must be non-negative");
    return run(SignedThermalMixture::thermal(n0));
  }

  ProtocolResult run() const { return run(params_.n0); }

private:
  HeraldingPlan plan_;
  SystemParams params_;
  std::vector<PulseResponse> responses_;
  std::optional<PulseResponse> readout_;
};

/// Runs a heralding sequence from a thermal state with occupation params.n0.
inline ProtocolResult run_protocol(const HeraldingPlan& plan, const SystemParams& params) {
  return PreparedProtocol(plan, params).run();
}

}  // namespace optoqng

#endif  // OPTOQNG_HERALDING_HPP
