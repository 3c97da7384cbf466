#include "oracles.hpp"

#include "optoqng/heralding.hpp"
#include "optoqng/qng.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace optoqng;

namespace {

constexpr double inv_two_pi = 0.5 / std::numbers::pi;

// Thresholds for k = 1..3 share one grid; computed once for the suite.
const ThresholdTable& small_table() {
  static const ThresholdTable table = threshold_table(3);
  return table;
}

}  // namespace

TEST(Thresholds, LowOrderValues) {
  EXPECT_NEAR(small_table()[1], 0.478, 0.002);
  EXPECT_NEAR(small_table()[2], 0.557, 0.002);
  EXPECT_NEAR(small_table()[3], 0.593, 0.003);
  EXPECT_GE(small_table().at(1).agreeing_starts, 2);
}

TEST(Thresholds, MonotoneInK) {
  EXPECT_LT(small_table()[1], small_table()[2]);
  EXPECT_LT(small_table()[2], small_table()[3]);
}

TEST(Thresholds, SinglePhononMatchesGaussianEdgePeak) {
  // For k = 1 the optimum is a displaced squeezed vacuum, the top of the p0-p1 edge.
  EXPECT_NEAR(small_table()[1], gaussian_boundary_peak().p1, 1e-5);
}

TEST(Thresholds, DegenerateOverlapVanishes) {
  const ThresholdLandscape land(1, default_threshold_cutoff(1));
  EXPECT_NEAR(land.probability(1, 0.0, 0.0), 0.0, 1e-15);
  // |<1|D(alpha)|0>|^2 = alpha^2 e^{-alpha^2}.
  EXPECT_NEAR(land.probability(1, 0.7, 0.0), 0.49 * std::exp(-0.49), 1e-12);
}

TEST(Thresholds, GeneratorsMatchTaylorExponential) {
  const ThresholdLandscape land(2, 28);
  const int dim = 28 + threshold_padding;
  const Eigen::MatrixXd a = oracle::ladder(dim);
  const Eigen::MatrixXd ad = a.transpose();
  const double alpha = 0.8, r = -0.35;
  const Eigen::MatrixXd d = oracle::taylor_expm(alpha * (ad - a));
  const Eigen::MatrixXd s = oracle::taylor_expm(r * (ad * ad - a * a));
  const Eigen::MatrixXd u = d * s;
  const double expect = u(2, 0) * u(2, 0) + u(2, 1) * u(2, 1);
  EXPECT_NEAR(land.probability(2, alpha, r), expect, 1e-10);
}

TEST(Thresholds, StableUnderCutoffIncrease) {
  const double base = qng_threshold(2);
  const double wider = qng_threshold(2, default_threshold_cutoff(2) + 10);
  EXPECT_LT(std::abs(base - wider), 1e-4);
}

TEST(Thresholds, OperatorOrderDoesNotMatter) {
  const auto sd = threshold_table(2, -1, OperatorOrder::squeeze_displace);
  EXPECT_NEAR(sd[1], small_table()[1], 1e-4);
  EXPECT_NEAR(sd[2], small_table()[2], 1e-4);
}

TEST(Thresholds, RejectsBadArguments) {
  EXPECT_THROW(qng_threshold(0), InvalidArgument);
  EXPECT_THROW(qng_threshold(2, 20), InvalidArgument);
}

TEST(GaussianEdge, EndpointsAndPeak) {
  EXPECT_DOUBLE_EQ(gaussian_edge_p0(0.0), 1.0);
  EXPECT_DOUBLE_EQ(gaussian_edge_p1(0.0), 0.0);
  EXPECT_LT(gaussian_edge_p0(2.5), 1e-6);
  EXPECT_EQ(gaussian_boundary_p1(1.0), 0.0);
  const auto peak = gaussian_boundary_peak();
  EXPECT_NEAR(peak.p1, 0.478, 0.001);
  EXPECT_NEAR(gaussian_boundary_p1(peak.p0), peak.p1, 1e-9);
  for (double p0 : {0.05, 0.3, 0.7, 0.95}) EXPECT_LE(gaussian_boundary_p1(p0), peak.p1 + 1e-12);
  EXPECT_THROW(gaussian_boundary_p1(0.0), InvalidArgument);
}

TEST(GaussianEdge, CoherentStatesLieInside) {
  // A coherent state is Gaussian, so its p1 never exceeds the edge at its p0.
  for (double n : {0.1, 0.5, 1.0, 2.0}) {
    const double p0 = std::exp(-n), p1 = n * std::exp(-n);
    EXPECT_LE(p1, gaussian_boundary_p1(p0) + 1e-12);
  }
}

TEST(Depth, PositiveAndShrinksWithInitialOccupation) {
  const auto p = SystemParams::superfluid();
  const PreparedProtocol prep(plans::blue_apd(p), p);
  double prev = std::numeric_limits<double>::infinity();
  for (double n0 : {0.0, 0.05, 0.1}) {
    const auto d = qng_depth(prep.run(n0).state, 1, p, small_table());
    EXPECT_GT(d.n_depth, 0.0);
    EXPECT_LT(d.n_depth, prev);
    prev = d.n_depth;
  }
}

TEST(Depth, ZeroAtThresholdAndConsistentWhenPositive) {
  const auto p = SystemParams::superfluid();
  const auto state = run_protocol(plans::blue_apd(p), p).state;
  const double p1 = fock_probability(state, 1);
  EXPECT_EQ(qng_depth(state, 1, p, p1).n_depth, 0.0);
  const auto d = qng_depth(state, 1, p, small_table());
  EXPECT_NEAR(fock_probability(thermal_decoherence(state, d.tau, p), 1), small_table()[1], 1e-5);
  EXPECT_NEAR(d.n_depth, d.tau * p.gamma * p.n_th, 1e-15);
}

TEST(Boundary, SinglePhononAdditionLosesQngAtFiniteOccupation) {
  const auto p = SystemParams::superfluid();
  const PreparedProtocol prep(plans::blue_apd(p), p);
  const double n0 = qng_boundary_occupation(prep, 1, small_table()[1]);
  EXPECT_GT(n0, 0.0);
  EXPECT_NEAR(fock_probability(prep.run(n0).state, 1), small_table()[1], 1e-5);
}

TEST(Wigner, SpecialValues) {
  EXPECT_NEAR(wigner_value(FockDistribution::fock_state(0, 0), 0.0), inv_two_pi, 1e-15);
  EXPECT_NEAR(wigner_value(FockDistribution::fock_state(1, 1), 0.0), -inv_two_pi, 1e-15);
  for (int n : {2, 5, 9})
    for (double r : {0.0, 0.8, 2.3, 4.1})
      EXPECT_NEAR(wigner_value(FockDistribution::fock_state(n, n), r), oracle::fock_wigner(n, r), 1e-12);
}

TEST(Wigner, ThermalClosedFormMatchesSeries) {
  for (double n : {0.1, 0.6, 1.5}) {
    const auto series = FockDistribution::thermal(n, 400);
    const auto mix = SignedThermalMixture::thermal(n);
    for (double r : {0.0, 0.5, 1.7, 3.0}) {
      const double closed = std::exp(-r * r / (2 * (2 * n + 1))) * inv_two_pi / (2 * n + 1);
      EXPECT_NEAR(mix.wigner(r), closed, 1e-14);
      EXPECT_NEAR(wigner_value(series, r), closed, 1e-8);
    }
  }
}

TEST(Wigner, CutsAreNormalized) {
  const auto grid = radial_grid(10.0, 0.02);
  for (int n : {0, 1, 4, 10})
    EXPECT_NEAR(wigner_cut(FockDistribution::fock_state(n, n), grid).normalization(), 1.0, 1e-6);
  const auto p = SystemParams::superfluid();
  EXPECT_NEAR(wigner_cut(run_protocol(plans::blue_hbt(p), p).state, grid).normalization(), 1.0, 1e-6);
  EXPECT_THROW(wigner_cut(FockDistribution({0.7, 0.7}), grid), InvalidArgument);
}

TEST(Wigner, LaguerreRadialIdentity) {
  // int_0^inf r e^{-r^2/2} L_s(r^2) dr = (-1)^s.
  const int steps = 12000;
  const double r_max = 30.0;
  const double h = r_max / steps;
  std::vector<double> acc(61, 0.0);
  for (int i = 0; i <= steps; ++i) {
    const double r = i * h;
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const auto lag = scaled_laguerre_sequence(60, r * r);
    for (int s = 0; s <= 60; ++s) acc[static_cast<std::size_t>(s)] += w * r * lag[static_cast<std::size_t>(s)];
  }
  for (int s = 0; s <= 60; ++s)
    EXPECT_NEAR(acc[static_cast<std::size_t>(s)] * h / 3.0, s % 2 ? -1.0 : 1.0, 1e-8) << "s = " << s;
}

TEST(Negativity, SinglePhononLosesNegativityAtHalfLoss) {
  const auto d = negativity_depth(FockDistribution::fock_state(1, 1));
  EXPECT_NEAR(d.zeta_crit, 0.5, 1e-6);
  EXPECT_NEAR(d.decibels(), 3.0103, 1e-3);
}

TEST(Negativity, ThermalStatesHaveNone) {
  EXPECT_EQ(negativity_depth(SignedThermalMixture::thermal(0.4)).zeta_crit, 0.0);
  EXPECT_EQ(negativity_depth(SignedThermalMixture::thermal(0.4)).decibels(), 0.0);
}

TEST(Negativity, MixtureAndFockRoutesAgree) {
  const auto p = SystemParams::superfluid();
  const auto state = run_protocol(plans::blue_apd(p), p).state;
  const auto a = negativity_depth(state);
  const auto b = negativity_depth(state.fock(80));
  EXPECT_NEAR(a.zeta_crit, b.zeta_crit, 1e-6);
  EXPECT_GT(a.zeta_crit, 0.4);
  EXPECT_LT(a.zeta_crit, 0.5);
}
