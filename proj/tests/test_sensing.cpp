#include "oracles.hpp"

#include "optoqng/heralding.hpp"
#include "optoqng/sensing.hpp"

#include <gtest/gtest.h>

#include <numeric>

using namespace optoqng;

namespace {

ProbeState fock_probe(int m) { return ProbeState(FockDistribution::fock_state(m, m), "fock"); }

}  // namespace

TEST(Kernel, ZeroDisplacementIsDelta) {
  EXPECT_EQ(displacement_kernel(3, 3, 0.0), 1.0);
  EXPECT_EQ(displacement_kernel(2, 3, 0.0), 0.0);
}

TEST(Kernel, VacuumRowIsPoisson) {
  const double n = 0.8;
  for (int k = 0; k < 12; ++k)
    EXPECT_NEAR(displacement_kernel(k, 0, n), std::exp(-n + k * std::log(n) - std::lgamma(k + 1.0)), 1e-15);
}

TEST(Kernel, MatchesMatrixExponential) {
  for (double n : {0.01, 0.3, 1.0})
    for (int m : {0, 1, 2, 5}) {
      const auto row = oracle::displaced_row_expm(m, n, 25);
      for (int k = 0; k < 25; ++k)
        EXPECT_NEAR(displacement_kernel(k, m, n), row[static_cast<std::size_t>(k)], 1e-9) << m << " " << k;
    }
}

TEST(Kernel, SymmetricAndStochastic) {
  for (int m : {0, 3, 7}) {
    const auto row = displaced_fock_distribution(m, 0.6, 60);
    EXPECT_NEAR(std::accumulate(row.begin(), row.end(), 0.0), 1.0, 1e-12);
    for (int k = 0; k < 15; ++k) EXPECT_NEAR(displacement_kernel(k, m, 0.6), displacement_kernel(m, k, 0.6), 1e-15);
  }
  EXPECT_THROW(displaced_fock_distribution(5, 1.0, 10), InvalidArgument);
}

TEST(Output, ThermalProbeMatchesDisplacedThermal) {
  for (double n0 : {0.05, 0.5}) {
    const ProbeState probe(FockDistribution::thermal(n0, 120).normalized(), "thermal");
    for (double nc : {0.02, 0.4}) {
      const auto out = phase_randomized_output(probe, nc);
      for (int k = 0; k < 15; ++k)
        EXPECT_NEAR(out[static_cast<std::size_t>(k)], oracle::displaced_thermal(n0, nc, k), 1e-8);
    }
  }
}

TEST(Probe, RejectsUnnormalizedOrNegative) {
  EXPECT_THROW(ProbeState(FockDistribution({0.5, 0.4}), "x"), InvalidArgument);
  EXPECT_THROW(ProbeState(FockDistribution({1.1, -0.1}), "x"), InvalidArgument);
}

TEST(Fisher, VacuumProbeIsInverseNc) {
  for (double nc : {1e-3, 0.05, 0.7}) EXPECT_NEAR(fisher_information(fock_probe(0), nc), 1.0 / nc, 1e-3 / nc);
}

TEST(Fisher, MatchesOracleDifferentiation) {
  // Independent route: thermal output from the closed form, coarser five-point derivative.
  const double n0 = 0.3, nc = 0.2, h = 1e-3;
  double f = 0.0;
  for (int k = 0; k < 80; ++k) {
    auto p = [&](double x) { return oracle::displaced_thermal(n0, x, k); };
    const double d = (-p(nc + 2 * h) + 8 * p(nc + h) - 8 * p(nc - h) + p(nc - 2 * h)) / (12 * h);
    f += d * d / p(nc);
  }
  const ProbeState probe(FockDistribution::thermal(n0, 120).normalized(), "thermal");
  EXPECT_NEAR(fisher_information(probe, nc), f, 1e-4 * f);
}

TEST(Fisher, FockProbesBeatVacuum) {
  for (double nc : {0.01, 0.1}) {
    const double vac = fisher_information(fock_probe(0), nc);
    EXPECT_GT(fisher_information(fock_probe(1), nc), vac);
    EXPECT_GT(fisher_information(fock_probe(2), nc), fisher_information(fock_probe(1), nc));
  }
}

TEST(Fisher, AddedThermalBeatsThermal) {
  const double n0 = 0.05;
  const ProbeState thermal(FockDistribution::thermal(n0, 80).normalized(), "thermal");
  const ProbeState added(FockDistribution::phonon_added_thermal(n0, 1, 80).normalized(), "added");
  for (double nc : {0.01, 0.2}) EXPECT_GT(fisher_information(added, nc), fisher_information(thermal, nc));
}

TEST(Fisher, FiniteResolutionIsMonotoneAndBounded) {
  const ProbeState probe(FockDistribution::phonon_added_thermal(0.2, 1, 80).normalized(), "added");
  const double nc = 0.1;
  const double full = fisher_information(probe, nc);
  double prev = 0.0;
  for (int k = 0; k <= 12; ++k) {
    const double f = fisher_finite_resolution(probe, nc, k);
    EXPECT_GE(f, prev * (1 - 1e-9));
    EXPECT_LE(f, full * (1 + 1e-9));
    prev = f;
  }
  EXPECT_NEAR(fisher_finite_resolution(probe, nc, 60), full, 1e-9 * full);
}

TEST(Fisher, ResolvingJustAboveTheProbeSaturates) {
  const double nc = 0.01;
  const auto one = fock_probe(1), two = fock_probe(2);
  EXPECT_GT(fisher_finite_resolution(one, nc, 2), 0.98 * fisher_information(one, nc));
  EXPECT_GT(fisher_finite_resolution(two, nc, 3), 0.98 * fisher_information(two, nc));
  EXPECT_LT(fisher_finite_resolution(two, nc, 1), 0.5 * fisher_information(two, nc));
}

TEST(Fisher, RejectsZeroDisplacement) { EXPECT_THROW(fisher_information(fock_probe(1), 0.0), InvalidArgument); }

TEST(CramerRao, ScalesInverselyWithCopies) {
  EXPECT_DOUBLE_EQ(cramer_rao_error(4.0, 1), 0.25);
  EXPECT_DOUBLE_EQ(cramer_rao_error(4.0, 2), 0.125);
  EXPECT_THROW(cramer_rao_error(0.0, 1), InvalidArgument);
  EXPECT_THROW(cramer_rao_error(1.0, 0), InvalidArgument);
}

TEST(Fit, RecoversSyntheticSlopeAndVacuumSlope) {
  const auto grid = default_sensing_grid();
  ASSERT_EQ(grid.size(), 40u);
  EXPECT_NEAR(grid.front(), 1e-3, 1e-15);
  EXPECT_NEAR(grid.back(), 1.0, 1e-12);
  std::vector<double> d2;
  for (double x : grid) d2.push_back((7.0 * x + 0.3) / error_scale + (x > linear_fit_limit ? 1.0 : 0.0));
  EXPECT_NEAR(linear_fit_coefficient(grid, d2), 7.0, 1e-10);
  // Vacuum: Delta^2 = N_c / M, slope 1e4 / M.
  EXPECT_NEAR(sensing_report(fock_probe(0), 500, grid).fit_coefficient, 20.0, 0.02);
  EXPECT_THROW(linear_fit_coefficient({0.1, 0.2}, {1.0, 2.0}), InvalidArgument);
}

TEST(Probe, FromHeraldedMixture) {
  const auto p = SystemParams::superfluid();
  const auto probe = ProbeState::from_mixture(run_protocol(plans::blue_apd(p), p).state, "blue_apd");
  EXPECT_NEAR(probe.distribution.total(), 1.0, 1e-12);
  EXPECT_GT(probe.distribution[1], 0.9);
}
