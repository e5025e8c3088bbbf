#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numeric>

#include "bwdelay/probability.hpp"
#include "support/generators.hpp"

using namespace bwdelay;

namespace {

const PulseSpec P1{0.1, 1.01, 4, 0.0, 0.0};
const GridSpec small{40, 24, 8, 2.5, true};

double rel_diff(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(MomentumGrid, AdmissibleVolumeMatchesAnalyticIntegral) {
  const GammaProbe gamma;
  const GridSpec spec{200, 96, 4, 2.5, true};
  const MomentumGrid grid(spec, gamma);
  const auto shell = [&](double p) { return two_pi * p * p * (1.0 - std::cos(max_open_polar_angle(p, gamma))); };
  // every direction is open while E + p <= k^-; split the integral at that kink
  const double kink = std::abs(1.0 - gamma.k_minus() * gamma.k_minus()) / (2.0 * gamma.k_minus());
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double ref = GK::integrate(shell, 0.0, kink, 15, 1e-13) + GK::integrate(shell, kink, 2.5, 15, 1e-13);
  EXPECT_NEAR(grid.admissible_volume(), ref, 1e-3 * ref);
}

TEST(MomentumGrid, NoNodeOutsideOpenPhaseSpace) {
  const MomentumGrid grid(small, GammaProbe{});
  for (const auto& n : grid.nodes()) {
    ASSERT_TRUE(try_solve_partner(lepton_from_spherical(n.p, n.theta, n.phi), GammaProbe{}).has_value());
    ASSERT_GT(n.weight, 0.0);
  }
}

TEST(MomentumGrid, RejectsEmptyAxes) {
  GridSpec g = small;
  g.theta_nodes = 0;
  EXPECT_THROW(MomentumGrid(g, GammaProbe{}), ValidationError);
  g = small;
  g.p_max = -1.0;
  EXPECT_THROW(MomentumGrid(g, GammaProbe{}), ValidationError);
}

TEST(Probability, AzimuthMirrorMatchesFullCircle) {
  GridSpec full = small;
  full.mirror_azimuth = false;
  const auto cfg = make_single_pulse(P1);
  const double a = total_probability(cfg, small);
  const double b = total_probability(cfg, full);
  EXPECT_NEAR(a, b, 1e-12 * b);
}

TEST(Probability, SpectrumIsNonNegativeAndVanishesAtRest) {
  const auto cfg = make_single_pulse(P1);
  const MomentumGrid grid(small, cfg.gamma);
  const AmplitudeCache cache(cfg, grid);
  EXPECT_EQ(cache.closed_nodes(), 0u);
  const auto s = cache.spectrum(Channel::first_single());
  const double peak = *std::max_element(s.begin(), s.end());
  for (double v : s) EXPECT_GE(v, 0.0);
  EXPECT_LT(s.front(), 1e-2 * peak);
  // spectrum and total are the same reduction
  double integral = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) integral += s[i] * cache.p_weights()[i];
  EXPECT_NEAR(integral, cache.total(Channel::first_single()), 1e-12 * integral);
}

TEST(Probability, FreeFieldCreatesNoPairs) {
  PulseSpec s = P1;
  s.xi = 0.0;
  EXPECT_EQ(total_probability(make_single_pulse(s), small), 0.0);
  EXPECT_EQ(total_probability(make_double_pulse(s, s, 1.0), small), 0.0);
}

TEST(Probability, DoubleToSingleSpectralRatioIsBounded) {
  const MomentumGrid grid(small, GammaProbe{});
  testgen::Gen g(71);
  for (int k = 0; k < 3; ++k) {
    const PulseSpec a = g.pulse(0.3), b = g.pulse(0.3);
    const AmplitudeCache cache(make_double_pulse(a, b, 0.0), grid);
    const auto sa = cache.spectrum(Channel::first_single());
    const auto sb = cache.spectrum(Channel::second_single());
    for (int d = 0; d < 5; ++d) {
      const auto sd = cache.spectrum(Channel::forward(g.uniform(0, 15)));
      for (std::size_t i = 0; i < sd.size(); ++i) {
        if (sa[i] + sb[i] == 0.0) continue;
        const double r = sd[i] / (sa[i] + sb[i]);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 2.0 + 1e-12);  // |F1 + F2 e|^2 <= 2 (|F1|^2 + |F2|^2)
      }
    }
  }
}

TEST(Probability, ExcludedBoundaryNodesCarryNegligibleWeight) {
  QuadConfig uncapped;
  uncapped.max_nodes = 1 << 18;
  const auto cfg = make_single_pulse(P1);
  const MomentumGrid grid(small, cfg.gamma);
  const AmplitudeCache capped(cfg, grid);
  const AmplitudeCache full(cfg, grid, uncapped);
  EXPECT_GT(capped.unresolved_nodes(), 0u);
  EXPECT_EQ(full.unresolved_nodes(), 0u);
  const double a = capped.total(Channel::first_single());
  const double b = full.total(Channel::first_single());
  EXPECT_LT(rel_diff(a, b), 1e-10);
}

TEST(Probability, MomentumCutoffTailIsSmall) {
  const auto cfg = make_single_pulse(P1);
  GridSpec wide = small;
  wide.p_max = 1.5 * small.p_max;
  wide.p_nodes = small.p_nodes * 3 / 2;
  EXPECT_LT(rel_diff(total_probability(cfg, small), total_probability(cfg, wide)), 1e-3);
}

TEST(Probability, DeterministicAcrossThreadCounts) {
  const auto cfg = make_double_pulse(P1, PulseSpec{0.2, 0.808, 3, pi / 2, 0.0}, 1.0);
  const MomentumGrid grid(small, cfg.gamma);
  const AmplitudeCache one(cfg, grid, {}, 1);
  const AmplitudeCache three(cfg, grid, {}, 3);
  for (double D : {0.0, 0.75, 4.0}) EXPECT_EQ(one.total(Channel::forward(D)), three.total(Channel::forward(D)));
  EXPECT_EQ(one.spectrum(Channel::second_single()), three.spectrum(Channel::second_single()));
}

TEST(Probability, PhaseSpaceFactorScalesWithCoupling) {
  testgen::Gen g(73);
  for (int i = 0; i < 100; ++i) {
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}), GammaProbe{});
    const auto& p = pair.positron;
    const double k_minus = 2.0 * 1.01;
    const double expect = (1.0 / 137.035999) * (p.E * p.E - 1.0) / (16 * pi * pi * 1.01 * p.E * (k_minus - p.p_minus));
    EXPECT_NEAR(phase_space_factor(pair, GammaProbe{}), expect, 1e-12 * expect);
  }
}

TEST(EnergySpectrum, VerifiedSpectrumOnConvergedGrid) {
  const auto cfg = make_single_pulse(P1);
  const auto t = energy_spectrum(cfg, GridSpec{80, 24, 8, 2.5, true}, {}, 0, true);
  EXPECT_EQ(t.p_values.size(), 80u);
  const double peak = locate_extremum(t.p_values, t.dP_dp, true);
  EXPECT_GT(peak, 0.2);
  EXPECT_LT(peak, 0.5);
}

TEST(EnergySpectrum, UnderResolvedAngularGridIsReported) {
  const auto cfg = make_single_pulse(P1);
  EXPECT_THROW(energy_spectrum(cfg, GridSpec{200, 1, 2, 2.5, true}, {}, 0, true), GridUnconverged);
}

TEST(LocateExtremum, RecoversParabolaVertex) {
  std::vector<double> x, y;
  for (int i = 0; i < 30; ++i) {
    x.push_back(0.1 * i + 0.01 * i * i);
    y.push_back(-(x.back() - 1.234) * (x.back() - 1.234));
  }
  EXPECT_NEAR(locate_extremum(x, y, true), 1.234, 1e-12);
  for (double& v : y) v = -v;
  EXPECT_NEAR(locate_extremum(x, y, false), 1.234, 1e-12);
  EXPECT_TRUE(std::isnan(locate_extremum(x, y, true, 100.0, 200.0)));
}
