#include <gtest/gtest.h>

#include <cmath>

#include "bwdelay/model.hpp"
#include "support/generators.hpp"

using namespace bwdelay;

namespace {

const PulseSpec P1{0.1, 1.01, 4, 0.0, 0.0};

const AmplitudeCache& p1_cache() {
  static const AmplitudeCache cache = [] {
    const auto cfg = make_single_pulse(P1);
    return AmplitudeCache(cfg, MomentumGrid(GridSpec{}.scaled(0.5), cfg.gamma));
  }();
  return cache;
}

}  // namespace

TEST(DressedEnergy, SingleNodeHasZeroWidth) {
  const auto st = dressed_energy_stats({{1.234, 0.5}, {9.0, 0.0}});
  EXPECT_EQ(st.mean_EL, 1.234);
  EXPECT_EQ(st.width_EL, 0.0);
  EXPECT_EQ(st.total_weight, 0.5);
  EXPECT_NEAR(st.histogram.total(), 0.5, 1e-15);
}

TEST(DressedEnergy, EmptySampleGivesEmptyStats) {
  const auto st = dressed_energy_stats(std::vector<WeightedEnergy>{});
  EXPECT_EQ(st.total_weight, 0.0);
  EXPECT_TRUE(st.histogram.weights.empty());
}

TEST(DressedEnergy, WeightedMomentsOfRandomSamples) {
  testgen::Gen g(89);
  for (int k = 0; k < 20; ++k) {
    std::vector<WeightedEnergy> s;
    double w = 0, m = 0, m2 = 0;
    for (int i = 0; i < 1000; ++i) {
      s.push_back({g.uniform(0.5, 3.0), g.uniform(0.0, 1.0)});
      w += s.back().weight;
      m += s.back().weight * s.back().energy;
      m2 += s.back().weight * s.back().energy * s.back().energy;
    }
    const auto st = dressed_energy_stats(s);
    EXPECT_NEAR(st.mean_EL, m / w, 1e-12);
    EXPECT_NEAR(st.width_EL, std::sqrt(m2 / w - (m / w) * (m / w)), 1e-9);
    EXPECT_NEAR(st.histogram.total() + st.overflow_weight, w, 1e-10 * w);
    for (double v : st.histogram.weights) EXPECT_GE(v, 0.0);
  }
}

TEST(DressedEnergy, UndressedLimitGivesBareEnergy) {
  PulseSpec s = P1;
  s.xi = 0.0;
  const auto cfg = make_single_pulse(s);
  const AmplitudeCache cache(cfg, MomentumGrid(GridSpec{10, 6, 4, 2.5, true}, cfg.gamma));
  for (const auto& n : cache.nodes()) EXPECT_EQ(cache.dressed_energy(n), -n.Q0);
}

TEST(DressedEnergy, HistogramIsNormalizedAndConsistent) {
  const auto st = dressed_energy_stats(p1_cache());
  EXPECT_GT(st.mean_EL, 0.0);
  EXPECT_GE(st.width_EL, 0.0);
  EXPECT_NEAR(st.total_weight, p1_cache().total(Channel::first_single()), 1e-12 * st.total_weight);
  EXPECT_NEAR(st.histogram.total(), st.total_weight, 1e-3 * st.total_weight);
  const auto& h = st.histogram;
  double w = 0, m = 0, m2 = 0;
  for (std::size_t i = 0; i < h.weights.size(); ++i) {
    w += h.weights[i];
    m += h.weights[i] * h.center(i);
    m2 += h.weights[i] * h.center(i) * h.center(i);
  }
  m /= w;
  const double width = std::sqrt(m2 / w - m * m);
  EXPECT_NEAR(m, st.mean_EL, 5e-3 * st.mean_EL);
  EXPECT_NEAR(width, st.width_EL, 5e-3 * st.width_EL);
}

TEST(DressedEnergy, OnePhotonRegimeCentresOnLaserFrequency) {
  const auto st = dressed_energy_stats(p1_cache());
  EXPECT_NEAR(st.mean_EL, 1.01, 0.101) << "width " << st.width_EL;
}

TEST(GaussianModel, EnvelopeBoundsTheOscillation) {
  testgen::Gen g(97);
  for (int k = 0; k < 20; ++k) {
    DressedEnergyStats st;
    st.mean_EL = g.uniform(0.5, 2.0);
    st.width_EL = g.uniform(0.0, 0.5);
    const double L = g.uniform(5.0, 80.0);
    std::vector<double> D;
    for (int i = 0; i < 200; ++i) D.push_back(0.1 * i);
    const auto c = gaussian_ratio_model(st, L, D);
    EXPECT_EQ(c.mode, RatioCurve::Mode::model);
    for (std::size_t i = 0; i < D.size(); ++i) {
      const double env = gaussian_model_envelope(st, L, D[i]);
      EXPECT_LE(std::abs(c.ratio[i] - 1.0), env + 1e-15);
      if (i) EXPECT_LE(env, gaussian_model_envelope(st, L, D[i - 1]));
    }
  }
}

TEST(GaussianModel, LimitsOfTheWidth) {
  DressedEnergyStats st;
  st.mean_EL = 1.01;
  st.width_EL = 0.0;
  const double L = 24.88;
  const auto c = gaussian_ratio_model(st, L, {0.0, 1.0, 2.0, 7.5});
  for (std::size_t i = 0; i < c.ratio.size(); ++i)
    EXPECT_NEAR(c.ratio[i], 1.0 + std::cos(1.01 * (L + c.D_values[i])), 1e-14);
  st.width_EL = 0.12;
  EXPECT_NEAR(gaussian_ratio_model(st, L, {1e3}).ratio[0], 1.0, 1e-12);
  EXPECT_THROW(gaussian_ratio_model(st, 0.0, {1.0}), ValidationError);
}
