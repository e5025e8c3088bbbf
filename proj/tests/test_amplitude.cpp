#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "bwdelay/amplitude.hpp"
#include "bwdelay/trig.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace bwdelay;

namespace {

const PulseSpec P1{0.1, 1.01, 4, 0.0, 0.0};
const Vec3 eps_x = GammaProbe::polarization_basis[0];
const Vec3 eps_y = GammaProbe::polarization_basis[1];

PairKinematics pair_at(double p, double theta, double phi) {
  return solve_partner(lepton_from_spherical(p, theta, phi), GammaProbe{});
}

oracle::PlacedPulse placed(const PulseField& f, double start) {
  const auto& s = f.spec();
  return {f.charge_amplitude(), f.k0(), f.k0() * start, s.n_cycles, s.cep};
}

}  // namespace

TEST(ReducedElements, ScalarCouplingVanishesOutOfPlane) {
  // positron in the x-z plane: both momenta are orthogonal to eps_gamma = y
  const PulseField field(P1);
  const auto pair = pair_at(0.4, 1.0, 0.0);
  const auto c = volkov_coefficients(pair, field);
  const auto r = reduced_elements(1.3, pair, field, eps_y, c);
  EXPECT_NEAR(r.C0, 0.0, 1e-16);
  EXPECT_EQ(r.Cj, 0.0);  // eps_L . y = 0
}

TEST(ReducedElements, FreeFieldHasNoCoupling) {
  PulseSpec s = P1;
  s.xi = 0.0;
  const PulseField field(s);
  const auto pair = pair_at(0.4, 1.0, 0.7);
  const auto c = volkov_coefficients(pair, field);
  testgen::Gen g(31);
  for (int i = 0; i < 20; ++i) {
    const auto r = reduced_elements(g.uniform(0, two_pi), pair, field, eps_x, c);
    EXPECT_EQ(r.Cj, 0.0);
    EXPECT_EQ(r.Ctilde, 0.0);
  }
}

TEST(ReducedElements, OutsideSupportOnlyC0Survives) {
  const PulseField field(P1);
  const auto pair = pair_at(0.4, 1.0, 0.7);
  const auto c = volkov_coefficients(pair, field);
  for (double Phi : {-0.1, two_pi + 0.1}) {
    const auto r = reduced_elements(Phi, pair, field, eps_x, c);
    EXPECT_EQ(r.Cj, 0.0);
    EXPECT_EQ(r.Ctilde, 0.0);
  }
}

TEST(ReducedElements, SingularRegularizationIsRejected) {
  const PulseField field(P1);
  auto pair = pair_at(0.4, 1.0, 0.7);
  const auto c = volkov_coefficients(pair, field);
  pair.Q0 = 0.0;
  EXPECT_THROW(reduced_elements(1.0, pair, field, eps_x, c), RegularizationSingular);
  EXPECT_THROW(pulse_amplitude(pair, field, eps_x, c, PulseMoments{}), RegularizationSingular);
}

TEST(PulseAmplitude, AgreesWithDirectLightConeIntegral) {
  testgen::Gen g(37);
  for (int i = 0; i < 6; ++i) {
    const PulseSpec s = g.pulse(0.6);
    const PulseQuadrature quad{PulseField(s)};
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}), GammaProbe{});
    const auto c = volkov_coefficients(pair, quad.field());
    const auto F = pulse_amplitudes(pair, quad, c);
    const auto Mx = oracle::direct_amplitude(pair, {placed(quad.field(), 0.0)}, eps_x, 1500);
    const auto My = oracle::direct_amplitude(pair, {placed(quad.field(), 0.0)}, eps_y, 1500);
    const double scale = std::hypot(std::abs(Mx), std::abs(My));
    EXPECT_LT(std::abs(F[0] - Mx) / scale, 1e-6) << "case " << i;
    EXPECT_LT(std::abs(F[1] - My) / scale, 1e-6) << "case " << i;
  }
}

TEST(PulseAmplitude, TwoPathwaySumAgreesWithDirectIntegral) {
  const PulseSpec a{0.1, 1.01, 4, 0.0, 0.0};
  const PulseSpec b{0.2, 0.808, 3, pi / 2, 0.0};
  const PulseQuadrature qa{PulseField(a)}, qb{PulseField(b)};
  testgen::Gen g(41);
  for (int i = 0; i < 4; ++i) {
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}), GammaProbe{});
    const double D = g.uniform(0.0, 6.0);
    const auto parts = amplitude_parts(pair, qa, qb, D);
    const std::vector<oracle::PlacedPulse> pulses{placed(qa.field(), 0.0),
                                                  placed(qb.field(), qa.field().length() + D)};
    const auto Mx = oracle::direct_amplitude(pair, pulses, eps_x, 1500);
    const auto My = oracle::direct_amplitude(pair, pulses, eps_y, 1500);
    const complex shift = std::polar(1.0, -parts.dyn_phase);
    const double scale = std::hypot(std::abs(Mx), std::abs(My));
    EXPECT_LT(std::abs(parts.F1[0] + parts.F2[0] * shift - Mx) / scale, 1e-6);
    EXPECT_LT(std::abs(parts.F1[1] + parts.F2[1] * shift - My) / scale, 1e-6);
  }
}

TEST(PulseAmplitude, IdenticalPulsesGiveIdenticalAmplitudes) {
  const PulseQuadrature q1{PulseField(P1)}, q2{PulseField(P1)};
  testgen::Gen g(43);
  for (int i = 0; i < 20; ++i) {
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}), GammaProbe{});
    const auto parts = amplitude_parts(pair, q1, q2, g.uniform(0, 10));
    EXPECT_EQ(parts.F1, parts.F2);
  }
}

TEST(PulseAmplitude, StableUnderNodeDoubling) {
  QuadConfig fine;
  fine.min_nodes = 1024;
  fine.nodes_per_winding = 48;
  fine.max_nodes = 1 << 15;
  fine.cached_max_nodes = 1 << 15;
  const PulseQuadrature coarse_q{PulseField(P1)}, fine_q{PulseField(P1), fine};
  testgen::Gen g(47);
  for (int i = 0; i < 50; ++i) {
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}), GammaProbe{});
    const auto c = volkov_coefficients(pair, coarse_q.field());
    const auto a = pulse_amplitudes(pair, coarse_q, c);
    const auto b = pulse_amplitudes(pair, fine_q, c);
    const double scale = std::hypot(std::abs(b[0]), std::abs(b[1]));
    EXPECT_LT(std::abs(std::abs(a[0]) - std::abs(b[0])) / scale, 1e-6);
    EXPECT_LT(std::abs(std::abs(a[1]) - std::abs(b[1])) / scale, 1e-6);
  }
}

TEST(PulseQuadrature, StreamedLevelsMatchTabulatedLevels) {
  QuadConfig streamed;
  streamed.cached_max_nodes = 512;
  const PulseQuadrature tab{PulseField(P1)}, str{PulseField(P1), streamed};
  testgen::Gen g(53);
  int checked = 0;
  for (int i = 0; i < 100 && checked < 10; ++i) {
    const auto pair = solve_partner(g.admissible_positron(GammaProbe{}, 0.05, 2.4, 0.99), GammaProbe{});
    const auto c = volkov_coefficients(pair, tab.field());
    if (tab.nodes_for(tab.windings(pair.Q0, c)) <= 512) continue;
    ++checked;
    const auto a = tab.moments(pair.Q0, c), b = str.moments(pair.Q0, c);
    EXPECT_EQ(a.nodes, b.nodes);
    // moments cancel strongly; compare on the scale of int |f| and int f^2
    EXPECT_LT(std::abs(a.J1 - b.J1) / tab.field().abs_f_integral(), 1e-13);
    EXPECT_LT(std::abs(a.J2 - b.J2) / (two_pi * tab.field().mean_f2()), 1e-13);
  }
  EXPECT_GT(checked, 0);
}

TEST(PulseQuadrature, NodeCountsArePowersOfTwoTimesBase) {
  const PulseQuadrature q{PulseField(P1)};
  EXPECT_EQ(q.nodes_for(0.0), 512);
  EXPECT_EQ(q.nodes_for(21.0), 512);
  EXPECT_EQ(q.nodes_for(22.0), 1024);
  EXPECT_EQ(q.nodes_for(600.0), 16384);
  EXPECT_THROW(q.nodes_for(700.0), QuadratureUnderResolved);
  EXPECT_THROW((PulseQuadrature{PulseField(P1), QuadConfig{512, 24, 256, 256}}), ValidationError);
}

TEST(DynamicalPhase, EnergyDecomposition) {
  testgen::Gen g(59);
  for (int i = 0; i < 100; ++i) {
    const double H = g.uniform(-3, 3), Q0 = g.uniform(-3, -1), L = g.uniform(5, 80), D = g.uniform(0, 15);
    const auto d = dynamical_phase(H, Q0, L, D);
    EXPECT_NEAR(-d.phi, d.dressed_energy * L + d.bare_energy * D, 1e-12 * (1 + std::abs(d.phi)));
    EXPECT_DOUBLE_EQ(d.bare_energy, -Q0);
    EXPECT_NEAR(-dynamical_phase(H, Q0, L, 0.0).phi, d.dressed_energy * L, 1e-12 * L);
    // advancing D by one bare period winds phi by exactly -2 pi
    const auto later = dynamical_phase(H, Q0, L, D + two_pi / d.bare_energy);
    EXPECT_NEAR(later.phi - d.phi, -two_pi, 1e-10);
  }
}

TEST(CombinedIntensity, BoundsAndLimits) {
  testgen::Gen g(61);
  for (int i = 0; i < 500; ++i) {
    const complex F1{g.uniform(-1, 1), g.uniform(-1, 1)}, F2{g.uniform(-1, 1), g.uniform(-1, 1)};
    const double phi = g.uniform(-50, 50);
    const double I = combined_intensity(F1, F2, phi);
    EXPECT_GE(I, 0.0);
    EXPECT_LE(I, 2.0 * (std::norm(F1) + std::norm(F2)) * (1 + 1e-15));
    EXPECT_NEAR(combined_intensity(F1, 0.0, phi), std::norm(F1), 1e-15);
    // equal amplitudes: 2 |F|^2 (1 + cos phi)
    EXPECT_NEAR(combined_intensity(F1, F1, phi), 2 * std::norm(F1) * (1 + std::cos(phi)), 1e-13);
  }
}

TEST(Trig, ReducedSincosMatchesLibm) {
  testgen::Gen g(67);
  for (int i = 0; i < 200000; ++i) {
    const double x = i < 100000 ? g.uniform(-8.0, 8.0) : g.uniform(-1e5, 1e5);
    double s, c;
    sincos_reduced(x, s, c);
    ASSERT_NEAR(s, std::sin(x), 1e-15) << x;
    ASSERT_NEAR(c, std::cos(x), 1e-15) << x;
  }
  double s, c;
  sincos_reduced(0.0, s, c);
  EXPECT_EQ(s, 0.0);
  EXPECT_EQ(c, 1.0);
}
