#pragma once

// Hand-rolled generators for property tests. Everything is seeded so a
// failing case reproduces from the printed seed and index.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "bwdelay/config.hpp"
#include "bwdelay/kinematics.hpp"
#include "bwdelay/pulse.hpp"

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  /// Positron momentum strictly inside the open phase space, away from the
  /// edge where quadrature would need huge node counts.
  bwdelay::LightConeMomentum admissible_positron(const bwdelay::GammaProbe& g, double p_lo = 0.05,
                                                 double p_hi = 1.5, double edge = 0.85) {
    const double p = uniform(p_lo, p_hi);
    const double theta = uniform(0.0, edge * bwdelay::max_open_polar_angle(p, g));
    const double phi = uniform(0.0, bwdelay::two_pi);
    return bwdelay::lepton_from_spherical(p, theta, phi);
  }

  bwdelay::PulseSpec pulse(double xi_hi = 0.3) {
    bwdelay::PulseSpec s;
    s.xi = uniform(0.01, xi_hi);
    s.omega = uniform(0.5, 1.2);
    s.n_cycles = integer(2, 5);
    s.cep = uniform(0.0, bwdelay::two_pi);
    return s;
  }

  bwdelay::PulseEntry pulse_entry() {
    bwdelay::PulseEntry e;
    e.xi = uniform(0.0, 1.5);
    e.omega = uniform(0.1, 2.0);
    e.cycles = integer(1, 8);
    e.cep_pi = uniform(-1.0, 1.0);
    return e;
  }

  bwdelay::RunConfig run_config() {
    bwdelay::RunConfig c;
    c.name = "gen" + std::to_string(integer(0, 999));
    c.gamma_omega = uniform(0.5, 1.9);
    c.pulses = {pulse_entry()};
    if (coin()) c.pulses.push_back(pulse_entry());
    if (coin()) {
      c.delay.values.clear();
      const int n = integer(1, 5);
      for (int i = 0; i < n; ++i) c.delay.values.push_back(uniform(0.0, 20.0));
    } else {
      c.delay.values.clear();
      c.delay.start = uniform(0.0, 2.0);
      c.delay.stop = c.delay.start + uniform(0.0, 10.0);
      c.delay.step = uniform(0.05, 1.0);
    }
    c.delay.unit = coin() ? bwdelay::DelayUnit::lambda_e : bwdelay::DelayUnit::pulse_length;
    c.grid.p_nodes = integer(100, 400);
    c.grid.theta_nodes = integer(48, 192);
    c.grid.phi_nodes = 2 * integer(8, 32);
    c.grid.p_max = uniform(1.0, 6.0);
    c.grid.mirror_azimuth = coin();
    if (coin()) c.output.csv = "out" + std::to_string(integer(0, 99)) + ".csv";
    return c;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testgen
