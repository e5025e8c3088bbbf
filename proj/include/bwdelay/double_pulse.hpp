#pragma once

#include <optional>

#include "bwdelay/errors.hpp"
#include "bwdelay/kinematics.hpp"
#include "bwdelay/pulse.hpp"

namespace bwdelay {

/// A gamma quantum probing one pulse, or two strictly separated pulses with
/// a gap D between the end of the first and the front of the second.
/// The first pulse starts at x^- = 0 (delta_1 = 0) and the second at
/// Delta = L1 + D, i.e. delta_2 = k2 (L1 + D).
struct DoublePulseConfig {
  PulseSpec pulse_first;
  std::optional<PulseSpec> pulse_second;
  double gap_D = 0.0;
  GammaProbe gamma;

  friend bool operator==(const DoublePulseConfig&, const DoublePulseConfig&) = default;

  bool is_double() const { return pulse_second.has_value(); }
  double separation() const { return pulse_first.length() + gap_D; }

  void validate() const {
    pulse_first.validate("pulse1");
    if (pulse_second) pulse_second->validate("pulse2");
    if (!(gap_D >= 0.0)) throw ValidationError("delay", "gap D must be >= 0");
    if (!(gamma.omega_gamma > 0.0)) throw ValidationError("gamma.omega", "must be > 0");
  }

  /// Copy with delta_1 = 0 and delta_2 = k2 (L1 + D).
  DoublePulseConfig with_phase_shifts() const {
    DoublePulseConfig c = *this;
    c.pulse_first.delta = 0.0;
    if (c.pulse_second) c.pulse_second->delta = c.pulse_second->k0() * c.separation();
    return c;
  }
};

inline DoublePulseConfig make_double_pulse(const PulseSpec& first, const PulseSpec& second, double D,
                                           const GammaProbe& gamma = {}) {
  DoublePulseConfig c{first, second, D, gamma};
  c.validate();
  return c.with_phase_shifts();
}

inline DoublePulseConfig make_single_pulse(const PulseSpec& pulse, const GammaProbe& gamma = {}) {
  DoublePulseConfig c{pulse, std::nullopt, 0.0, gamma};
  c.validate();
  return c.with_phase_shifts();
}

}  // namespace bwdelay
