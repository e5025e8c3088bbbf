#pragma once

// Reduced matrix elements, single-pulse amplitudes F_j and the two-pathway
// combination F_1 + F_2 exp(-i phi).
//
// F_j = (1/k0) int_0^{2pi} dPhi Ctilde_j(Phi) exp(-i Q0 Phi / k0 - i H_j(Phi)),
// Ctilde_j = C_j - (k0 / Q0) (dH_j/dPhi) C_0.
//
// C_j is linear in f and dH/dPhi = h1 f + h2 f^2, so F_j for any gamma
// polarization follows from the two oscillatory moments
//   J1 = int f e^{i psi},  J2 = int f^2 e^{i psi},  psi = -Q0 Phi / k0 - H(Phi).

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <vector>

#include "bwdelay/constants.hpp"
#include "bwdelay/errors.hpp"
#include "bwdelay/kinematics.hpp"
#include "bwdelay/pulse.hpp"
#include "bwdelay/quadrature.hpp"
#include "bwdelay/trig.hpp"

namespace bwdelay {

using complex = std::complex<double>;

/// Fixed-node oscillatory quadrature settings. The node count for a
/// momentum point is max(min_nodes, nodes_per_winding * ceil(W)), rounded up
/// to min_nodes * 2^k, where W estimates the phase windings over the pulse.
struct QuadConfig {
  int min_nodes = 512;
  int nodes_per_winding = 24;
  int max_nodes = 1 << 14;
  /// Levels up to this size keep their node tables in memory.
  int cached_max_nodes = 1 << 14;

  friend bool operator==(const QuadConfig&, const QuadConfig&) = default;
};

/// Threshold below which Ctilde cannot be formed.
inline constexpr double regularization_epsilon = 1e-10;

struct ReducedElements {
  double C0 = 0.0;
  double Cj = 0.0;
  double Ctilde = 0.0;
};

/// Pointwise reduced matrix elements of pulse j at its local phase Phi.
inline ReducedElements reduced_elements(double Phi, const PairKinematics& pair, const PulseField& field,
                                        const Vec3& eps_gamma, const VolkovCoefficients& coeffs) {
  if (std::abs(pair.Q0) < regularization_epsilon) {
    std::ostringstream os;
    os << "|Q0| = " << std::abs(pair.Q0) << " below " << regularization_epsilon;
    throw RegularizationSingular(os.str());
  }
  ReducedElements r;
  r.C0 = polarization_dot(eps_gamma, pair.electron) - polarization_dot(eps_gamma, pair.positron);
  const bool inside = Phi >= 0.0 && Phi <= two_pi;
  if (!inside) return r;
  r.Cj = 2.0 * field.charge_amplitude() * field.shape(Phi) * polarization_dot(laser_polarization, eps_gamma);
  r.Ctilde = r.Cj - field.k0() / pair.Q0 * volkov_phase_rate(Phi, coeffs, field) * r.C0;
  return r;
}

/// Oscillatory moments J1, J2 of one pulse at one momentum point.
struct PulseMoments {
  complex J1;
  complex J2;
  int nodes = 0;
};

/// Quadrature tables for one pulse: composite Clenshaw-Curtis levels on
/// [0, 2 pi] with f, f^2 and the shape antiderivatives at each node.
class PulseQuadrature {
 public:
  PulseQuadrature(PulseField field, QuadConfig cfg = {}) : field_(std::move(field)), cfg_(cfg) {
    if (cfg_.min_nodes < cc_panel_intervals || cfg_.nodes_per_winding < 1 || cfg_.max_nodes < cfg_.min_nodes)
      throw ValidationError("quadrature", "inconsistent node counts");
    base_panels_ = (cfg_.min_nodes + cc_panel_intervals - 1) / cc_panel_intervals;
    for (int panels = base_panels_; panels * cc_panel_intervals <= cfg_.cached_max_nodes; panels *= 2)
      levels_.push_back(make_level(panels));
  }

  const PulseField& field() const { return field_; }
  const QuadConfig& config() const { return cfg_; }

  /// Estimated number of phase windings of the integrand over the pulse.
  double windings(double Q0, const VolkovCoefficients& c) const {
    return (std::abs(Q0) / field_.k0() * two_pi + std::abs(c.h1) * field_.abs_f_integral() +
            std::abs(c.h2) * field_.mean_f2() * two_pi) /
           two_pi;
  }

  /// Node count actually used for the given windings.
  long long nodes_for(double windings) const {
    const double needed = std::max<double>(cfg_.min_nodes, cfg_.nodes_per_winding * std::ceil(windings));
    if (!(needed <= cfg_.max_nodes)) {
      std::ostringstream os;
      os << "needs " << needed << " nodes for " << windings << " windings, limit " << cfg_.max_nodes;
      throw QuadratureUnderResolved(os.str());
    }
    long long panels = base_panels_;
    while (panels * cc_panel_intervals < needed) panels *= 2;
    return panels * cc_panel_intervals;
  }

  PulseMoments moments(double Q0, const VolkovCoefficients& c) const {
    const long long n = nodes_for(windings(Q0, c));
    const double q = -Q0 / field_.k0();
    PulseMoments m;
    m.nodes = static_cast<int>(n);
    for (const Level& level : levels_) {
      if (level.nodes != n) continue;
      const std::size_t size = level.phi.size();
      // Two passes: the phase loop has no reduction and vectorizes.
      thread_local std::vector<double> sin_buf, cos_buf;
      sin_buf.resize(size);
      cos_buf.resize(size);
      double* __restrict sn = sin_buf.data();
      double* __restrict cs = cos_buf.data();
      const double* __restrict ph = level.phi.data();
      const double* __restrict cf = level.cum_f.data();
      const double* __restrict cf2 = level.cum_f2.data();
      const double h1 = c.h1, h2 = c.h2;
      for (std::size_t k = 0; k < size; ++k) sincos_reduced(q * ph[k] - h1 * cf[k] - h2 * cf2[k], sn[k], cs[k]);
      double r1 = 0, i1 = 0, r2 = 0, i2 = 0;
      for (std::size_t k = 0; k < size; ++k) {
        r1 += level.wf[k] * cs[k];
        i1 += level.wf[k] * sn[k];
        r2 += level.wf2[k] * cs[k];
        i2 += level.wf2[k] * sn[k];
      }
      m.J1 = {r1, i1};
      m.J2 = {r2, i2};
      return m;
    }
    // Large levels are evaluated on the fly.
    const QuadratureRule rule = composite_clenshaw_curtis(static_cast<int>(n / cc_panel_intervals), 0.0, two_pi);
    complex j1, j2;
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double phi = rule.nodes[k];
      const double f = field_.shape(phi);
      const auto cum = field_.cumulative(phi);
      const complex e = std::polar(rule.weights[k], q * phi - c.h1 * cum.f - c.h2 * cum.f2);
      j1 += f * e;
      j2 += f * f * e;
    }
    m.J1 = j1;
    m.J2 = j2;
    return m;
  }

 private:
  struct Level {
    long long nodes = 0;
    std::vector<double> phi, wf, wf2, cum_f, cum_f2;
  };

  Level make_level(int panels) const {
    const QuadratureRule rule = composite_clenshaw_curtis(panels, 0.0, two_pi);
    Level l;
    l.nodes = static_cast<long long>(panels) * cc_panel_intervals;
    const std::size_t n = rule.size();
    l.phi = rule.nodes;
    l.wf.resize(n);
    l.wf2.resize(n);
    l.cum_f.resize(n);
    l.cum_f2.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double f = field_.shape(rule.nodes[k]);
      const auto cum = field_.cumulative(rule.nodes[k]);
      l.wf[k] = rule.weights[k] * f;
      l.wf2[k] = rule.weights[k] * f * f;
      l.cum_f[k] = cum.f;
      l.cum_f2[k] = cum.f2;
    }
    return l;
  }

  PulseField field_;
  QuadConfig cfg_;
  int base_panels_ = 0;
  std::vector<Level> levels_;
};

/// F_j from precomputed moments for one gamma polarization.
inline complex pulse_amplitude(const PairKinematics& pair, const PulseField& field, const Vec3& eps_gamma,
                               const VolkovCoefficients& c, const PulseMoments& m) {
  if (std::abs(pair.Q0) < regularization_epsilon) {
    std::ostringstream os;
    os << "|Q0| = " << std::abs(pair.Q0) << " below " << regularization_epsilon;
    throw RegularizationSingular(os.str());
  }
  const double k0 = field.k0();
  const double C0 = polarization_dot(eps_gamma, pair.electron) - polarization_dot(eps_gamma, pair.positron);
  const double cj = 2.0 * field.charge_amplitude() * polarization_dot(laser_polarization, eps_gamma);
  return (cj * m.J1 - (k0 / pair.Q0) * C0 * (c.h1 * m.J1 + c.h2 * m.J2)) / k0;
}

inline complex pulse_amplitude(const PairKinematics& pair, const PulseQuadrature& quad, const Vec3& eps_gamma,
                               const VolkovCoefficients& c) {
  return pulse_amplitude(pair, quad.field(), eps_gamma, c, quad.moments(pair.Q0, c));
}

/// F_j for both gamma polarization modes, sharing one pair of moments.
inline std::array<complex, 2> pulse_amplitudes(const PairKinematics& pair, const PulseQuadrature& quad,
                                               const VolkovCoefficients& c) {
  const PulseMoments m = quad.moments(pair.Q0, c);
  return {pulse_amplitude(pair, quad.field(), GammaProbe::polarization_basis[0], c, m),
          pulse_amplitude(pair, quad.field(), GammaProbe::polarization_basis[1], c, m)};
}

struct DynamicalPhase {
  double phi = 0.0;
  double dressed_energy = 0.0;  // E_L
  double bare_energy = 0.0;     // E0 = -Q0
};

/// phi = H1* + Q0 (L1 + D), equivalently -phi = E_L L1 + E0 D with
/// E_L = -(Q0 + k0 sum_l h_l <f^l>) = -(Q0 + H1* / L1).
inline DynamicalPhase dynamical_phase(double H1_star, double Q0, double L1, double D) {
  return {H1_star + Q0 * (L1 + D), -(Q0 + H1_star / L1), -Q0};
}

inline double combined_intensity(complex F1, complex F2, double phi) {
  return std::norm(F1 + F2 * std::polar(1.0, -phi));
}

/// Everything about the two pathways at one momentum point, per gamma mode.
struct AmplitudeParts {
  std::array<complex, 2> F1{};
  std::array<complex, 2> F2{};
  double H1_star = 0.0;
  double dyn_phase = 0.0;
  double Delta = 0.0;  // front-to-front separation L1 + D

  double intensity() const {
    return combined_intensity(F1[0], F2[0], dyn_phase) + combined_intensity(F1[1], F2[1], dyn_phase);
  }
  double first_intensity() const { return std::norm(F1[0]) + std::norm(F1[1]); }
};

inline AmplitudeParts amplitude_parts(const PairKinematics& pair, const PulseQuadrature& first,
                                      const PulseQuadrature& second, double D) {
  const VolkovCoefficients c1 = volkov_coefficients(pair, first.field());
  const VolkovCoefficients c2 = volkov_coefficients(pair, second.field());
  AmplitudeParts parts;
  parts.F1 = pulse_amplitudes(pair, first, c1);
  parts.F2 = pulse_amplitudes(pair, second, c2);
  parts.H1_star = volkov_phase_total(c1, first.field());
  parts.Delta = first.field().length() + D;
  parts.dyn_phase = parts.H1_star + pair.Q0 * parts.Delta;
  return parts;
}

}  // namespace bwdelay
