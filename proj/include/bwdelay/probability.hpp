#pragma once

// Pair-creation probabilities over the positron phase space.
//
//   d^3P / (dp d^2Omega) = e^2 / (16 pi^2 omega_gamma) sum_lambda
//       |p|^2 / (E (k_gamma^- - p^-)) |F_1 + F_2 e^{-i phi}|^2
//
// The positron momentum is sampled on a spherical Gauss-Legendre product
// grid whose polar range at each |p| stops at the phase-space boundary
// p^- = k_gamma^-. All amplitude work happens once in AmplitudeCache; every
// delay, pulse order and observable afterwards is a cheap reduction over it.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <vector>

#include "bwdelay/amplitude.hpp"
#include "bwdelay/constants.hpp"
#include "bwdelay/double_pulse.hpp"
#include "bwdelay/errors.hpp"
#include "bwdelay/kinematics.hpp"
#include "bwdelay/parallel.hpp"
#include "bwdelay/pulse.hpp"
#include "bwdelay/quadrature.hpp"

namespace bwdelay {

struct GridSpec {
  int p_nodes = 200;
  int theta_nodes = 96;
  int phi_nodes = 32;
  double p_max = 2.5;
  /// Evaluate only phi in (0, pi) and fold in the mirror node at -phi; the
  /// integrand is even under reflection across the polarization plane.
  bool mirror_azimuth = true;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

  GridSpec scaled(double factor) const {
    GridSpec g = *this;
    g.p_nodes = std::max(1, static_cast<int>(std::lround(p_nodes * factor)));
    g.theta_nodes = std::max(1, static_cast<int>(std::lround(theta_nodes * factor)));
    g.phi_nodes = std::max(2, 2 * static_cast<int>(std::lround(phi_nodes * factor / 2.0)));
    return g;
  }

  void validate() const {
    if (p_nodes < 1) throw ValidationError("grid.p_nodes", "must be >= 1");
    if (theta_nodes < 1) throw ValidationError("grid.theta_nodes", "must be >= 1");
    if (phi_nodes < 1) throw ValidationError("grid.phi_nodes", "must be >= 1");
    if (!(p_max > 0.0)) throw ValidationError("grid.p_max", "must be > 0");
  }
};

/// Default p_max: 2.5 m for weak pulses (max xi <= 0.2), 4.0 m otherwise.
inline double default_p_max(double max_xi) { return max_xi <= 0.2 ? 2.5 : 4.0; }

class MomentumGrid {
 public:
  struct Node {
    std::uint32_t radial = 0;
    double p = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    double weight = 0.0;  // dp d^2Omega measure
  };

  MomentumGrid(const GridSpec& spec, const GammaProbe& gamma) : spec_(spec), gamma_(gamma) {
    spec_.validate();
    const QuadratureRule radial = gauss_legendre(spec_.p_nodes, 0.0, spec_.p_max);
    p_values_ = radial.nodes;
    p_weights_ = radial.weights;
    const QuadratureRule azimuth = gauss_legendre(spec_.phi_nodes, 0.0, two_pi);
    const bool mirror = spec_.mirror_azimuth && spec_.phi_nodes % 2 == 0;
    const int phi_count = mirror ? spec_.phi_nodes / 2 : spec_.phi_nodes;
    const QuadratureRule unit_polar = gauss_legendre(spec_.theta_nodes, 0.0, 1.0);

    nodes_.reserve(static_cast<std::size_t>(spec_.p_nodes) * spec_.theta_nodes * phi_count);
    for (int i = 0; i < spec_.p_nodes; ++i) {
      const double theta_max = max_open_polar_angle(p_values_[i], gamma_);
      if (theta_max <= 0.0) continue;
      for (int j = 0; j < spec_.theta_nodes; ++j) {
        const double theta = theta_max * unit_polar.nodes[j];
        const double w_theta = theta_max * unit_polar.weights[j] * std::sin(theta);
        for (int k = 0; k < phi_count; ++k) {
          const double w_phi = mirror ? 2.0 * azimuth.weights[k] : azimuth.weights[k];
          nodes_.push_back({static_cast<std::uint32_t>(i), p_values_[i], theta, azimuth.nodes[k],
                            p_weights_[i] * w_theta * w_phi});
        }
      }
    }
  }

  const GridSpec& spec() const { return spec_; }
  const GammaProbe& gamma() const { return gamma_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<double>& p_values() const { return p_values_; }
  const std::vector<double>& p_weights() const { return p_weights_; }

  /// Sum of weight * p^2, the d^3p volume of the admissible region.
  double admissible_volume() const {
    double v = 0.0;
    for (const Node& n : nodes_) v += n.weight * n.p * n.p;
    return v;
  }

  /// Distance to the nearest neighbouring radial node.
  double radial_spacing(std::size_t i) const {
    double s = spec_.p_max;
    if (i > 0) s = std::min(s, p_values_[i] - p_values_[i - 1]);
    if (i + 1 < p_values_.size()) s = std::min(s, p_values_[i + 1] - p_values_[i]);
    return s;
  }

 private:
  GridSpec spec_;
  GammaProbe gamma_;
  std::vector<double> p_values_;
  std::vector<double> p_weights_;
  std::vector<Node> nodes_;
};

/// |p|^2 / (E (k_gamma^- - p^-)) times e^2 / (16 pi^2 omega_gamma).
inline double phase_space_factor(const PairKinematics& pair, const GammaProbe& gamma) {
  const LightConeMomentum& p = pair.positron;
  const double p2 = p.p_perp.norm2() + p.p_par * p.p_par;
  return fine_structure / (16.0 * pi * pi * gamma.omega_gamma) * p2 /
         (p.E * (gamma.k_minus() - p.p_minus));
}

inline double differential_probability(const AmplitudeParts& parts, const PairKinematics& pair,
                                       const GammaProbe& gamma) {
  return phase_space_factor(pair, gamma) * parts.intensity();
}

/// Single-pulse density rho(p_+) for amplitudes F (both gamma modes).
inline double single_differential_probability(const std::array<complex, 2>& F, const PairKinematics& pair,
                                              const GammaProbe& gamma) {
  return phase_space_factor(pair, gamma) * (std::norm(F[0]) + std::norm(F[1]));
}

/// Which observable a reduction over the cache produces.
struct Channel {
  enum class Kind { first_single, second_single, forward, reversed };
  Kind kind = Kind::first_single;
  double D = 0.0;

  static Channel first_single() { return {Kind::first_single, 0.0}; }
  static Channel second_single() { return {Kind::second_single, 0.0}; }
  /// first pulse, gap D, second pulse
  static Channel forward(double D) { return {Kind::forward, D}; }
  /// second pulse, gap D, first pulse
  static Channel reversed(double D) { return {Kind::reversed, D}; }
};

struct CachedNode {
  std::uint32_t radial = 0;
  double measure = 0.0;  // grid weight times phase_space_factor; 0 if excluded
  double Q0 = 0.0;
  double H_first = 0.0;   // H* of the first pulse
  double H_second = 0.0;  // H* of the second pulse
  std::array<complex, 2> F_first{};
  std::array<complex, 2> F_second{};
};

/// F_1, F_2, H_1*, H_2* and Q0 at every grid node. Nothing stored depends
/// on D or on the pulse order; immutable once built.
class AmplitudeCache {
 public:
  AmplitudeCache(const DoublePulseConfig& config, const MomentumGrid& grid, const QuadConfig& quad = {},
                 int threads = 0)
      : config_(config.with_phase_shifts()),
        gamma_(grid.gamma()),
        p_values_(grid.p_values()),
        p_weights_(grid.p_weights()) {
    config_.validate();
    const auto start = std::chrono::steady_clock::now();
    const PulseQuadrature first(PulseField(config_.pulse_first), quad);
    std::optional<PulseQuadrature> second;
    shared_ = !config_.pulse_second || config_.pulse_second->same_shape(config_.pulse_first);
    if (!shared_) second.emplace(PulseField(*config_.pulse_second), quad);
    L_first_ = first.field().length();
    L_second_ = config_.pulse_second ? config_.pulse_second->length() : L_first_;
    k0_first_ = first.field().k0();
    k0_second_ = config_.pulse_second ? config_.pulse_second->k0() : k0_first_;

    const auto& grid_nodes = grid.nodes();
    nodes_.resize(grid_nodes.size());
    std::vector<unsigned char> excluded(grid_nodes.size(), 0);
    constexpr std::size_t chunk = 512;
    const std::size_t chunks = (grid_nodes.size() + chunk - 1) / chunk;
    parallel_for(chunks, resolve_threads(threads), [&](std::size_t c) {
      const std::size_t end = std::min(grid_nodes.size(), (c + 1) * chunk);
      for (std::size_t i = c * chunk; i < end; ++i) {
        const auto& g = grid_nodes[i];
        CachedNode& out = nodes_[i];
        out.radial = g.radial;
        const auto pair = try_solve_partner(lepton_from_spherical(g.p, g.theta, g.phi), gamma_);
        if (!pair) {
          excluded[i] = 1;
          continue;
        }
        out.Q0 = pair->Q0;
        try {
          const VolkovCoefficients c1 = volkov_coefficients(*pair, first.field());
          out.F_first = pulse_amplitudes(*pair, first, c1);
          out.H_first = volkov_phase_total(c1, first.field());
          if (second) {
            const VolkovCoefficients c2 = volkov_coefficients(*pair, second->field());
            out.F_second = pulse_amplitudes(*pair, *second, c2);
            out.H_second = volkov_phase_total(c2, second->field());
          } else {
            out.F_second = out.F_first;
            out.H_second = out.H_first;
          }
        } catch (const Error& e) {
          const auto cat = e.category();
          if (cat != ErrorCategory::quadrature_under_resolved && cat != ErrorCategory::collinear_singularity)
            throw;
          excluded[i] = 2;
          continue;
        }
        out.measure = g.weight * phase_space_factor(*pair, gamma_);
      }
    });
    for (unsigned char e : excluded) {
      if (e == 1) ++closed_nodes_;
      if (e == 2) ++unresolved_nodes_;
    }
    build_seconds_ = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  const DoublePulseConfig& config() const { return config_; }
  const GammaProbe& gamma() const { return gamma_; }
  const std::vector<CachedNode>& nodes() const { return nodes_; }
  const std::vector<double>& p_values() const { return p_values_; }
  const std::vector<double>& p_weights() const { return p_weights_; }
  double first_length() const { return L_first_; }
  double second_length() const { return L_second_; }
  double first_k0() const { return k0_first_; }
  double second_k0() const { return k0_second_; }
  bool shares_pulse() const { return shared_; }
  std::size_t closed_nodes() const { return closed_nodes_; }
  /// Nodes dropped because the quadrature could not resolve them.
  std::size_t unresolved_nodes() const { return unresolved_nodes_; }
  double build_seconds() const { return build_seconds_; }

  /// |amplitude|^2 summed over gamma modes at one node for a channel.
  double intensity(const CachedNode& n, const Channel& ch) const {
    switch (ch.kind) {
      case Channel::Kind::first_single:
        return std::norm(n.F_first[0]) + std::norm(n.F_first[1]);
      case Channel::Kind::second_single:
        return std::norm(n.F_second[0]) + std::norm(n.F_second[1]);
      case Channel::Kind::forward: {
        const double phi = n.H_first + n.Q0 * (L_first_ + ch.D);
        return combined_intensity(n.F_first[0], n.F_second[0], phi) +
               combined_intensity(n.F_first[1], n.F_second[1], phi);
      }
      case Channel::Kind::reversed: {
        const double phi = n.H_second + n.Q0 * (L_second_ + ch.D);
        return combined_intensity(n.F_second[0], n.F_first[0], phi) +
               combined_intensity(n.F_second[1], n.F_first[1], phi);
      }
    }
    return 0.0;
  }

  /// Total probability, summed in node order.
  double total(const Channel& ch) const {
    double sum = 0.0;
    for (const CachedNode& n : nodes_)
      if (n.measure != 0.0) sum += n.measure * intensity(n, ch);
    return sum;
  }

  /// dP/dp at every radial node.
  std::vector<double> spectrum(const Channel& ch) const {
    std::vector<double> s(p_values_.size(), 0.0);
    for (const CachedNode& n : nodes_)
      if (n.measure != 0.0) s[n.radial] += n.measure * intensity(n, ch);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] /= p_weights_[i];
    return s;
  }

  /// Laser-dressed energy E_L = -(Q0 + H*/L) required from the first pulse.
  double dressed_energy(const CachedNode& n) const { return -(n.Q0 + n.H_first / L_first_); }

 private:
  DoublePulseConfig config_;
  GammaProbe gamma_;
  std::vector<double> p_values_;
  std::vector<double> p_weights_;
  std::vector<CachedNode> nodes_;
  double L_first_ = 0.0, L_second_ = 0.0, k0_first_ = 0.0, k0_second_ = 0.0;
  bool shared_ = false;
  std::size_t closed_nodes_ = 0;
  std::size_t unresolved_nodes_ = 0;
  double build_seconds_ = 0.0;
};

struct SpectrumTable {
  std::vector<double> p_values;
  std::vector<double> dP_dp;
  std::string fingerprint;
};

/// Location of the largest sample in [lo, hi], refined by a parabola
/// through the neighbouring samples.
inline double locate_extremum(const std::vector<double>& x, const std::vector<double>& y, bool maximum,
                              double lo = -INFINITY, double hi = INFINITY) {
  std::size_t best = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < lo || x[i] > hi) continue;
    if (best == x.size() || (maximum ? y[i] > y[best] : y[i] < y[best])) best = i;
  }
  if (best == x.size()) return NAN;
  if (best == 0 || best + 1 >= x.size()) return x[best];
  const double x0 = x[best - 1], x1 = x[best], x2 = x[best + 1];
  const double y0 = y[best - 1], y1 = y[best], y2 = y[best + 1];
  // vertex of the interpolating parabola on a non-uniform stencil
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curv = (d12 - d01) / (x2 - x0);
  if (curv == 0.0) return x1;
  const double v = 0.5 * (x0 + x1) - d01 / (2.0 * curv);
  return std::clamp(v, x0, x2);
}

namespace detail {

inline Channel default_channel(const DoublePulseConfig& c) {
  return c.is_double() ? Channel::forward(c.gap_D) : Channel::first_single();
}

}  // namespace detail

/// dP/dp for the configuration: the double-pulse spectrum at its gap D, or
/// the single-pulse spectrum. With verify set, the angular node counts are
/// doubled and GridUnconverged is raised if the spectral peak moves by
/// more than the local radial spacing.
inline SpectrumTable energy_spectrum(const DoublePulseConfig& config, const GridSpec& grid_spec,
                                     const QuadConfig& quad = {}, int threads = 0, bool verify = false) {
  const MomentumGrid grid(grid_spec, config.gamma);
  const AmplitudeCache cache(config, grid, quad, threads);
  SpectrumTable t{grid.p_values(), cache.spectrum(detail::default_channel(config)), {}};
  if (verify) {
    GridSpec finer = grid_spec;
    finer.theta_nodes *= 2;
    finer.phi_nodes *= 2;
    const MomentumGrid fine_grid(finer, config.gamma);
    const AmplitudeCache fine(config, fine_grid, quad, threads);
    const auto fine_spec = fine.spectrum(detail::default_channel(config));
    const auto it = std::max_element(t.dP_dp.begin(), t.dP_dp.end());
    const std::size_t i = static_cast<std::size_t>(it - t.dP_dp.begin());
    const double coarse_peak = locate_extremum(t.p_values, t.dP_dp, true);
    const double fine_peak = locate_extremum(t.p_values, fine_spec, true);
    if (std::abs(coarse_peak - fine_peak) > grid.radial_spacing(i)) {
      std::ostringstream os;
      os << "spectral peak moved from " << coarse_peak << " to " << fine_peak << " when doubling angular nodes";
      throw GridUnconverged(os.str());
    }
  }
  return t;
}

inline double total_probability(const DoublePulseConfig& config, const GridSpec& grid_spec,
                                 const QuadConfig& quad = {}, int threads = 0) {
  const MomentumGrid grid(grid_spec, config.gamma);
  const AmplitudeCache cache(config, grid, quad, threads);
  return cache.total(detail::default_channel(config));
}

}  // namespace bwdelay
