#pragma once

// Delay sweeps R(D), pulse-order exchange and the order sum rule.
//
// F_j does not depend on the pulse positions, so one AmplitudeCache serves
// every gap D and both pulse orders: each D only re-evaluates the phase
// factor exp(-i phi(D)) per node and reduces.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bwdelay/double_pulse.hpp"
#include "bwdelay/parallel.hpp"
#include "bwdelay/probability.hpp"

namespace bwdelay {

struct RatioCurve {
  /// identical: R = P_double / (2 P_single); distinct: R = P_double / (P_A + P_B).
  enum class Mode { identical, distinct, model };

  Mode mode = Mode::identical;
  std::vector<double> D_values;
  std::vector<double> ratio;
  std::vector<double> P_double;
  std::vector<double> P_first_single;
  std::vector<double> P_second_single;
  std::string fingerprint;
};

inline std::string to_string(RatioCurve::Mode m) {
  switch (m) {
    case RatioCurve::Mode::identical: return "identical";
    case RatioCurve::Mode::distinct: return "distinct";
    case RatioCurve::Mode::model: return "model";
  }
  return "unknown";
}

enum class PulseOrder { forward, reversed };

inline Channel channel_for(PulseOrder order, double D) {
  return order == PulseOrder::forward ? Channel::forward(D) : Channel::reversed(D);
}

/// R(D) from a frozen cache; parallel over D, each reduction in node order.
inline RatioCurve sweep_delay(const AmplitudeCache& cache, const std::vector<double>& D_list,
                              PulseOrder order = PulseOrder::forward, int threads = 0) {
  if (D_list.empty()) throw ValidationError("delay", "D list is empty");
  for (double D : D_list)
    if (!(D >= 0.0)) throw ValidationError("delay", "D must be >= 0");
  RatioCurve curve;
  curve.mode = cache.shares_pulse() ? RatioCurve::Mode::identical : RatioCurve::Mode::distinct;
  curve.D_values = D_list;
  const double Pa = cache.total(Channel::first_single());
  const double Pb = cache.shares_pulse() ? Pa : cache.total(Channel::second_single());
  curve.P_double.resize(D_list.size());
  parallel_for(D_list.size(), resolve_threads(threads),
               [&](std::size_t i) { curve.P_double[i] = cache.total(channel_for(order, D_list[i])); });
  // first/second refer to the arrival order of the sweep
  const double first = order == PulseOrder::forward ? Pa : Pb;
  const double second = order == PulseOrder::forward ? Pb : Pa;
  curve.P_first_single.assign(D_list.size(), first);
  curve.P_second_single.assign(D_list.size(), second);
  curve.ratio.resize(D_list.size());
  for (std::size_t i = 0; i < D_list.size(); ++i) curve.ratio[i] = curve.P_double[i] / (Pa + Pb);
  return curve;
}

inline RatioCurve sweep_delay(const DoublePulseConfig& config, const std::vector<double>& D_list,
                              const GridSpec& grid_spec, const QuadConfig& quad = {}, int threads = 0) {
  if (!config.is_double()) throw ValidationError("pulses", "a delay sweep needs two pulses");
  const MomentumGrid grid(grid_spec, config.gamma);
  const AmplitudeCache cache(config, grid, quad, threads);
  return sweep_delay(cache, D_list, PulseOrder::forward, threads);
}

/// Reference path: rebuilds every amplitude for each D, with the second
/// pulse shifted to delta_2 = k2 (L1 + D).
inline RatioCurve sweep_delay_uncached(const DoublePulseConfig& config, const std::vector<double>& D_list,
                                       const GridSpec& grid_spec, const QuadConfig& quad = {}, int threads = 0) {
  const MomentumGrid grid(grid_spec, config.gamma);
  RatioCurve curve;
  curve.D_values = D_list;
  for (double D : D_list) {
    DoublePulseConfig c = config;
    c.gap_D = D;
    const AmplitudeCache cache(c.with_phase_shifts(), grid, quad, threads);
    curve.mode = cache.shares_pulse() ? RatioCurve::Mode::identical : RatioCurve::Mode::distinct;
    const double Pa = cache.total(Channel::first_single());
    const double Pb = cache.total(Channel::second_single());
    const double Pd = cache.total(Channel::forward(D));
    curve.P_double.push_back(Pd);
    curve.P_first_single.push_back(Pa);
    curve.P_second_single.push_back(Pb);
    curve.ratio.push_back(Pd / (Pa + Pb));
  }
  return curve;
}

/// Swaps the pulses and recomputes delta_2 from the new first pulse.
inline DoublePulseConfig exchange_order(const DoublePulseConfig& config) {
  DoublePulseConfig c = config;
  if (c.pulse_second) std::swap(c.pulse_first, *c.pulse_second);
  return c.with_phase_shifts();
}

struct OrderSumCheck {
  double P_forward = 0.0;   // P_AB
  double P_reversed = 0.0;  // P_BA
  double P_first = 0.0;     // P_A
  double P_second = 0.0;    // P_B
  /// |(P_AB + P_BA)/2 - (P_A + P_B)| / (P_A + P_B)
  double residual = 0.0;
};

inline OrderSumCheck order_sum_check(const AmplitudeCache& cache, double D) {
  OrderSumCheck r;
  r.P_forward = cache.total(Channel::forward(D));
  r.P_reversed = cache.total(Channel::reversed(D));
  r.P_first = cache.total(Channel::first_single());
  r.P_second = cache.total(Channel::second_single());
  const double sum = r.P_first + r.P_second;
  r.residual = sum > 0.0 ? std::abs(0.5 * (r.P_forward + r.P_reversed) - sum) / sum : 0.0;
  return r;
}

inline OrderSumCheck order_sum_check(const DoublePulseConfig& config, double D, const GridSpec& grid_spec,
                                     const QuadConfig& quad = {}, int threads = 0) {
  const MomentumGrid grid(grid_spec, config.gamma);
  const AmplitudeCache cache(config, grid, quad, threads);
  return order_sum_check(cache, D);
}

struct Extremum {
  double D = 0.0;
  double value = 0.0;
  bool maximum = false;
};

/// Interior local extrema of a uniformly sampled curve, refined by a
/// parabola through the three samples around each one.
inline std::vector<Extremum> find_extrema(const std::vector<double>& D, const std::vector<double>& R) {
  std::vector<Extremum> out;
  for (std::size_t i = 1; i + 1 < R.size(); ++i) {
    const bool is_max = R[i] > R[i - 1] && R[i] >= R[i + 1];
    const bool is_min = R[i] < R[i - 1] && R[i] <= R[i + 1];
    if (!is_max && !is_min) continue;
    const double h = D[i + 1] - D[i];
    const double denom = R[i - 1] - 2.0 * R[i] + R[i + 1];
    double shift = denom != 0.0 ? 0.5 * (R[i - 1] - R[i + 1]) / denom : 0.0;
    shift = std::clamp(shift, -1.0, 1.0);
    const double value = R[i] - 0.25 * (R[i - 1] - R[i + 1]) * shift;
    out.push_back({D[i] + shift * h, value, is_max});
  }
  return out;
}

/// e A_x(x^-) of the combined field, with each pulse on its own support.
inline double combined_potential(const PulseField& first, const std::optional<PulseField>& second, double gap_D,
                                 double x_minus) {
  const auto one = [](const PulseField& f, double phase) {
    return (phase >= 0.0 && phase <= two_pi) ? f.charge_amplitude() * f.shape(phase) : 0.0;
  };
  double a = one(first, first.k0() * x_minus);
  if (second) a += one(*second, second->k0() * (x_minus - first.length() - gap_D));
  return a;
}

}  // namespace bwdelay
