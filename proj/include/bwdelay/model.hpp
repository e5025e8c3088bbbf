#pragma once

// Gaussian interference model:
//   R(D) ~ 1 + exp(-(dE_L (L + D) / 2)^2) cos(<E_L> (L + D)),
// with <E_L> and dE_L the mean and width of the laser-dressed energy
// E_L = -(Q0 + k0 sum_l h_l <f^l>) under the single-pulse density rho(p_+).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "bwdelay/probability.hpp"
#include "bwdelay/sweep.hpp"

namespace bwdelay {

struct EnergyHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> weights;  // probability per bin

  double bin_width() const { return weights.empty() ? 0.0 : (hi - lo) / static_cast<double>(weights.size()); }
  double center(std::size_t i) const { return lo + (static_cast<double>(i) + 0.5) * bin_width(); }
  double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
};

struct DressedEnergyStats {
  double mean_EL = 0.0;
  double width_EL = 0.0;
  double total_weight = 0.0;     // P_single
  double overflow_weight = 0.0;  // weight above the histogram range
  EnergyHistogram histogram;
};

inline constexpr int dressed_energy_bins = 200;
/// Upper histogram edge as a quantile of the rho-weighted E_L distribution.
inline constexpr double dressed_energy_upper_quantile = 0.999999;

struct WeightedEnergy {
  double energy = 0.0;
  double weight = 0.0;
};

/// Moments and histogram of a weighted sample of dressed energies.
inline DressedEnergyStats dressed_energy_stats(std::vector<WeightedEnergy> samples, int bins = dressed_energy_bins) {
  std::erase_if(samples, [](const WeightedEnergy& s) { return !(s.weight > 0.0); });
  DressedEnergyStats st;
  if (samples.empty()) return st;
  double w = 0.0, m = 0.0;
  for (const auto& s : samples) {
    w += s.weight;
    m += s.weight * s.energy;
  }
  m /= w;
  double var = 0.0;
  for (const auto& s : samples) var += s.weight * (s.energy - m) * (s.energy - m);
  st.mean_EL = m;
  st.width_EL = std::sqrt(var / w);
  st.total_weight = w;

  std::sort(samples.begin(), samples.end(),
            [](const WeightedEnergy& a, const WeightedEnergy& b) { return a.energy < b.energy; });
  double acc = 0.0;
  double hi = samples.back().energy;
  for (const auto& s : samples) {
    acc += s.weight;
    if (acc >= dressed_energy_upper_quantile * w) {
      hi = s.energy;
      break;
    }
  }
  const double lo = samples.front().energy;
  if (!(hi > lo)) hi = lo + 1e-12;
  st.histogram.lo = lo;
  st.histogram.hi = hi;
  st.histogram.weights.assign(bins, 0.0);
  const double width = (hi - lo) / bins;
  for (const auto& s : samples) {
    if (s.energy > hi) {
      st.overflow_weight += s.weight;
      continue;
    }
    auto b = static_cast<std::size_t>((s.energy - lo) / width);
    st.histogram.weights[std::min<std::size_t>(b, bins - 1)] += s.weight;
  }
  return st;
}

/// Statistics of E_L for the first pulse of the cache alone.
inline DressedEnergyStats dressed_energy_stats(const AmplitudeCache& cache, int bins = dressed_energy_bins) {
  std::vector<WeightedEnergy> samples;
  samples.reserve(cache.nodes().size());
  for (const CachedNode& n : cache.nodes()) {
    if (n.measure == 0.0) continue;
    samples.push_back({cache.dressed_energy(n), n.measure * cache.intensity(n, Channel::first_single())});
  }
  return dressed_energy_stats(std::move(samples), bins);
}

inline double gaussian_model_envelope(const DressedEnergyStats& stats, double L, double D) {
  const double x = 0.5 * stats.width_EL * (L + D);
  return std::exp(-x * x);
}

inline RatioCurve gaussian_ratio_model(const DressedEnergyStats& stats, double L, const std::vector<double>& D_list) {
  if (!(L > 0.0)) throw ValidationError("L", "pulse length must be > 0");
  RatioCurve c;
  c.mode = RatioCurve::Mode::model;
  c.D_values = D_list;
  c.ratio.reserve(D_list.size());
  for (double D : D_list)
    c.ratio.push_back(1.0 + gaussian_model_envelope(stats, L, D) * std::cos(stats.mean_EL * (L + D)));
  return c;
}

}  // namespace bwdelay
