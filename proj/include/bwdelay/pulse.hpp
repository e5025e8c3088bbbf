#pragma once

// Pulse shapes, amplitude normalization and Volkov phase accumulators.
//
// Each pulse has the field shape f'(Phi) = sin^2(Phi/2) sin(N Phi + chi) on
// Phi in [0, 2 pi]; the potential shape f is its antiderivative with
// f(0) = 0. The phase variable of pulse j is Phi = k0 x^- - delta, with
// k0 = omega / N, so the pulse occupies a length L = 2 pi N / omega.

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <sstream>
#include <vector>

#include "bwdelay/constants.hpp"
#include "bwdelay/errors.hpp"
#include "bwdelay/kinematics.hpp"
#include "bwdelay/quadrature.hpp"

namespace bwdelay {

struct PulseSpec {
  double xi = 0.1;      // field-strength parameter
  double omega = 1.01;  // central frequency
  int n_cycles = 4;
  double cep = 0.0;     // carrier-envelope phase [rad]
  double delta = 0.0;   // phase shift of the pulse front [rad]

  friend bool operator==(const PulseSpec&, const PulseSpec&) = default;

  double k0() const { return omega / n_cycles; }
  double length() const { return two_pi * n_cycles / omega; }

  /// Throws ValidationError naming the first violated field.
  void validate(const std::string& prefix = "pulse") const {
    if (!(xi >= 0.0) || !std::isfinite(xi)) throw ValidationError(prefix + ".xi", "must be finite and >= 0");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw ValidationError(prefix + ".omega", "must be finite and > 0");
    if (n_cycles < 1) throw ValidationError(prefix + ".cycles", "must be >= 1");
    if (!std::isfinite(cep)) throw ValidationError(prefix + ".cep", "must be finite");
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ValidationError(prefix + ".delta", "must be finite and >= 0");
  }

  /// Same pulse up to its position in time; F_j does not depend on delta.
  bool same_shape(const PulseSpec& o) const {
    return xi == o.xi && omega == o.omega && n_cycles == o.n_cycles && cep == o.cep;
  }
};

inline double shape_derivative(double Phi, const PulseSpec& spec) {
  const double s = std::sin(0.5 * Phi);
  return s * s * std::sin(spec.n_cycles * Phi + spec.cep);
}

namespace detail {

// Integral of sin(m t + chi) over [0, Phi].
inline double sine_integral(int m, double Phi, double chi) {
  if (m == 0) return Phi * std::sin(chi);
  return (std::cos(chi) - std::cos(m * Phi + chi)) / m;
}

}  // namespace detail

/// Potential shape f(Phi) = integral of f' from 0 to Phi, in closed form
/// from sin^2(Phi/2) = (1 - cos Phi) / 2.
inline double shape(double Phi, const PulseSpec& spec) {
  const int n = spec.n_cycles;
  const double chi = spec.cep;
  return 0.5 * detail::sine_integral(n, Phi, chi) - 0.25 * detail::sine_integral(n + 1, Phi, chi) -
         0.25 * detail::sine_integral(n - 1, Phi, chi);
}

struct VolkovCoefficients {
  double h1 = 0.0;
  double h2 = 0.0;
};

/// A pulse with its amplitude normalized from xi and its shape integrals
/// tabulated. Immutable after construction.
class PulseField {
 public:
  static constexpr int table_intervals = 8192;
  static constexpr int max_scan_points = 65536;

  explicit PulseField(const PulseSpec& spec) : spec_(spec) {
    spec_.validate();
    k0_ = spec_.k0();
    length_ = spec_.length();
    build_tables();
    locate_maximum();
    if (spec_.xi > 0.0) {
      if (!(f_max_ > 1e-300)) {
        std::ostringstream os;
        os << "shape vanishes identically for N=" << spec_.n_cycles << ", cep=" << spec_.cep;
        throw DegenerateShape(os.str());
      }
      ea_ = spec_.xi / f_max_;
    }
  }

  const PulseSpec& spec() const { return spec_; }
  double k0() const { return k0_; }
  double length() const { return length_; }
  /// e * a, the combination entering every field term.
  double charge_amplitude() const { return ea_; }
  /// Amplitude a itself, with e = sqrt(alpha).
  double amplitude() const { return ea_ / positron_charge; }
  double f_max() const { return f_max_; }
  double mean_f() const { return cum_f_.back() / two_pi; }
  double mean_f2() const { return cum_f2_.back() / two_pi; }
  double abs_f_integral() const { return abs_f_integral_; }

  double shape(double Phi) const { return bwdelay::shape(Phi, spec_); }
  double shape_derivative(double Phi) const { return bwdelay::shape_derivative(Phi, spec_); }

  struct Cumulative {
    double f = 0.0;   // integral of f over [0, Phi]
    double f2 = 0.0;  // integral of f^2 over [0, Phi]
  };

  /// Cubic Hermite interpolation of the tabulated antiderivatives.
  Cumulative cumulative(double Phi) const {
    if (Phi <= 0.0) return {};
    if (Phi >= two_pi) return {cum_f_.back(), cum_f2_.back()};
    const double h = two_pi / table_intervals;
    const double u = Phi / h;
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= static_cast<std::size_t>(table_intervals)) i = table_intervals - 1;
    const double t = u - static_cast<double>(i);
    const double fi = node_f_[i];
    const double fj = node_f_[i + 1];
    return {hermite(cum_f_[i], cum_f_[i + 1], h * fi, h * fj, t),
            hermite(cum_f2_[i], cum_f2_[i + 1], h * fi * fi, h * fj * fj, t)};
  }

 private:
  static double hermite(double y0, double y1, double d0, double d1, double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * d1;
  }

  void build_tables() {
    const int n = table_intervals;
    const double h = two_pi / n;
    static const QuadratureRule cell = gauss_legendre(8, 0.0, 1.0);
    node_f_.resize(n + 1);
    cum_f_.assign(n + 1, 0.0);
    cum_f2_.assign(n + 1, 0.0);
    abs_f_integral_ = 0.0;
    for (int i = 0; i <= n; ++i) node_f_[i] = shape(h * i);
    for (int i = 0; i < n; ++i) {
      double s1 = 0.0, s2 = 0.0, sa = 0.0;
      for (std::size_t q = 0; q < cell.size(); ++q) {
        const double v = shape(h * (i + cell.nodes[q]));
        s1 += cell.weights[q] * v;
        s2 += cell.weights[q] * v * v;
        sa += cell.weights[q] * std::abs(v);
      }
      cum_f_[i + 1] = cum_f_[i] + h * s1;
      cum_f2_[i + 1] = cum_f2_[i] + h * s2;
      abs_f_integral_ += h * sa;
    }
  }

  void locate_maximum() {
    const int n = max_scan_points;
    const double h = two_pi / n;
    int best = 0;
    double best_val = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double v = std::abs(shape(h * i));
      if (v > best_val) {
        best_val = v;
        best = i;
      }
    }
    f_max_ = best_val;
    if (best_val == 0.0) return;
    const double lo = std::max(0.0, h * (best - 1));
    const double hi = std::min(two_pi, h * (best + 1));
    const auto neg_abs = [this](double x) { return -std::abs(shape(x)); };
    const auto r = boost::math::tools::brent_find_minima(neg_abs, lo, hi, std::numeric_limits<double>::digits / 2);
    f_max_ = std::max(best_val, -r.second);
  }

  PulseSpec spec_;
  double k0_ = 0.0;
  double length_ = 0.0;
  double ea_ = 0.0;
  double f_max_ = 0.0;
  double abs_f_integral_ = 0.0;
  std::vector<double> node_f_;
  std::vector<double> cum_f_;
  std::vector<double> cum_f2_;
};

inline PulseField normalize_amplitude(const PulseSpec& spec) { return PulseField(spec); }

/// Collinear-singularity guard on k.p_+- in units of m.
inline constexpr double collinear_epsilon = 1e-8;

inline VolkovCoefficients volkov_coefficients(const PairKinematics& pair, const PulseField& field,
                                              const Vec3& polarization = laser_polarization) {
  const double kp_pos = laser_dot(field.k0(), pair.positron);
  const double kp_ele = laser_dot(field.k0(), pair.electron);
  if (kp_pos < collinear_epsilon || kp_ele < collinear_epsilon) {
    std::ostringstream os;
    os << "k.p+ = " << kp_pos << ", k.p- = " << kp_ele;
    throw CollinearSingularity(os.str());
  }
  const double ea = field.charge_amplitude();
  VolkovCoefficients c;
  c.h1 = -ea * (polarization_dot(polarization, pair.positron) / kp_pos -
                polarization_dot(polarization, pair.electron) / kp_ele);
  c.h2 = -0.5 * ea * ea * (1.0 / kp_pos + 1.0 / kp_ele);
  return c;
}

/// H(Phi) = h1 * int_0^Phi f + h2 * int_0^Phi f^2.
inline double volkov_phase(double Phi, const VolkovCoefficients& c, const PulseField& field) {
  const auto cum = field.cumulative(Phi);
  return c.h1 * cum.f + c.h2 * cum.f2;
}

/// dH/dPhi = h1 f + h2 f^2.
inline double volkov_phase_rate(double Phi, const VolkovCoefficients& c, const PulseField& field) {
  const double f = field.shape(Phi);
  return c.h1 * f + c.h2 * f * f;
}

/// H* = H(2 pi), the phase accumulated across the whole pulse.
inline double volkov_phase_total(const VolkovCoefficients& c, const PulseField& field) {
  return two_pi * (c.h1 * field.mean_f() + c.h2 * field.mean_f2());
}

}  // namespace bwdelay
