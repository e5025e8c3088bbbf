#pragma once

// Four-momentum bookkeeping in light-cone coordinates.
//
// Frame: the laser propagates along +z and is polarized along +x; the gamma
// quantum moves along -z (head-on). With x^- = t - z every laser phase is
// k0 * x^-, and for any four-vector
//   p^- = E - p_par,   p^+ = (E + p_par) / 2,
//   a.b = a^+ b^- + a^- b^+ - a_perp . b_perp.

#include <array>
#include <cmath>
#include <optional>
#include <sstream>

#include "bwdelay/constants.hpp"
#include "bwdelay/errors.hpp"

namespace bwdelay {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
  constexpr double norm2() const { return x * x + y * y; }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct LightConeMomentum {
  double E = 0.0;
  Vec2 p_perp;
  double p_par = 0.0;
  double p_minus = 0.0;
  double p_plus = 0.0;

  Vec3 spatial() const { return {p_perp.x, p_perp.y, p_par}; }
  double momentum() const { return spatial().norm(); }
};

inline LightConeMomentum lightcone_decompose(double E, Vec2 p_perp, double p_par) {
  return {E, p_perp, p_par, E - p_par, 0.5 * (E + p_par)};
}

/// On-shell particle of the given mass from its light-cone components.
inline LightConeMomentum from_lightcone(double p_minus, Vec2 p_perp, double mass = electron_mass) {
  const double p_plus = (mass * mass + p_perp.norm2()) / (2.0 * p_minus);
  return {p_plus + 0.5 * p_minus, p_perp, p_plus - 0.5 * p_minus, p_minus, p_plus};
}

/// On-shell lepton with |p| = p, polar angle theta from +z and azimuth phi.
inline LightConeMomentum lepton_from_spherical(double p, double theta, double phi) {
  const double st = std::sin(theta);
  return lightcone_decompose(std::sqrt(electron_mass * electron_mass + p * p),
                             {p * st * std::cos(phi), p * st * std::sin(phi)}, p * std::cos(theta));
}

inline double minkowski_dot(const LightConeMomentum& a, const LightConeMomentum& b) {
  return a.E * b.E - a.p_perp.x * b.p_perp.x - a.p_perp.y * b.p_perp.y - a.p_par * b.p_par;
}

/// Same product evaluated through the light-cone components.
inline double lightcone_dot(const LightConeMomentum& a, const LightConeMomentum& b) {
  return a.p_plus * b.p_minus + a.p_minus * b.p_plus - a.p_perp.x * b.p_perp.x - a.p_perp.y * b.p_perp.y;
}

/// Minkowski product of a purely spatial polarization (0, eps) with p.
inline double polarization_dot(const Vec3& eps, const LightConeMomentum& p) {
  return -(eps.x * p.p_perp.x + eps.y * p.p_perp.y + eps.z * p.p_par);
}

/// Minkowski product of two purely spatial polarization four-vectors.
inline double polarization_dot(const Vec3& a, const Vec3& b) { return -a.dot(b); }

/// k.p for a laser photon k = k0 (1, 0, 0, 1).
inline double laser_dot(double k0, const LightConeMomentum& p) { return k0 * p.p_minus; }

inline constexpr Vec3 laser_polarization{1.0, 0.0, 0.0};

/// High-energy photon colliding head-on with the laser.
struct GammaProbe {
  double omega_gamma = 1.01;

  friend bool operator==(const GammaProbe&, const GammaProbe&) = default;

  LightConeMomentum momentum() const { return lightcone_decompose(omega_gamma, {}, -omega_gamma); }
  double k_minus() const { return 2.0 * omega_gamma; }

  /// Real orthonormal basis transverse to k_gamma, indexed by lambda_gamma.
  static constexpr std::array<Vec3, 2> polarization_basis{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}};
};

/// A (positron, electron) pair on the conservation shell Q^- = 0, Q_perp = 0.
struct PairKinematics {
  LightConeMomentum positron;
  LightConeMomentum electron;
  double Q0 = 0.0;  // energy component of Q = k_gamma - p_+ - p_-
  double E0 = 0.0;  // -Q0, energy required without dressing

  double Q_plus(const GammaProbe& gamma) const {
    return gamma.momentum().p_plus - positron.p_plus - electron.p_plus;
  }
};

/// Non-throwing partner resolution for grid sweeps; nullopt when p_+^- >= k_gamma^-.
inline std::optional<PairKinematics> try_solve_partner(const LightConeMomentum& positron, const GammaProbe& gamma) {
  const double minus = gamma.k_minus() - positron.p_minus;
  if (!(minus > 0.0)) return std::nullopt;
  PairKinematics pair;
  pair.positron = positron;
  pair.electron = from_lightcone(minus, -positron.p_perp);
  pair.Q0 = gamma.omega_gamma - positron.E - pair.electron.E;
  pair.E0 = -pair.Q0;
  return pair;
}

inline PairKinematics solve_partner(const LightConeMomentum& positron, const GammaProbe& gamma) {
  if (auto pair = try_solve_partner(positron, gamma)) return *pair;
  std::ostringstream os;
  os << "positron p^- = " << positron.p_minus << " >= k_gamma^- = " << gamma.k_minus();
  throw PhaseSpaceClosed(os.str());
}

/// Largest polar angle with open phase space at |p_+| = p, i.e. p_+^- < k_gamma^-.
inline double max_open_polar_angle(double p, const GammaProbe& gamma) {
  if (p <= 0.0) return pi;
  const double E = std::sqrt(electron_mass * electron_mass + p * p);
  const double c = (E - gamma.k_minus()) / p;
  if (c <= -1.0) return pi;
  if (c >= 1.0) return 0.0;
  return std::acos(c);
}

}  // namespace bwdelay
