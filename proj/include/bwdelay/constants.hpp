#pragma once

#include <cmath>
#include <numbers>

// Natural units: hbar = c = m = 1. Lengths are in units of the reduced
// Compton wavelength, energies and momenta in units of the electron mass.
namespace bwdelay {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double fine_structure = 1.0 / 137.035999;
// Positron charge in Gaussian units, e^2 = alpha.
inline const double positron_charge = std::sqrt(fine_structure);

inline constexpr double electron_mass = 1.0;

}  // namespace bwdelay
