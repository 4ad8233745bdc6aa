#pragma once

#include <numbers>

namespace granoise::constants {

// CODATA 2018 exact / recommended values, SI units.
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double planck = 6.62607015e-34;      // J s
inline constexpr double speed_of_light = 299792458.0; // m/s
inline constexpr double boltzmann = 1.380649e-23;     // J/K
inline constexpr double epsilon0 = 8.8541878128e-12;  // F/m
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double bohr_radius = 5.29177210903e-11;
inline constexpr double atomic_mass_unit = 1.66053906660e-27;

inline constexpr double cs133_mass = 132.905451961 * atomic_mass_unit;

}  // namespace granoise::constants
