// constants.hpp — Physical constants (CODATA 2018) and unit conversions

#pragma once

namespace surfnoise::constants {

inline constexpr double c_light = 299792458.0;           // m/s (exact)
inline constexpr double planck_h = 6.62607015e-34;       // J s (exact)
inline constexpr double hbar = 1.054571817e-34;          // J s
inline constexpr double k_boltzmann = 1.380649e-23;      // J/K (exact)
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double epsilon0 = 8.8541878128e-12;     // F/m
inline constexpr double coulomb = 8.9875517873681764e9;  // 1/(4 pi eps0), N m^2/C^2
inline constexpr double debye = 3.33564e-30;             // C m per debye
inline constexpr double atomic_mass = 1.66053906660e-27; // kg
inline constexpr double pi = 3.14159265358979323846;

} // namespace surfnoise::constants
