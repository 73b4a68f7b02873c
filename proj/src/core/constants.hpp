#pragma once

namespace gfet::constants {

// SI defining constants (2019 redefinition) plus the CODATA vacuum permittivity.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double boltzmann = 1.380649e-23;             // J/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double nanometer = 1.0e-9;                   // m

// Source scale of the nondimensionalized Poisson problem.
// Geometry is kept in nm and permittivities in multiples of eps0, so a surface
// density N (m^-2) enters the interface load as source_scale()*N volts.
inline constexpr double source_scale() {
  return elementary_charge * nanometer / vacuum_permittivity;  // V m^2
}

inline constexpr double thermal_voltage(double temperature_K) {
  return boltzmann * temperature_K / elementary_charge;  // V
}

}  // namespace gfet::constants
