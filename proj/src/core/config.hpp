#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/constants.hpp"

namespace gfet {

enum class CouplingMode { Dirichlet, Robin };

// All physical / geometric parameters of the device plus solver settings.
// Units: lengths nm, potentials V, permittivities multiples of eps0,
// densities m^-2, mobility m^2 V^-1 s^-1 (the config file accepts cm^2/Vs).
// Defaults are the GFET of the numerical experiments.
struct DeviceConfig {
  // geometry
  double L = 60.0;       // longitudinal length
  double l = 4.0;        // transversal length
  double d = 0.2;        // effective dielectric thickness
  double x_G = 10.0;     // gate inset from both ends

  // permittivities (eps0)
  double eps_ox = 3.9;
  double eps_par = 13.9;
  double eps_perp = 6.9;

  // doping
  double N_plus = 1.0e17;
  double N_minus = 1.0e14;
  double x_j1 = 20.0;    // junction positions, nm
  double x_j2 = 40.0;

  // transport
  double T = 77.0;       // K
  double mu = 0.45;      // m^2/(V s); config key `mu` is cm^2/Vs

  // contacts
  double V_S = 0.0;
  double V_D = 0.0;
  double V_G = 0.0;

  CouplingMode coupling_mode = CouplingMode::Dirichlet;
  double smoothing_a = 0.008;  // transmission-solver Gaussian width, nm

  // discretization
  int Nx = 60;
  int Ny = 16;
  int N_gamma = 240;
  int trans_Nx = 960;        // transmission reference mesh, x cells
  int trans_Ny_outer = 16;   // controls the coarsest y spacing l/(2*trans_Ny_outer)
  int trans_y_refine = 1;    // divides every strip-mesh y spacing (refinement studies)

  // gummel
  double gummel_tol = 1.0e-9;  // V, sup norm
  int gummel_max_iter = 200;

  // sweep
  double dV_step = 0.01;
  double V_max = 0.1;

  // solver path for self-consistent runs
  enum class Path { Schur, Monolithic };
  Path solver_path = Path::Schur;

  // derived quantities
  double robin_alpha() const { return d / (2.0 * eps_perp); }  // nm/eps0 units
  double thermal_voltage() const { return constants::thermal_voltage(T); }
  double doping_at(double x) const {
    return (x > x_j1 && x < x_j2) ? N_minus : N_plus;
  }

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  // Canonical (key, value) list of the resolved configuration, suitable for
  // echoing into CSV headers and re-parsing. Mobility is echoed in cm^2/Vs.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

// Parses INI-style text: sections [device], [solver], [sweep], '#' comments,
// key = value lines. Unknown keys or malformed lines raise ConfigError with
// the line number. Missing keys keep the defaults above.
DeviceConfig parse_config(const std::string& text);
DeviceConfig parse_config_file(const std::string& path);

// Applies a single key=value override (same keys as the file format).
void apply_override(DeviceConfig& cfg, const std::string& key, const std::string& value);

// Reads one key back in its config-file representation.
std::string config_get(const DeviceConfig& cfg, const std::string& key);

}  // namespace gfet
