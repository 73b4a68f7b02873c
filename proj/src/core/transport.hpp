#pragma once

#include "core/assembly.hpp"

namespace gfet {

// B(x) = x / (e^x - 1) with a series branch near 0; B(0) = 1.
double bernoulli(double x);

// Boltzmann equilibrium law rho = N_plus * exp(u / U_T), nodal.
// Throws SolverError when |u|/U_T exceeds 500 (diverged coupling).
Vec equilibrium_density(const Vec& u_gamma, double N_plus, double U_T);

// Exponentially fitted flux discretization of J' = 0 with
// J = q mu (U_T rho' - rho u') and Dirichlet density boundary values.
// The assembled rows enforce equal flux on neighboring intervals; the matrix
// is an M-matrix, so positive boundary densities give positive solutions.
struct SgSystem {
  SpMat M;
  Vec rhs;
  // tridiagonal coefficients: diag > 0, sub/super <= 0 (M-matrix)
  Vec diag, sub, super;
  // data the Slotboom-form solve needs
  Vec u_gamma;
  std::vector<double> spacings;
  double U_T = 0, bc_left = 0, bc_right = 0;
};

SgSystem assemble_sg_system(const InterfaceGrid& grid, const Vec& u_gamma, double U_T,
                            double bc_left, double bc_right);

// Solves the assembled system through its exact Slotboom reformulation
// (w = rho exp(-u/U_T) satisfies a pure resistive chain): the solution is a
// monotone interpolation between the positive boundary values, so positivity
// holds in floating point even for huge potential swings.
Vec solve_sg_system(const SgSystem& sys);

struct DdResult {
  Vec rho;             // nodal density, m^-2
  double J;            // SG flux, A/m (electron convention: negative for V_DS > 0)
  double J_constancy;  // max relative spread of interval fluxes
};

// Per-interval SG fluxes (A/m) for a given density/potential pair.
Vec sg_fluxes(const InterfaceGrid& grid, const Vec& rho, const Vec& u_gamma,
              double U_T, double mu);

DdResult solve_dd(const InterfaceGrid& grid, const Vec& u_gamma, const DeviceConfig& cfg);

}  // namespace gfet
