#include "core/transport.hpp"

#include <cmath>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace gfet {

double bernoulli(double x) {
  const double ax = std::abs(x);
  if (ax < 1e-4) {
    // x/(e^x-1) = 1 - x/2 + x^2/12 - x^4/720 + O(x^6)
    const double x2 = x * x;
    return 1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0;
  }
  if (x > 0 && x > 700.0) return x * std::exp(-x);  // e^x overflows; B -> x e^-x
  if (x < 0 && x < -700.0) return -x;               // B(-|x|) -> |x|
  return x / std::expm1(x);
}

Vec equilibrium_density(const Vec& u_gamma, double N_plus, double U_T) {
  if (!(U_T > 0)) throw SolverError("equilibrium_density: U_T must be positive");
  Vec rho(u_gamma.size());
  for (int i = 0; i < u_gamma.size(); ++i) {
    const double t = u_gamma[i] / U_T;
    if (std::abs(t) > 500.0)
      throw SolverError("equilibrium_density: |u|/U_T > 500, coupling diverged");
    rho[i] = N_plus * std::exp(t);
  }
  return rho;
}

SgSystem assemble_sg_system(const InterfaceGrid& grid, const Vec& u_gamma, double U_T,
                            double bc_left, double bc_right) {
  const int n = grid.node_count();
  if (u_gamma.size() != n)
    throw AssemblyError("assemble_sg_system: potential nodal size mismatch");

  // Flux on interval j: J_j = (c_plus_j * rho_{j+1} - c_minus_j * rho_j),
  // with c_plus = B(delta)/h, c_minus = B(-delta)/h, delta = (u_{j+1}-u_j)/U_T.
  std::vector<double> cp(grid.intervals()), cm(grid.intervals());
  for (int j = 0; j < grid.intervals(); ++j) {
    const double delta = (u_gamma[j + 1] - u_gamma[j]) / U_T;
    const double h = grid.spacing(j);
    cp[j] = bernoulli(delta) / h;
    cm[j] = bernoulli(-delta) / h;
  }

  SgSystem sys;
  sys.u_gamma = u_gamma;
  sys.spacings.resize(grid.intervals());
  for (int j = 0; j < grid.intervals(); ++j) sys.spacings[j] = grid.spacing(j);
  sys.U_T = U_T;
  sys.bc_left = bc_left;
  sys.bc_right = bc_right;
  sys.diag = Vec::Zero(n);
  sys.sub = Vec::Zero(n);    // sub[j] multiplies rho_{j-1} in row j
  sys.super = Vec::Zero(n);  // super[j] multiplies rho_{j+1} in row j
  sys.rhs = Vec::Zero(n);
  sys.diag[0] = 1.0;
  sys.rhs[0] = bc_left;
  for (int j = 1; j < n - 1; ++j) {
    // -(J_j - J_{j-1}) = 0, written with positive diagonal
    sys.sub[j] = -cm[j - 1];
    sys.diag[j] = cm[j] + cp[j - 1];
    sys.super[j] = -cp[j];
  }
  sys.diag[n - 1] = 1.0;
  sys.rhs[n - 1] = bc_right;

  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < n; ++j) {
    trips.emplace_back(j, j, sys.diag[j]);
    if (j > 0 && sys.sub[j] != 0.0) trips.emplace_back(j, j - 1, sys.sub[j]);
    if (j + 1 < n && sys.super[j] != 0.0) trips.emplace_back(j, j + 1, sys.super[j]);
  }
  sys.M.resize(n, n);
  sys.M.setFromTriplets(trips.begin(), trips.end());
  sys.M.makeCompressed();
  return sys;
}

Vec solve_sg_system(const SgSystem& sys) {
  // Interval conductance g_j = B(-delta_j) e^{(u_j - u_ref)/U_T} / h_j turns
  // flux conservation into g_j (w_{j+1} - w_j) = const with w = rho e^{-u/U_T}.
  const int n = static_cast<int>(sys.u_gamma.size());
  const double u_ref = 0.5 * (sys.u_gamma.maxCoeff() + sys.u_gamma.minCoeff());
  Vec resistance(n - 1);
  for (int j = 0; j < n - 1; ++j) {
    const double delta = (sys.u_gamma[j + 1] - sys.u_gamma[j]) / sys.U_T;
    const double g = bernoulli(-delta) * std::exp((sys.u_gamma[j] - u_ref) / sys.U_T) /
                     sys.spacings[j];
    if (!(g > 0.0) || !std::isfinite(g))
      throw SolverError("solve_sg_system: non-finite interval conductance");
    resistance[j] = 1.0 / g;
  }
  const double w0 = sys.bc_left * std::exp(-(sys.u_gamma[0] - u_ref) / sys.U_T);
  const double wn = sys.bc_right * std::exp(-(sys.u_gamma[n - 1] - u_ref) / sys.U_T);
  // the same sequential accumulation as the partial sums below, so t <= 1
  double total = 0;
  for (int j = 0; j < n - 1; ++j) total += resistance[j];

  Vec rho(n);
  double partial = 0;
  for (int j = 0; j < n; ++j) {
    const double t = (j == 0) ? 0.0 : std::min(partial / total, 1.0);
    const double w = w0 * (1.0 - t) + wn * t;  // nonnegative terms only
    rho[j] = w * std::exp((sys.u_gamma[j] - u_ref) / sys.U_T);
    if (j < n - 1) partial += resistance[j];
  }
  return rho;
}

Vec sg_fluxes(const InterfaceGrid& grid, const Vec& rho, const Vec& u_gamma,
              double U_T, double mu) {
  // J = q mu U_T / h * (B(delta) rho_{j+1} - B(-delta) rho_j); h in m.
  Vec fluxes(grid.intervals());
  const double q = constants::elementary_charge;
  for (int j = 0; j < grid.intervals(); ++j) {
    const double delta = (u_gamma[j + 1] - u_gamma[j]) / U_T;
    const double h_m = grid.spacing(j) * constants::nanometer;
    fluxes[j] = q * mu * U_T / h_m *
                (bernoulli(delta) * rho[j + 1] - bernoulli(-delta) * rho[j]);
  }
  return fluxes;
}

DdResult solve_dd(const InterfaceGrid& grid, const Vec& u_gamma, const DeviceConfig& cfg) {
  const double U_T = cfg.thermal_voltage();
  SgSystem sys = assemble_sg_system(grid, u_gamma, U_T, cfg.N_plus, cfg.N_plus);

  DdResult out;
  out.rho = solve_sg_system(sys);
  for (int i = 0; i < out.rho.size(); ++i) {
    if (!(out.rho[i] > 0))
      throw SolverError("solve_dd: non-positive density (internal error, M-matrix violated)");
  }

  const Vec fluxes = sg_fluxes(grid, out.rho, u_gamma, U_T, cfg.mu);
  out.J = fluxes.mean();
  // Constancy relative to the (positive) flux term magnitudes, so the measure
  // stays meaningful at equilibrium where the terms cancel to rounding.
  double term_scale = 0.0;
  const double q = constants::elementary_charge;
  for (int j = 0; j < grid.intervals(); ++j) {
    const double delta = (u_gamma[j + 1] - u_gamma[j]) / U_T;
    const double h_m = grid.spacing(j) * constants::nanometer;
    term_scale = std::max(term_scale,
                          q * cfg.mu * U_T / h_m *
                              (bernoulli(delta) * out.rho[j + 1] + bernoulli(-delta) * out.rho[j]));
  }
  out.J_constancy = (fluxes.maxCoeff() - fluxes.minCoeff()) / std::max(term_scale, 1e-300);
  if (!(out.J_constancy <= 1e-8))
    throw SolverError("solve_dd: SG flux not constant across intervals");
  return out;
}

}  // namespace gfet
