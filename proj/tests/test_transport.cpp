#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "core/constants.hpp"
#include "core/errors.hpp"
#include "core/transport.hpp"

using namespace gfet;

namespace {

InterfaceGrid uniform_grid(double length, int n) {
  InterfaceGrid g;
  for (int i = 0; i <= n; ++i) g.nodes.push_back(length * i / n);
  return g;
}

constexpr double q = constants::elementary_charge;

}  // namespace

TEST_CASE("bernoulli function: removable singularity, identity, reference value") {
  CHECK(bernoulli(0.0) == 1.0);
  CHECK(bernoulli(1.0) == doctest::Approx(1.0 / (std::exp(1.0) - 1.0)).epsilon(1e-14));
  CHECK(bernoulli(1.0) == doctest::Approx(0.581977).epsilon(1e-6));
  for (double x : {1e-9, 1e-6, 5e-5, 1e-4, 2e-4, 0.5, 5.0, 50.0}) {
    CHECK(bernoulli(-x) - bernoulli(x) == doctest::Approx(x).epsilon(1e-14));
  }
  // continuity across the series/expm1 switch
  CHECK(bernoulli(1e-4 * (1 - 1e-12)) == doctest::Approx(bernoulli(1e-4 * (1 + 1e-12))).epsilon(1e-12));
}

TEST_CASE("equilibrium density law and its overflow guard") {
  const double U_T = 6.635347e-3;
  const double Np = 1e17, Nm = 1e14;
  Vec u = Vec::Zero(5);
  Vec rho = equilibrium_density(u, Np, U_T);
  for (int i = 0; i < 5; ++i) CHECK(rho[i] == Np);

  u.setConstant(U_T * std::log(Nm / Np));
  rho = equilibrium_density(u, Np, U_T);
  for (int i = 0; i < 5; ++i) CHECK(rho[i] == doctest::Approx(Nm).epsilon(1e-12));

  u.setConstant(501.0 * U_T);
  CHECK_THROWS_AS(equilibrium_density(u, Np, U_T), SolverError);
}

TEST_CASE("constant potential reduces the SG scheme to linear interpolation") {
  DeviceConfig cfg;
  cfg.N_plus = 1e17;
  const InterfaceGrid g = uniform_grid(60.0, 12);
  const Vec u = Vec::Constant(13, 0.02);
  const DdResult dd = solve_dd(g, u, cfg);
  // equal Dirichlet values + zero drift -> rho is the constant interpolant
  for (int i = 0; i <= 12; ++i) CHECK(dd.rho[i] == doctest::Approx(cfg.N_plus).epsilon(1e-12));

  // genuine interpolation with unequal BCs through the raw system
  const SgSystem sys = assemble_sg_system(g, Vec::Zero(13), cfg.thermal_voltage(), 1.0, 3.0);
  const Vec rho = solve_sg_system(sys);
  for (int i = 0; i <= 12; ++i)
    CHECK(rho[i] == doctest::Approx(1.0 + 2.0 * i / 12.0).epsilon(1e-12));
}

TEST_CASE("SG flux vanishes identically on Boltzmann equilibria") {
  DeviceConfig cfg;
  const double U_T = cfg.thermal_voltage();
  const InterfaceGrid g = uniform_grid(60.0, 48);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> du(-20.0 * U_T, 5.0 * U_T);
  Vec u(g.node_count());
  for (int i = 0; i < u.size(); ++i) u[i] = du(rng);
  u[0] = u[g.node_count() - 1] = 0.0;
  const Vec rho = equilibrium_density(u, cfg.N_plus, U_T);
  const Vec fluxes = sg_fluxes(g, rho, u, U_T, cfg.mu);
  const double h_m = g.spacing(0) * constants::nanometer;
  const double scale = q * cfg.mu * U_T * cfg.N_plus / h_m;
  CHECK(fluxes.cwiseAbs().maxCoeff() <= 1e-12 * scale);
}

TEST_CASE("two-interval toy against the exact two-point boundary value solution") {
  DeviceConfig cfg;
  const double U_T = cfg.thermal_voltage();
  InterfaceGrid g;
  g.nodes = {0.0, 0.5, 1.0};
  Vec u(3);
  u << 0.0, U_T, 0.0;

  // Slotboom oracle: w = rho e^{-u/U_T}, J ~ (w(L)-w(0)) / int e^{-u/U_T} dx.
  // Equal unit BCs: w(0) = w(L) = 1 -> J = 0 and rho = e^{u/U_T}.
  {
    const SgSystem sys = assemble_sg_system(g, u, U_T, 1.0, 1.0);
    const Vec rho = solve_sg_system(sys);
    CHECK(rho[1] == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
  }

  // Unequal BCs (1, 2): the quadrature oracle gives the exact flux and the
  // midpoint density; SG is exact for piecewise-linear potentials.
  {
    const SgSystem sys = assemble_sg_system(g, u, U_T, 1.0, 2.0);
    const Vec rho = solve_sg_system(sys);

    // int_0^1 e^{-u/U_T} dx by 20000-interval Simpson quadrature (oracle)
    auto uhat = [&](double x) { return (x <= 0.5 ? 2.0 * x : 2.0 * (1.0 - x)); };
    const int nsimp = 20000;
    double integral = 0, half_integral = 0;
    for (int i = 0; i < nsimp; ++i) {
      const double a = static_cast<double>(i) / nsimp, b = static_cast<double>(i + 1) / nsimp;
      const double piece = (b - a) / 6.0 *
                           (std::exp(-uhat(a)) + 4.0 * std::exp(-uhat(0.5 * (a + b))) +
                            std::exp(-uhat(b)));
      integral += piece;
      if (b <= 0.5 + 1e-12) half_integral += piece;
    }
    const double J_hat = (2.0 * std::exp(-0.0) - 1.0) / integral;  // per-nm flux / (q mu U_T)
    const double rho_mid_exact = std::exp(1.0) * (1.0 + J_hat * half_integral);
    CHECK(rho[1] == doctest::Approx(rho_mid_exact).epsilon(1e-8));

    const Vec fluxes = sg_fluxes(g, rho, u, U_T, cfg.mu);
    const double J_exact = q * cfg.mu * U_T * J_hat / constants::nanometer;
    CHECK(fluxes[0] == doctest::Approx(J_exact).epsilon(1e-8));
    CHECK(fluxes[1] == doctest::Approx(J_exact).epsilon(1e-8));
  }
}

TEST_CASE("flux sign is opposite to the potential ramp for equal boundary densities") {
  DeviceConfig cfg;
  const double U_T = cfg.thermal_voltage();
  const InterfaceGrid g = uniform_grid(60.0, 30);
  Vec up(g.node_count()), down(g.node_count());
  for (int i = 0; i < up.size(); ++i) {
    up[i] = 10.0 * U_T * g.nodes[i] / 60.0;
    down[i] = -up[i];
  }
  const DdResult rising = solve_dd(g, up, cfg);
  const DdResult falling = solve_dd(g, down, cfg);
  CHECK(rising.J < 0.0);
  CHECK(falling.J > 0.0);
  CHECK(rising.J_constancy <= 1e-8);
}

TEST_CASE("density stays positive for random potentials (discrete maximum principle)") {
  DeviceConfig cfg;
  const double U_T = cfg.thermal_voltage();
  const InterfaceGrid g = uniform_grid(60.0, 64);
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> du(-30.0 * U_T, 30.0 * U_T);
  for (int trial = 0; trial < 300; ++trial) {
    Vec u(g.node_count());
    for (int i = 0; i < u.size(); ++i) u[i] = du(rng);
    const DdResult dd = solve_dd(g, u, cfg);
    const double spread = u.maxCoeff() - u.minCoeff();
    const double lower = cfg.N_plus * std::exp(-spread / U_T);
    for (int i = 0; i < dd.rho.size(); ++i) {
      REQUIRE(dd.rho[i] > 0.0);
      REQUIRE(dd.rho[i] >= lower * (1.0 - 1e-10));
    }
  }
}

TEST_CASE("density-potential monotonicity bound on the Gummel box") {
  // sum (rho(u) - rho(v)) (u - v) w_i >= kappa ||u - v||_w^2 with
  // kappa = min rho / U_T over entries in [-30 U_T, 0].
  DeviceConfig cfg;
  const double U_T = cfg.thermal_voltage();
  const InterfaceGrid g = uniform_grid(60.0, 40);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> du(-30.0 * U_T, 0.0);
  const double kappa = cfg.N_plus * std::exp(-30.0) / U_T;
  for (int trial = 0; trial < 50; ++trial) {
    Vec u(g.node_count()), v(g.node_count());
    for (int i = 0; i < u.size(); ++i) {
      u[i] = du(rng);
      v[i] = du(rng);
    }
    const Vec ru = equilibrium_density(u, cfg.N_plus, U_T);
    const Vec rv = equilibrium_density(v, cfg.N_plus, U_T);
    double lhs = 0, norm2 = 0;
    for (int i = 0; i < u.size(); ++i) {
      const double w = (i == 0 || i + 1 == u.size()) ? g.spacing(0) / 2 : g.spacing(0);
      lhs += (ru[i] - rv[i]) * (u[i] - v[i]) * w;
      norm2 += (u[i] - v[i]) * (u[i] - v[i]) * w;
    }
    CHECK(lhs >= kappa * norm2 * (1.0 - 1e-12));
  }
}

TEST_CASE("SG system rejects mismatched potential data") {
  const InterfaceGrid g = uniform_grid(60.0, 8);
  CHECK_THROWS_AS(assemble_sg_system(g, Vec::Zero(5), 0.006, 1.0, 1.0), AssemblyError);
}
