#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "core/errors.hpp"
#include "core/saddle.hpp"
#include "core/transport.hpp"

namespace gfet {

struct TransportState {
  Vec rho;      // nodal surface density, m^-2
  Vec u_gamma;  // nodal interface potential, V
  double J = 0.0;           // SG flux, electron sign convention
  int gummel_iter = 0;
  bool converged = false;
};

struct SelfConsistentResult {
  SolutionFields fields;
  TransportState state;
  std::vector<double> update_history;  // sup-norm potential updates per iteration
};

// Thrown when the linearized fixed-point loop fails to converge; carries the
// last iterate so callers can inspect or restart.
class GummelError : public SolverError {
 public:
  GummelError(const std::string& msg, TransportState last, std::vector<double> history)
      : SolverError(msg), last_state(std::move(last)), update_history(std::move(history)) {}
  TransportState last_state;
  std::vector<double> update_history;
};

struct SweepPoint {
  double V_DS;
  double J;              // signed SG flux (A/m), negative at positive bias
  double drain_current;  // -J: conventional source->drain current per width
  double J_constancy;
  int gummel_iter;
};

// Drift-diffusion / Poisson coupling on the interface model. The linearized
// Poisson solve only modifies the interface block, so the Schur path reuses
// its bulk factorizations across all iterations and voltage steps.
class SelfConsistentSolver {
 public:
  explicit SelfConsistentSolver(const DeviceConfig& cfg);

  // Gummel loop at fixed drain-source bias (V_D = V_S + V_DS).
  SelfConsistentResult self_consistent_solve(double V_DS, const TransportState* warm = nullptr);

  // Continuation from equilibrium in dV_step increments up to V_DS.
  SelfConsistentResult solve_continued(double V_DS);

  // Full I-V continuation; on_point is invoked with each converged solve.
  std::vector<SweepPoint> voltage_sweep(
      double V_max,
      const std::function<void(double, const SelfConsistentResult&)>& on_point = nullptr);

  // One linearized Poisson solve + density update (exposed for tests).
  std::pair<TransportState, SolutionFields> gummel_step(const TransportState& state,
                                                        double V_S, double V_D);

  // Linearized interface operator at a given state (for solver-equivalence checks).
  InterfaceOperator linearized_operator(const TransportState& state) const;

  const BlockSystem& system() const { return sys_; }
  const InterfaceGrid& grid() const { return sys_.gamma; }
  const DeviceConfig& config() const { return cfg_; }
  SolutionFields solve_linear(const InterfaceOperator& op) const;

 private:
  TransportState initial_state(double V_S, double V_D) const;
  Vec update_density(const Vec& u_gamma, double V_S, double V_D) const;

  DeviceConfig cfg_;
  BlockSystem sys_;
  std::unique_ptr<SchurSolver> schur_;
  Vec doping_load_;  // (N_dop, hat_j), fixed per configuration
  SpMat mass_;       // plain interface mass matrix
};

}  // namespace gfet
