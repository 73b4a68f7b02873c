#include "core/selfconsistent.hpp"

#include <cmath>
#include <sstream>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace gfet {

SelfConsistentSolver::SelfConsistentSolver(const DeviceConfig& cfg)
    : cfg_(cfg), sys_(assemble_block_system(cfg)) {
  if (cfg_.solver_path == DeviceConfig::Path::Schur)
    schur_ = std::make_unique<SchurSolver>(sys_);

  LinearFunctional1D dop;
  dop.f = [this](double x) { return cfg_.doping_at(x); };
  dop.breakpoints = {cfg_.x_j1, cfg_.x_j2};
  doping_load_ = assemble_interface_load(sys_.gamma, dop);
  mass_ = assemble_weighted_interface_mass(sys_.gamma, Vec::Ones(sys_.gamma.node_count()));
}

SolutionFields SelfConsistentSolver::solve_linear(const InterfaceOperator& op) const {
  if (schur_) return schur_->solve(op);
  return MonolithicSolver(sys_).solve(op);
}

InterfaceOperator SelfConsistentSolver::linearized_operator(const TransportState& state) const {
  const double s = constants::source_scale();
  const double U_T = cfg_.thermal_voltage();

  const Vec w = (s / U_T) * state.rho;
  const SpMat Mw_full = assemble_weighted_interface_mass(sys_.gamma, w);
  SpMat Mw_ff, Mw_fc;
  split_square(Mw_full, sys_.mapg, Mw_ff, Mw_fc);

  // load = s*(N_dop - rho^k) + (s/U_T) rho^k u^k, integrated against hats
  const Vec load_full = s * (doping_load_ - mass_ * state.rho) + Mw_full * state.u_gamma;

  InterfaceOperator op;
  op.Ag_ff = sys_.Ag + Mw_ff;
  op.r = sys_.mapg.restrict_free(load_full) -
         (sys_.Ag_fc + Mw_fc) * sys_.mapg.constrained_values;
  return op;
}

Vec SelfConsistentSolver::update_density(const Vec& u_gamma, double V_S, double V_D) const {
  const double U_T = cfg_.thermal_voltage();
  if (V_D == V_S) {
    // densities measured against the common contact Fermi level
    return equilibrium_density(Vec(u_gamma.array() - V_S), cfg_.N_plus, U_T);
  }
  return solve_dd(sys_.gamma, u_gamma, cfg_).rho;
}

std::pair<TransportState, SolutionFields> SelfConsistentSolver::gummel_step(
    const TransportState& state, double V_S, double V_D) {
  sys_.set_boundary_values(V_S, V_D, cfg_.V_G);
  const InterfaceOperator op = linearized_operator(state);
  SolutionFields fields = solve_linear(op);

  TransportState next;
  next.u_gamma = fields.u_gamma;
  next.rho = update_density(fields.u_gamma, V_S, V_D);
  next.gummel_iter = state.gummel_iter + 1;
  return {std::move(next), std::move(fields)};
}

TransportState SelfConsistentSolver::initial_state(double V_S, double V_D) const {
  TransportState st;
  const int n = sys_.gamma.node_count();
  st.u_gamma.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = sys_.gamma.nodes[i] / sys_.gamma.length();
    st.u_gamma[i] = V_S + (V_D - V_S) * t;
  }
  st.rho = equilibrium_density(Vec(st.u_gamma.array() - V_S), cfg_.N_plus, cfg_.thermal_voltage());
  return st;
}

SelfConsistentResult SelfConsistentSolver::self_consistent_solve(double V_DS,
                                                                 const TransportState* warm) {
  const double V_S = cfg_.V_S;
  const double V_D = cfg_.V_S + V_DS;

  TransportState state = warm ? *warm : initial_state(V_S, V_D);
  if (warm) {
    // enforce the new contact value on the warm-started iterate
    state.u_gamma[0] = V_S;
    state.u_gamma[state.u_gamma.size() - 1] = V_D;
    state.gummel_iter = 0;
  }

  std::vector<double> history;
  SolutionFields fields;
  bool converged = false;
  for (int k = 0; k < cfg_.gummel_max_iter; ++k) {
    auto [next, f] = gummel_step(state, V_S, V_D);
    const double diff = (next.u_gamma - state.u_gamma).lpNorm<Eigen::Infinity>();
    history.push_back(diff);
    state = std::move(next);
    fields = std::move(f);
    if (diff < cfg_.gummel_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "gummel iteration did not converge after " << cfg_.gummel_max_iter
       << " iterations (last update " << (history.empty() ? 0.0 : history.back()) << " V)";
    throw GummelError(os.str(), state, history);
  }

  const DdResult dd = solve_dd(sys_.gamma, state.u_gamma, cfg_);
  state.J = dd.J;
  state.converged = true;

  SelfConsistentResult out;
  out.fields = std::move(fields);
  out.state = std::move(state);
  out.update_history = std::move(history);
  return out;
}

SelfConsistentResult SelfConsistentSolver::solve_continued(double V_DS) {
  SelfConsistentResult res = self_consistent_solve(0.0);
  if (V_DS == 0.0) return res;
  const double steps_real = V_DS / cfg_.dV_step;
  const int steps = static_cast<int>(std::round(steps_real));
  if (steps < 1 || std::abs(steps - steps_real) > 1e-9)
    throw ConfigError("target V_DS must be a multiple of dV_step");
  for (int i = 1; i <= steps; ++i)
    res = self_consistent_solve(i * cfg_.dV_step, &res.state);
  return res;
}

std::vector<SweepPoint> SelfConsistentSolver::voltage_sweep(
    double V_max, const std::function<void(double, const SelfConsistentResult&)>& on_point) {
  const double steps_real = V_max / cfg_.dV_step;
  const int steps = static_cast<int>(std::round(steps_real));
  if (V_max < 0 || (V_max > 0 && std::abs(steps - steps_real) > 1e-9))
    throw ConfigError("V_max must be a non-negative multiple of dV_step");

  std::vector<SweepPoint> points;
  SelfConsistentResult res;
  for (int i = 0; i <= steps; ++i) {
    const double V = i * cfg_.dV_step;
    try {
      res = self_consistent_solve(V, i == 0 ? nullptr : &res.state);
    } catch (const GummelError& e) {
      std::ostringstream os;
      os << "voltage sweep failed at V_DS = " << V << ": " << e.what();
      throw GummelError(os.str(), e.last_state, e.update_history);
    }
    const DdResult dd = solve_dd(sys_.gamma, res.state.u_gamma, cfg_);
    points.push_back({V, dd.J, -dd.J, dd.J_constancy, res.state.gummel_iter});
    if (on_point) on_point(V, res);
  }
  return points;
}

}  // namespace gfet
