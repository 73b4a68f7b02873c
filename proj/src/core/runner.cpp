#include "core/runner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "core/csv.hpp"
#include "core/errors.hpp"

namespace gfet {

namespace {

std::string sanitize_cell(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

DeviceConfig with_grids(const DeviceConfig& base, int Nx, int Ny, int Ngamma) {
  DeviceConfig c = base;
  c.Nx = Nx;
  c.Ny = Ny;
  c.N_gamma = Ngamma;
  return c;
}

DeviceConfig study_config(const DeviceConfig& base, int i) {
  return with_grids(base, 60 << i, 4 << i, 60 << i);
}

constexpr int kReferenceLevel = 4;  // Nx = N_gamma = 960, Ny = 64

}  // namespace

void emit_solution_csv(const DeviceConfig& cfg, const BlockSystem& sys,
                       const SelfConsistentResult& result, const std::string& out_dir) {
  ensure_directory(out_dir);
  {
    CsvWriter w(out_dir + "/interface.csv", cfg, {"x", "u_gamma", "rho", "n_dop"});
    for (int i = 0; i < sys.gamma.node_count(); ++i) {
      const double x = sys.gamma.nodes[i];
      w.row({x, result.state.u_gamma[i], result.state.rho[i], cfg.doping_at(x)});
    }
  }
  for (int sub = 1; sub <= 2; ++sub) {
    const Mesh2D& mesh = (sub == 1) ? sys.mesh1 : sys.mesh2;
    const Vec& u = (sub == 1) ? result.fields.u1 : result.fields.u2;
    CsvWriter w(out_dir + "/bulk_" + std::to_string(sub) + ".csv", cfg,
                {"x", "y", "u_" + std::to_string(sub)});
    for (int v = 0; v < mesh.vertex_count(); ++v)
      w.row({mesh.vertices[v].x(), mesh.vertices[v].y(), u[v]});
  }
  for (int sub = 1; sub <= 2; ++sub) {
    const MultiplierSpace& mult = (sub == 1) ? sys.mult1 : sys.mult2;
    const Vec& lam = (sub == 1) ? result.fields.lambda1 : result.fields.lambda2;
    CsvWriter w(out_dir + "/multipliers_" + std::to_string(sub) + ".csv", cfg,
                {"x", "lambda_" + std::to_string(sub)});
    for (int m = 0; m < mult.dof_count(); ++m)
      w.row({mult.partition.nodes[m + 1], lam[m]});
  }
}

RunCache::Entry& RunCache::entry_for(const DeviceConfig& cfg) {
  std::ostringstream key;
  for (const auto& [k, v] : cfg.to_key_values()) {
    if (k == "V_D" || k == "V_max") continue;  // V_D is the sweep variable
    key << k << '=' << v << ';';
  }
  return entries_[key.str()];
}

const SelfConsistentSolver& RunCache::solver(const DeviceConfig& cfg) {
  Entry& e = entry_for(cfg);
  if (!e.solver) {
    DeviceConfig base = cfg;
    base.V_D = base.V_S;
    e.solver = std::make_shared<SelfConsistentSolver>(base);
  }
  return *e.solver;
}

std::shared_ptr<SelfConsistentResult> RunCache::solve(const DeviceConfig& cfg, double V_DS,
                                                      std::ostream* log) {
  Entry& e = entry_for(cfg);
  if (!e.solver) {
    DeviceConfig base = cfg;
    base.V_D = base.V_S;
    e.solver = std::make_shared<SelfConsistentSolver>(base);
  }
  const double steps_real = V_DS / cfg.dV_step;
  const int steps = static_cast<int>(std::round(steps_real));
  if (V_DS < 0 || (V_DS > 0 && std::abs(steps - steps_real) > 1e-9))
    throw ConfigError("V_DS must be a non-negative multiple of dV_step");

  std::shared_ptr<SelfConsistentResult> prev;
  for (int i = 0; i <= steps; ++i) {
    auto it = e.by_centivolt.find(i);
    if (it != e.by_centivolt.end()) {
      prev = it->second;
      continue;
    }
    auto res = std::make_shared<SelfConsistentResult>(
        e.solver->self_consistent_solve(i * cfg.dV_step, prev ? &prev->state : nullptr));
    if (log) {
      *log << "  solved Nx=" << cfg.Nx << " Ny=" << cfg.Ny << " N_gamma=" << cfg.N_gamma
           << " V_DS=" << format_double(i * cfg.dV_step)
           << " (gummel iterations: " << res->state.gummel_iter << ")\n";
    }
    e.by_centivolt[i] = res;
    prev = res;
  }
  return prev;
}

void run_solve(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log) {
  SelfConsistentSolver solver(cfg);
  const SelfConsistentResult res = solver.solve_continued(cfg.V_D - cfg.V_S);
  emit_solution_csv(cfg, solver.system(), res, out_dir);
  if (log) {
    *log << "solve: V_DS=" << format_double(cfg.V_D - cfg.V_S)
         << " converged in " << res.state.gummel_iter
         << " gummel iterations, J=" << format_double(res.state.J) << " A/m\n";
  }
}

void run_sweep(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log) {
  SelfConsistentSolver solver(cfg);
  const auto sweep = solver.voltage_sweep(cfg.V_max);
  const auto records = extract_iv(sweep);
  ensure_directory(out_dir);
  CsvWriter w(out_dir + "/iv.csv", cfg, {"v_ds", "j", "j_constancy", "gummel_iters"});
  for (const auto& r : records)
    w.row({r.V_DS, r.drain_current, r.J_constancy, static_cast<double>(r.gummel_iter)});
  if (log) *log << "sweep: " << records.size() << " points up to V_DS=" << format_double(cfg.V_max) << "\n";
}

void run_converge(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log) {
  RunCache cache;
  ensure_directory(out_dir);
  CsvWriter w(out_dir + "/convergence.csv", cfg,
              {"v_ds", "nx", "ny", "n_gamma", "h", "e_1d", "e_2d", "e_linf", "e_rho",
               "argmax_x", "argmax_y"},
              {"e_linf normalization: max|u_coarse - u_ref| / max|u_ref| over fine-mesh nodes"});
  const DeviceConfig ref_cfg = study_config(cfg, kReferenceLevel);
  for (double V : {0.0, 0.04}) {
    auto ref = cache.solve(ref_cfg, V, log);
    const auto& ref_sys = cache.solver(ref_cfg).system();
    std::vector<std::pair<double, double>> e1d, e2d, erho;
    for (int i = 0; i < kReferenceLevel; ++i) {
      const DeviceConfig ci = study_config(cfg, i);
      auto res = cache.solve(ci, V, log);
      const auto& sys = cache.solver(ci).system();
      const double h = scaled_mesh_diameter(ci);
      const ErrorRecord rec = compute_errors(*res, sys.mesh1, sys.mesh2, sys.gamma, h, *ref,
                                             ref_sys.mesh1, ref_sys.mesh2, ref_sys.gamma);
      w.row({V, static_cast<double>(ci.Nx), static_cast<double>(ci.Ny),
             static_cast<double>(ci.N_gamma), rec.h, rec.E_1D, rec.E_2D, rec.E_Linf,
             rec.E_rho, rec.argmax_x, rec.argmax_y});
      e1d.emplace_back(h, rec.E_1D);
      e2d.emplace_back(h, rec.E_2D);
      erho.emplace_back(h, rec.E_rho);
    }
    if (log) {
      *log << "converge V_DS=" << format_double(V)
           << ": slope(E_1D)=" << format_double(convergence_slope(e1d))
           << " slope(E_2D)=" << format_double(convergence_slope(e2d))
           << " slope(E_rho)=" << format_double(convergence_slope(erho)) << "\n";
    }
  }
}

void run_tables(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log) {
  RunCache cache;
  ensure_directory(out_dir);
  const DeviceConfig ref_cfg = study_config(cfg, kReferenceLevel);

  auto errors_for = [&](const DeviceConfig& row_cfg, double V, ErrorRecord& rec) {
    auto res = cache.solve(row_cfg, V, log);
    auto ref = cache.solve(ref_cfg, V, log);
    const auto& sys = cache.solver(row_cfg).system();
    const auto& ref_sys = cache.solver(ref_cfg).system();
    rec = compute_errors(*res, sys.mesh1, sys.mesh2, sys.gamma,
                         scaled_mesh_diameter(row_cfg), *ref, ref_sys.mesh1, ref_sys.mesh2,
                         ref_sys.gamma);
  };

  {
    CsvWriter w(out_dir + "/table1.csv", cfg, {"ny", "v_ds", "e_1d", "e_2d", "status"});
    for (double V : {0.0, 0.04}) {
      for (int Ny : {8, 16, 32, 64}) {
        const DeviceConfig row_cfg = with_grids(cfg, 60, Ny, 60);
        try {
          ErrorRecord rec;
          errors_for(row_cfg, V, rec);
          w.row_cells({std::to_string(Ny), format_double(V), format_double(rec.E_1D),
                       format_double(rec.E_2D), "ok"});
        } catch (const Error& e) {
          w.row_cells({std::to_string(Ny), format_double(V), "nan", "nan", sanitize_cell(e.what())});
        }
      }
    }
  }
  {
    CsvWriter w(out_dir + "/table2.csv", cfg, {"nx", "n_gamma", "v_ds", "e_1d", "e_rho", "status"});
    for (double V : {0.0, 0.04}) {
      for (int N : {60, 120, 240, 480}) {
        const DeviceConfig row_cfg = with_grids(cfg, N, 16, N);
        try {
          ErrorRecord rec;
          errors_for(row_cfg, V, rec);
          w.row_cells({std::to_string(N), std::to_string(N), format_double(V),
                       format_double(rec.E_1D), format_double(rec.E_rho), "ok"});
        } catch (const Error& e) {
          w.row_cells({std::to_string(N), std::to_string(N), format_double(V), "nan", "nan",
                       sanitize_cell(e.what())});
        }
      }
    }
  }
  {
    CsvWriter w(out_dir + "/table3.csv", cfg, {"nx", "n_gamma", "v_ds", "e_1d", "e_rho", "status"});
    for (double V : {0.0, 0.04}) {
      for (int Ng : {30, 120, 240, 480, 960}) {
        const DeviceConfig row_cfg = with_grids(cfg, 60, 16, Ng);
        try {
          ErrorRecord rec;
          errors_for(row_cfg, V, rec);
          w.row_cells({"60", std::to_string(Ng), format_double(V), format_double(rec.E_1D),
                       format_double(rec.E_rho), "ok"});
        } catch (const Error& e) {
          w.row_cells({"60", std::to_string(Ng), format_double(V), "nan", "nan",
                       sanitize_cell(e.what())});
        }
      }
    }
  }
  if (log) *log << "tables: wrote table1.csv table2.csv table3.csv\n";
}

void run_compare(const DeviceConfig& cfg, const std::string& out_dir, std::ostream* log) {
  ensure_directory(out_dir);

  DeviceConfig cfg_d = cfg;
  cfg_d.coupling_mode = CouplingMode::Dirichlet;
  DeviceConfig cfg_r = cfg;
  cfg_r.coupling_mode = CouplingMode::Robin;

  SelfConsistentSolver dirichlet(cfg_d);
  SelfConsistentSolver robin(cfg_r);
  TransmissionSolver transmission(cfg);

  const SelfConsistentResult res_d = dirichlet.self_consistent_solve(0.0);
  const SelfConsistentResult res_r = robin.self_consistent_solve(0.0);
  const TransmissionResult res_t = transmission.self_consistent_solve(0.0);

  const double xm = cfg.L / 2.0;
  auto interface_mid = [&](const SelfConsistentSolver& s, const SelfConsistentResult& r) {
    const auto& g = s.grid();
    // midpoint falls on a node for even N_gamma; interpolate otherwise
    int j = static_cast<int>(std::upper_bound(g.nodes.begin(), g.nodes.end(), xm) -
                             g.nodes.begin()) - 1;
    j = std::clamp(j, 0, g.intervals() - 1);
    const double t = (xm - g.nodes[j]) / g.spacing(j);
    return r.state.u_gamma[j] + (r.state.u_gamma[j + 1] - r.state.u_gamma[j]) * t;
  };
  const double mid_t = transmission.mesh().eval(res_t.u, xm, 0.0);
  const double mid_d = interface_mid(dirichlet, res_d);
  const double mid_r = interface_mid(robin, res_r);

  {
    CsvWriter w(out_dir + "/compare.csv", cfg, {"model", "u_mid", "gap"});
    w.row_cells({"transmission", format_double(mid_t), format_double(0.0)});
    w.row_cells({"dirichlet", format_double(mid_d), format_double(std::abs(mid_d - mid_t))});
    w.row_cells({"robin", format_double(mid_r), format_double(std::abs(mid_r - mid_t))});
  }
  if (log) {
    *log << "compare: |u_mid(dirichlet) - u_mid(transmission)| = "
         << format_double(std::abs(mid_d - mid_t)) << "\n"
         << "compare: |u_mid(robin) - u_mid(transmission)| = "
         << format_double(std::abs(mid_r - mid_t)) << "\n";
  }

  {
    CsvWriter w(out_dir + "/slice_transmission.csv", cfg, {"y", "u"});
    for (const auto& [y, u] : transmission.vertical_slice(res_t.u, xm)) w.row({y, u});
  }
  auto emit_interface_slice = [&](const std::string& name, const SelfConsistentSolver& s,
                                  const SelfConsistentResult& r, double mid) {
    CsvWriter w(out_dir + "/" + name, cfg, {"y", "u"});
    const Mesh2D& m2 = s.system().mesh2;
    for (int iy = 0; iy <= m2.ny; ++iy)
      w.row({m2.y_min + (m2.y_max - m2.y_min) * iy / m2.ny, m2.eval_p1(r.fields.u2, xm, m2.y_min + (m2.y_max - m2.y_min) * iy / m2.ny)});
    w.row({0.0, mid});
    const Mesh2D& m1 = s.system().mesh1;
    for (int iy = 0; iy <= m1.ny; ++iy)
      w.row({m1.y_min + (m1.y_max - m1.y_min) * iy / m1.ny, m1.eval_p1(r.fields.u1, xm, m1.y_min + (m1.y_max - m1.y_min) * iy / m1.ny)});
  };
  emit_interface_slice("slice_dirichlet.csv", dirichlet, res_d, mid_d);
  emit_interface_slice("slice_robin.csv", robin, res_r, mid_r);

  if (cfg.V_max > 0) {
    const auto iv_d = dirichlet.voltage_sweep(cfg.V_max);
    const auto iv_r = robin.voltage_sweep(cfg.V_max);
    const auto iv_t = transmission.voltage_sweep(cfg.V_max);
    CsvWriter w(out_dir + "/compare_iv.csv", cfg,
                {"v_ds", "j_dirichlet", "j_robin", "j_transmission"});
    for (size_t i = 0; i < iv_d.size(); ++i)
      w.row({iv_d[i].V_DS, iv_d[i].drain_current, iv_r[i].drain_current,
             iv_t[i].drain_current});
  }
}

void run_command(const DeviceConfig& cfg, const std::string& command,
                 const std::string& out_dir, std::ostream* log) {
  if (command == "solve") run_solve(cfg, out_dir, log);
  else if (command == "sweep") run_sweep(cfg, out_dir, log);
  else if (command == "converge") run_converge(cfg, out_dir, log);
  else if (command == "compare") run_compare(cfg, out_dir, log);
  else if (command == "tables") run_tables(cfg, out_dir, log);
  else throw ConfigError("unknown command '" + command + "'");
}

}  // namespace gfet
