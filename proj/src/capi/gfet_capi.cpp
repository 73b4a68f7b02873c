#include "gfet.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/config.hpp"
#include "core/errors.hpp"
#include "core/runner.hpp"
#include "core/selfconsistent.hpp"

namespace {

thread_local std::string g_last_error;

gfet_status classify(const std::exception& e) {
  g_last_error = e.what();
  if (dynamic_cast<const gfet::ConfigError*>(&e)) return GFET_ERR_CONFIG;
  if (dynamic_cast<const gfet::SolverError*>(&e)) return GFET_ERR_SOLVER;
  if (dynamic_cast<const gfet::IoError*>(&e)) return GFET_ERR_IO;
  return GFET_ERROR;
}

template <typename F>
gfet_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return GFET_OK;
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    g_last_error = "unknown error";
    return GFET_ERROR;
  }
}

}  // namespace

struct gfet_config {
  gfet::DeviceConfig cfg;
};

struct gfet_solution {
  gfet::DeviceConfig cfg;
  std::shared_ptr<gfet::SelfConsistentSolver> solver;
  gfet::SelfConsistentResult result;
};

extern "C" {

const char* gfet_version(void) { return "1.0.0"; }

const char* gfet_last_error(void) { return g_last_error.c_str(); }

gfet_config* gfet_config_create(void) { return new gfet_config{}; }

void gfet_config_free(gfet_config* cfg) { delete cfg; }

gfet_status gfet_config_load_file(gfet_config* cfg, const char* path) {
  if (!cfg || !path) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { cfg->cfg = gfet::parse_config_file(path); });
}

gfet_status gfet_config_set(gfet_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { gfet::apply_override(cfg->cfg, key, value); });
}

gfet_status gfet_config_get(const gfet_config* cfg, const char* key, char* buffer,
                            size_t buffer_size) {
  if (!cfg || !key || !buffer || buffer_size == 0) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const std::string v = gfet::config_get(cfg->cfg, key);
    if (v.size() + 1 > buffer_size) throw gfet::ConfigError("buffer too small for value");
    std::memcpy(buffer, v.c_str(), v.size() + 1);
  });
}

gfet_status gfet_solve(const gfet_config* cfg, double v_ds, gfet_solution** out) {
  if (!cfg || !out) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  *out = nullptr;
  return guarded([&] {
    auto sol = std::make_unique<gfet_solution>();
    sol->cfg = cfg->cfg;
    sol->solver = std::make_shared<gfet::SelfConsistentSolver>(cfg->cfg);
    sol->result = sol->solver->solve_continued(v_ds);
    *out = sol.release();
  });
}

void gfet_solution_free(gfet_solution* sol) { delete sol; }

int gfet_solution_interface_points(const gfet_solution* sol) {
  if (!sol) return 0;
  return sol->solver->grid().node_count();
}

gfet_status gfet_solution_get_interface(const gfet_solution* sol, double* x,
                                        double* u_gamma, double* rho) {
  if (!sol) {
    g_last_error = "null solution";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  const auto& grid = sol->solver->grid();
  for (int i = 0; i < grid.node_count(); ++i) {
    if (x) x[i] = grid.nodes[i];
    if (u_gamma) u_gamma[i] = sol->result.state.u_gamma[i];
    if (rho) rho[i] = sol->result.state.rho[i];
  }
  return GFET_OK;
}

double gfet_solution_drain_current(const gfet_solution* sol) {
  return sol ? -sol->result.state.J : 0.0;
}

int gfet_solution_gummel_iterations(const gfet_solution* sol) {
  return sol ? sol->result.state.gummel_iter : 0;
}

gfet_status gfet_solution_write_csv(const gfet_solution* sol, const char* out_dir) {
  if (!sol || !out_dir) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    gfet::emit_solution_csv(sol->cfg, sol->solver->system(), sol->result, out_dir);
  });
}

gfet_status gfet_run(const gfet_config* cfg, const char* command, const char* out_dir,
                     int verbose) {
  if (!cfg || !command || !out_dir) {
    g_last_error = "null argument";
    return GFET_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    gfet::run_command(cfg->cfg, command, out_dir, verbose ? &std::cout : nullptr);
  });
}

}  // extern "C"
