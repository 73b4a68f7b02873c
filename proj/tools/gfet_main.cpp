// Command line front end; everything goes through the shared-library C API.

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfet.h"

namespace {

int exit_code_for(gfet_status st) {
  switch (st) {
    case GFET_OK: return 0;
    case GFET_ERR_CONFIG: return 2;
    case GFET_ERR_SOLVER: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interface-reduced Poisson / drift-diffusion solver for a 2D-material FET"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::string mode;
  std::vector<std::string> overrides;
  bool quiet = false;

  for (const char* name : {"solve", "sweep", "converge", "compare", "tables"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "INI configuration file");
    sub->add_option("--out", out_dir, "output directory for CSV files");
    sub->add_option("--set", overrides, "key=value override (repeatable)");
    sub->add_option("--mode", mode, "coupling mode: dirichlet|robin");
    sub->add_flag("--quiet", quiet, "suppress progress output");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  gfet_config* cfg = gfet_config_create();
  auto fail = [&](gfet_status st) {
    std::fprintf(stderr, "error: %s\n", gfet_last_error());
    gfet_config_free(cfg);
    return exit_code_for(st);
  };

  if (!config_path.empty()) {
    const gfet_status st = gfet_config_load_file(cfg, config_path.c_str());
    if (st != GFET_OK) return fail(st);
  }
  for (const std::string& kv : overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      gfet_config_free(cfg);
      return 2;
    }
    const gfet_status st = gfet_config_set(cfg, kv.substr(0, eq).c_str(),
                                           kv.substr(eq + 1).c_str());
    if (st != GFET_OK) return fail(st);
  }
  if (!mode.empty()) {
    const gfet_status st = gfet_config_set(cfg, "coupling_mode", mode.c_str());
    if (st != GFET_OK) return fail(st);
  }

  const gfet_status st = gfet_run(cfg, command.c_str(), out_dir.c_str(), quiet ? 0 : 1);
  if (st != GFET_OK) return fail(st);
  gfet_config_free(cfg);
  return 0;
}
