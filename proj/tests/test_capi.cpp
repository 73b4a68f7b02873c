#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gfet.h"

namespace {

struct ConfigHandle {
  gfet_config* cfg = gfet_config_create();
  ~ConfigHandle() { gfet_config_free(cfg); }
};

void set_small_grids(gfet_config* cfg) {
  REQUIRE(gfet_config_set(cfg, "Nx", "16") == GFET_OK);
  REQUIRE(gfet_config_set(cfg, "Ny", "4") == GFET_OK);
  REQUIRE(gfet_config_set(cfg, "N_gamma", "32") == GFET_OK);
}

}  // namespace

TEST_CASE("version and error strings are always available") {
  CHECK(std::string(gfet_version()).size() > 0);
  CHECK(gfet_last_error() != nullptr);
}

TEST_CASE("config get/set round trip and validation errors") {
  ConfigHandle h;
  char buf[64];
  REQUIRE(gfet_config_get(h.cfg, "L", buf, sizeof(buf)) == GFET_OK);
  CHECK(std::string(buf) == "60");
  REQUIRE(gfet_config_get(h.cfg, "mu", buf, sizeof(buf)) == GFET_OK);
  CHECK(std::string(buf) == "4500");  // echoed in cm^2/Vs

  CHECK(gfet_config_set(h.cfg, "coupling_mode", "robin") == GFET_OK);
  REQUIRE(gfet_config_get(h.cfg, "coupling_mode", buf, sizeof(buf)) == GFET_OK);
  CHECK(std::string(buf) == "robin");

  CHECK(gfet_config_set(h.cfg, "bogus_key", "1") == GFET_ERR_CONFIG);
  CHECK(std::string(gfet_last_error()).find("bogus_key") != std::string::npos);
  CHECK(gfet_config_set(h.cfg, "Nx", "abc") == GFET_ERR_CONFIG);
  CHECK(gfet_config_set(h.cfg, "N_minus", "0") == GFET_ERR_CONFIG);
  CHECK(gfet_config_set(nullptr, "Nx", "4") == GFET_ERR_INVALID_ARGUMENT);

  char tiny[2];
  CHECK(gfet_config_get(h.cfg, "N_plus", tiny, sizeof(tiny)) == GFET_ERR_CONFIG);
}

TEST_CASE("config file loading") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "gfet_capi_cfg.ini").string();
  {
    std::ofstream out(path);
    out << "[device]\nL = 48\nx_j1 = 16\nx_j2 = 32\n[solver]\nNx = 12\n";
  }
  ConfigHandle h;
  REQUIRE(gfet_config_load_file(h.cfg, path.c_str()) == GFET_OK);
  char buf[64];
  REQUIRE(gfet_config_get(h.cfg, "L", buf, sizeof(buf)) == GFET_OK);
  CHECK(std::string(buf) == "48");
  CHECK(gfet_config_load_file(h.cfg, "/nonexistent/path.ini") == GFET_ERR_CONFIG);
  std::remove(path.c_str());
}

TEST_CASE("solve handle exposes the interface arrays and current") {
  ConfigHandle h;
  set_small_grids(h.cfg);
  gfet_solution* sol = nullptr;
  REQUIRE(gfet_solve(h.cfg, 0.0, &sol) == GFET_OK);
  REQUIRE(sol != nullptr);
  const int n = gfet_solution_interface_points(sol);
  CHECK(n == 33);
  std::vector<double> x(n), u(n), rho(n);
  REQUIRE(gfet_solution_get_interface(sol, x.data(), u.data(), rho.data()) == GFET_OK);
  CHECK(x.front() == 0.0);
  CHECK(x.back() == 60.0);
  CHECK(u.front() == 0.0);
  for (int i = 0; i < n; ++i) CHECK(rho[i] > 0.0);
  CHECK(gfet_solution_gummel_iterations(sol) > 0);
  CHECK(std::abs(gfet_solution_drain_current(sol)) <= 1e-6);
  gfet_solution_free(sol);
}

TEST_CASE("solution csv writing through the C surface") {
  ConfigHandle h;
  set_small_grids(h.cfg);
  gfet_solution* sol = nullptr;
  REQUIRE(gfet_solve(h.cfg, 0.01, &sol) == GFET_OK);
  CHECK(gfet_solution_drain_current(sol) > 0.0);

  const std::string dir =
      (std::filesystem::temp_directory_path() / "gfet_capi_out").string();
  REQUIRE(gfet_solution_write_csv(sol, dir.c_str()) == GFET_OK);
  for (const char* name : {"interface.csv", "bulk_1.csv", "bulk_2.csv",
                           "multipliers_1.csv", "multipliers_2.csv"}) {
    CHECK(std::filesystem::exists(std::filesystem::path(dir) / name));
  }
  gfet_solution_free(sol);
  std::filesystem::remove_all(dir);
}

TEST_CASE("run command dispatch and error mapping") {
  ConfigHandle h;
  set_small_grids(h.cfg);
  const std::string dir =
      (std::filesystem::temp_directory_path() / "gfet_capi_run").string();

  CHECK(gfet_run(h.cfg, "definitely-not-a-command", dir.c_str(), 0) == GFET_ERR_CONFIG);

  REQUIRE(gfet_run(h.cfg, "solve", dir.c_str(), 0) == GFET_OK);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "interface.csv"));

  REQUIRE(gfet_config_set(h.cfg, "V_max", "0.02") == GFET_OK);
  REQUIRE(gfet_run(h.cfg, "sweep", dir.c_str(), 0) == GFET_OK);
  CHECK(std::filesystem::exists(std::filesystem::path(dir) / "iv.csv"));

  // forced non-convergence maps to the solver status
  REQUIRE(gfet_config_set(h.cfg, "gummel_max_iter", "1") == GFET_OK);
  CHECK(gfet_run(h.cfg, "solve", dir.c_str(), 0) == GFET_ERR_SOLVER);
  CHECK(std::string(gfet_last_error()).find("gummel") != std::string::npos);

  std::filesystem::remove_all(dir);
}
