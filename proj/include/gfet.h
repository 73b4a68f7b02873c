#ifndef GFET_H
#define GFET_H

/* C interface to the interface-reduced GFET Poisson / drift-diffusion solver.
 *
 * All entry points return a gfet_status; on failure gfet_last_error() gives a
 * human-readable message for the calling thread. Handles are opaque and must
 * be released with the matching *_free function.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gfet_status {
  GFET_OK = 0,
  GFET_ERROR = 1,            /* unexpected failure */
  GFET_ERR_CONFIG = 2,       /* bad configuration, unknown key, parse error */
  GFET_ERR_SOLVER = 3,       /* factorization failure or non-convergence */
  GFET_ERR_IO = 4,           /* file system failure */
  GFET_ERR_INVALID_ARGUMENT = 5
} gfet_status;

typedef struct gfet_config gfet_config;
typedef struct gfet_solution gfet_solution;

const char* gfet_version(void);
/* Message of the last failure on this thread; empty string if none. */
const char* gfet_last_error(void);

/* Configuration: created with the built-in device defaults, then optionally
 * loaded from an INI file and/or adjusted key by key. */
gfet_config* gfet_config_create(void);
void gfet_config_free(gfet_config* cfg);
gfet_status gfet_config_load_file(gfet_config* cfg, const char* path);
gfet_status gfet_config_set(gfet_config* cfg, const char* key, const char* value);
gfet_status gfet_config_get(const gfet_config* cfg, const char* key, char* buffer,
                            size_t buffer_size);

/* Self-consistent solve at drain-source bias v_ds (continuation from 0 in
 * dV_step increments). The solution handle owns the converged fields. */
gfet_status gfet_solve(const gfet_config* cfg, double v_ds, gfet_solution** out);
void gfet_solution_free(gfet_solution* sol);

/* Number of interface grid nodes (N_gamma + 1). */
int gfet_solution_interface_points(const gfet_solution* sol);
/* Copies nodal interface data into caller arrays (any may be NULL). */
gfet_status gfet_solution_get_interface(const gfet_solution* sol, double* x,
                                        double* u_gamma, double* rho);
/* Drain current per unit width, A/m (positive source -> drain). */
double gfet_solution_drain_current(const gfet_solution* sol);
int gfet_solution_gummel_iterations(const gfet_solution* sol);
/* Writes interface.csv, bulk_*.csv, multipliers_*.csv into out_dir. */
gfet_status gfet_solution_write_csv(const gfet_solution* sol, const char* out_dir);

/* Runs one of the CLI commands: "solve", "sweep", "converge", "compare",
 * "tables". CSV outputs are written to out_dir; progress goes to stdout when
 * verbose is nonzero. */
gfet_status gfet_run(const gfet_config* cfg, const char* command, const char* out_dir,
                     int verbose);

#ifdef __cplusplus
}
#endif

#endif /* GFET_H */
