#pragma once

#include <vector>

#include "core/assembly.hpp"
#include "core/selfconsistent.hpp"

namespace gfet {

struct NormTriple {
  double l2 = 0, h1semi = 0, h1 = 0;
};

// Full H^1(gamma) norm of a nodal field.
NormTriple norm_interface(const InterfaceGrid& grid, const Vec& nodal);

// Exact H^1(gamma) norm of (coarse - fine): both fields are linear on each
// fine interval, so per-interval integration is closed form. The coarse grid
// nodes must be a subset of the fine grid nodes.
NormTriple diff_interface(const InterfaceGrid& coarse_grid, const Vec& coarse,
                          const InterfaceGrid& fine_grid, const Vec& fine);

// Relative full-H^1 interface error ||fine - coarse|| / ||fine||.
double h1_error_interface(const InterfaceGrid& coarse_grid, const Vec& coarse,
                          const InterfaceGrid& fine_grid, const Vec& fine);

// Combined relative H^1 error over both oxide subdomains. Meshes must be
// nested (per-axis refinement ratios are powers of two); the computation is
// exact when the x and y ratios coincide.
double h1_error_2d(const Mesh2D& coarse1, const Vec& u1c, const Mesh2D& coarse2, const Vec& u2c,
                   const Mesh2D& fine1, const Vec& u1f, const Mesh2D& fine2, const Vec& u2f);

// Norm pieces used by h1_error_2d (exposed for the manufactured-solution tests).
NormTriple norm_2d(const Mesh2D& mesh, const Vec& nodal);
NormTriple diff_2d(const Mesh2D& coarse, const Vec& uc, const Mesh2D& fine, const Vec& uf);

struct LinfRecord {
  double error = 0;     // relative sup-norm difference over fine nodes
  double argmax_x = 0;  // location of the maximum absolute difference
  double argmax_y = 0;
};

LinfRecord linf_error_2d(const Mesh2D& coarse1, const Vec& u1c, const Mesh2D& coarse2,
                         const Vec& u2c, const Mesh2D& fine1, const Vec& u1f,
                         const Mesh2D& fine2, const Vec& u2f);

// Least-squares slope of log(error) against log(h). Zero errors are excluded;
// fewer than 3 surviving points is an error.
double convergence_slope(const std::vector<std::pair<double, double>>& h_and_error);

struct ErrorRecord {
  double h = 0;
  double E_1D = 0;
  double E_2D = 0;
  double E_Linf = 0;
  double E_rho = 0;
  double argmax_x = 0, argmax_y = 0;
};

ErrorRecord compute_errors(const SelfConsistentResult& coarse, const Mesh2D& cmesh1,
                           const Mesh2D& cmesh2, const InterfaceGrid& cgrid, double h,
                           const SelfConsistentResult& ref, const Mesh2D& rmesh1,
                           const Mesh2D& rmesh2, const InterfaceGrid& rgrid);

// (V_DS, J) records of a sweep, sorted by V_DS.
struct IvRecord {
  double V_DS;
  double drain_current;
  double J_constancy;
  int gummel_iter;
};
std::vector<IvRecord> extract_iv(const std::vector<SweepPoint>& sweep);

}  // namespace gfet
