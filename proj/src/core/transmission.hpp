#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SparseCholesky>

#include "core/selfconsistent.hpp"
#include "core/system.hpp"

namespace gfet {

// Normalized Gaussian approximation of delta(y); y and a in nm, value in 1/nm.
double smoothed_delta(double y, double a);

// Single conforming triangulation of the whole device with mandatory node
// lines at y = 0 and y = +-d/2, y spacing graded from smoothing_a/2 at the
// strip up to l/(2*trans_Ny_outer) at the outer boundary, and a per-triangle
// permittivity tensor (eps_ox outside the strip, diag(eps_par, eps_perp) in it).
struct StripMesh {
  std::vector<double> xs;  // uniform
  std::vector<double> ys;  // graded, symmetric, contains -d/2, 0, d/2
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::pair<double, double>> tri_eps;  // (eps_x, eps_y)
  int midline_iy = 0;
  double L = 0, l = 0, d = 0;

  int nx() const { return static_cast<int>(xs.size()) - 1; }
  int ny() const { return static_cast<int>(ys.size()) - 1; }
  int vertex_index(int ix, int iy) const { return iy * (nx() + 1) + ix; }
  int vertex_count() const { return (nx() + 1) * (ny() + 1); }
  double x_of(int v) const { return xs[v % (nx() + 1)]; }
  double y_of(int v) const { return ys[v / (nx() + 1)]; }

  // P1 evaluation at an arbitrary point.
  double eval(const Eigen::VectorXd& nodal, double x, double y) const;
};

StripMesh build_strip_mesh(const DeviceConfig& cfg);

// Anisotropic P1 stiffness with the mesh's per-triangle tensors (or caller
// supplied ones, used by the degenerate-tensor test).
SpMat assemble_strip_stiffness(const StripMesh& mesh,
                               const std::vector<std::pair<double, double>>* tensors = nullptr);

struct TransmissionResult {
  Vec u;                // full nodal potential on the strip mesh
  TransportState state; // density / midline potential on the x grid
  std::vector<double> update_history;
};

// High-resolution solver for the resolved oxide/strip/oxide problem, used as
// the reference in the continuity-condition comparisons. Self-consistent runs
// drive the transport solver with the midline trace u(., 0); the linearized
// density term is lumped onto the midline nodal line, which leaves the fixed
// point unchanged and lets the bulk factorization be reused.
class TransmissionSolver {
 public:
  explicit TransmissionSolver(const DeviceConfig& cfg);

  TransmissionResult self_consistent_solve(double V_DS, const TransportState* warm = nullptr);
  TransmissionResult solve_continued(double V_DS);
  std::vector<SweepPoint> voltage_sweep(
      double V_max,
      const std::function<void(double, const TransmissionResult&)>& on_point = nullptr);

  // One linear solve with a frozen density (no linearization, no iteration).
  Vec solve_transmission(const Vec& rho_nodal, double V_S, double V_D);

  // (y, u(x, y)) along a vertical line, sampled at all mesh y levels.
  std::vector<std::pair<double, double>> vertical_slice(const Vec& u, double x) const;

  const StripMesh& mesh() const { return mesh_; }
  const InterfaceGrid& xgrid() const { return xgrid_; }
  Vec midline_values(const Vec& u) const;

  // |u_f^T (K u - F)| / u_f^T K u for the last assembled load (Galerkin identity).
  double energy_residual(const Vec& u_full, const Vec& rho, double V_S, double V_D) const;

 private:
  Vec assemble_load(const Vec& rho_nodal) const;             // full, interior charge only
  Vec boundary_values(double V_S, double V_D) const;          // full-length Dirichlet vector
  Vec solve_given(const Vec& load_full, const Vec& u_mid_prev, const SpMat* Mw1d,
                  double V_S, double V_D) const;

  DeviceConfig cfg_;
  StripMesh mesh_;
  InterfaceGrid xgrid_;
  SpMat K_full_;
  std::vector<char> dirichlet_;
  Vec dirichlet_scaled_;  // per-node factors: V_S / V_D / V_G slots

  // free-dof bookkeeping: bulk block b, midline block m
  std::vector<int> free_of_full_;  // -1 dirichlet, else free index
  std::vector<int> full_of_free_;
  std::vector<int> midline_free_;  // free indices on the midline, by x
  std::vector<int> bulk_free_;
  std::vector<int> pos_in_block_;  // position within its block

  SpMat K_ff_, K_fc_;
  SpMat K_bb_, K_bm_, K_mb_, K_mm_;
  Eigen::SimplicialLDLT<SpMat> K_bb_fact_;
  Eigen::MatrixXd T_mid_;  // K_mm - K_mb K_bb^-1 K_bm
};

}  // namespace gfet
