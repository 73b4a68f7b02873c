#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "core/mesh.hpp"

namespace gfet {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Lagrange-multiplier space on the trace partition of a subdomain mesh:
// continuous, piecewise linear, constant on the first and the last interval.
// dof m is attached to interior node m+1; dof_count = intervals - 1.
struct MultiplierSpace {
  InterfaceGrid partition;

  int dof_count() const { return partition.intervals() - 1; }

  // Values of basis function m at the two ends of interval j. Within any
  // interval every basis function is linear (or constant), so this pins it.
  void interval_values(int m, int j, double& left, double& right) const;

  double eval(int m, double x) const;  // pointwise, for tests
};

MultiplierSpace build_multiplier_space(const InterfaceGrid& partition);

// Density on gamma integrated against interface hat functions.
// `breakpoints` lists interior discontinuities of f (quadrature intervals are
// split there so piecewise-smooth densities integrate exactly).
struct LinearFunctional1D {
  std::function<double(double)> f;
  int quad_points = 3;  // Gauss points per (sub)interval
  std::vector<double> breakpoints;
};

// P1 stiffness of -div(eps grad u) over a subdomain mesh; exact element
// matrices, symmetric PSD, kernel = constants before boundary elimination.
SpMat assemble_stiffness_2d(const Mesh2D& mesh, double eps);

// 1D interface stiffness d * eps_par * int u' v'; tridiagonal PSD.
SpMat assemble_interface_stiffness(const InterfaceGrid& grid, double d, double eps_par);

// B_i: rows = multiplier dofs, cols = all mesh vertices. Entry (m, v) =
// int_gamma mu_m * trace(hat_v). Traces vanish off gamma, so only interface
// columns are populated. Requires mult.partition == trace_partition(mesh).
SpMat assemble_trace_coupling(const Mesh2D& mesh, const MultiplierSpace& mult);

// B^i_gamma: rows = multiplier dofs, cols = interface-grid nodes. The two
// partitions may differ; products of piecewise linears are integrated exactly
// on the merged-breakpoint partition.
SpMat assemble_cross_coupling(const MultiplierSpace& mult, const InterfaceGrid& grid);

// C_i: Gram matrix of the multiplier basis, symmetric positive definite.
SpMat assemble_multiplier_mass(const MultiplierSpace& mult);

// Load vector (f, hat_j) over the interface grid.
Vec assemble_interface_load(const InterfaceGrid& grid, const LinearFunctional1D& f);

// Interface mass matrix weighted by a nodal (piecewise linear) weight,
// int w(x) u v; used by the linearized coupling loop.
SpMat assemble_weighted_interface_mass(const InterfaceGrid& grid, const Vec& nodal_weight);

// 1D H^1 inner products of nodal fields used by error norms.
double integrate_product_p1(double h, double al, double ar, double bl, double br);

}  // namespace gfet
