#pragma once

#include <array>
#include <vector>

#include "core/assembly.hpp"

namespace gfet {

// Dirichlet values collected per mesh vertex from the boundary tags.
struct DirichletData {
  std::vector<char> constrained;  // per vertex
  Vec values;                     // full-sized, zero at free nodes
};

DirichletData collect_dirichlet(const Mesh2D& mesh, double V_S, double V_D, double V_G);

// Mapping between full and free (non-Dirichlet) index spaces.
struct FieldMap {
  std::vector<int> full_to_free;  // -1 when constrained
  std::vector<int> free_to_full;
  Vec constrained_values;  // full length, zero at free nodes
  int free_count() const { return static_cast<int>(free_to_full.size()); }

  Vec restrict_free(const Vec& full) const;
  Vec expand(const Vec& free) const;  // reinserts the constrained values
};

FieldMap make_field_map(const std::vector<char>& constrained, const Vec& values);

// Extracts the free-free and free-constrained parts of a square operator.
void split_square(const SpMat& M, const FieldMap& map, SpMat& M_ff, SpMat& M_fc);
// Splits the columns of a rectangular operator (rows untouched).
void split_columns(const SpMat& M, const FieldMap& map, SpMat& M_f, SpMat& M_c);

// The assembled interface-coupled saddle-point problem after Dirichlet
// elimination. Full-space operators are retained for residual checks and for
// rebuilding right-hand sides when the contact potentials change.
struct BlockSystem {
  CouplingMode mode = CouplingMode::Dirichlet;
  double alpha = 0.0;  // scaled Robin coefficient, 0 in Dirichlet mode

  Mesh2D mesh1, mesh2;
  InterfaceGrid gamma;
  MultiplierSpace mult1, mult2;

  // full operators
  SpMat A1_full, A2_full, Ag_full;
  SpMat B1_full, B2_full, B1g_full, B2g_full;
  SpMat C1, C2;

  // elimination maps
  FieldMap map1, map2, mapg;

  // reduced operators
  SpMat A1, A2, Ag;
  SpMat A1_fc, A2_fc, Ag_fc;
  SpMat B1, B2, B1c, B2c;
  SpMat B1g, B2g, B1gc, B2gc;

  // reduced right-hand side pieces determined by the contact potentials
  Vec f1, f2, g1, g2;

  int n1() const { return map1.free_count(); }
  int n2() const { return map2.free_count(); }
  int nm1() const { return mult1.dof_count(); }
  int nm2() const { return mult2.dof_count(); }
  int ng() const { return mapg.free_count(); }
  int total_unknowns() const { return n1() + n2() + nm1() + nm2() + ng(); }

  // Re-applies boundary values (used by voltage continuation).
  void set_boundary_values(double V_S, double V_D, double V_G);
};

// Assembles meshes, spaces, all blocks, and performs the Dirichlet
// elimination with the contact potentials of `cfg`.
BlockSystem assemble_block_system(const DeviceConfig& cfg);

// Per-iteration interface payload: the (possibly augmented) interface
// operator and its reduced right-hand side.
struct InterfaceOperator {
  SpMat Ag_ff;  // interface stiffness (+ linearization mass), free rows/cols
  Vec r;        // reduced interface RHS
};

// Builds the plain (no linearization term) interface operator for a given
// nodal density functional; r = load_f - Ag_fc * u_c.
InterfaceOperator make_interface_operator(const BlockSystem& sys, const Vec& load_full);

// Solution quintuple with boundary values reinserted.
struct SolutionFields {
  Vec u1, u2;           // nodal potentials on mesh1 / mesh2
  Vec lambda1, lambda2;  // multiplier coefficients
  Vec u_gamma;          // nodal interface potential
};

// Relative residual norms of the five block rows of the reduced system.
std::array<double, 5> residual_report(const BlockSystem& sys, const InterfaceOperator& op,
                                      const SolutionFields& fields);

// Weak-continuity residuals per multiplier dof on the FULL operators:
// B_i u_i - B^i_gamma u_gamma (+ alpha C_i lambda_i in Robin mode).
Vec coupling_residual(const BlockSystem& sys, const SolutionFields& fields, int subdomain);

}  // namespace gfet
