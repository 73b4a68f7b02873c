#pragma once

#include <memory>

#include "core/system.hpp"

namespace gfet {

// Direct solve of the assembled five-block saddle matrix. The factorization
// is redone on every call, so this path is the plain reference.
class MonolithicSolver {
 public:
  explicit MonolithicSolver(const BlockSystem& sys) : sys_(&sys) {}
  SolutionFields solve(const InterfaceOperator& op) const;

 private:
  const BlockSystem* sys_;
};

// Interface Schur-complement path: bulk blocks are factored once, the dense
// interface operator T = sum_i (B^i_g)^T S_i^{-1} B^i_g is formed once, and
// each solve only refactors the (small, dense) interface system. This is what
// makes repeated linearized solves cheap: they touch only the interface block.
class SchurSolver {
 public:
  explicit SchurSolver(const BlockSystem& sys);
  SolutionFields solve(const InterfaceOperator& op) const;

  // Dense interface operator without the A_gamma part (SPD checks in tests).
  const Eigen::MatrixXd& coupling_operator() const { return T_; }

 private:
  const BlockSystem* sys_;
  Eigen::SimplicialLDLT<SpMat> A1_fact_, A2_fact_;
  Eigen::LLT<Eigen::MatrixXd> S1_fact_, S2_fact_;
  Eigen::MatrixXd T_;  // ng x ng
  Eigen::MatrixXd B1g_dense_, B2g_dense_;
};

// Convenience wrappers matching the two solve routes.
SolutionFields solve_block(const BlockSystem& sys, const InterfaceOperator& op);
SolutionFields schur_solve(const BlockSystem& sys, const InterfaceOperator& op);

}  // namespace gfet
