#include "core/saddle.hpp"

#include <Eigen/SparseLU>
#include <cmath>

#include "core/errors.hpp"

namespace gfet {

namespace {

void append_block(std::vector<Eigen::Triplet<double>>& trips, const SpMat& M,
                  int row0, int col0, double scale = 1.0, bool transpose = false) {
  for (int k = 0; k < M.outerSize(); ++k) {
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      if (transpose)
        trips.emplace_back(row0 + static_cast<int>(it.col()), col0 + static_cast<int>(it.row()),
                           scale * it.value());
      else
        trips.emplace_back(row0 + static_cast<int>(it.row()), col0 + static_cast<int>(it.col()),
                           scale * it.value());
    }
  }
}

SolutionFields expand_fields(const BlockSystem& sys, const Vec& u1, const Vec& u2,
                             const Vec& l1, const Vec& l2, const Vec& ug) {
  SolutionFields f;
  f.u1 = sys.map1.expand(u1);
  f.u2 = sys.map2.expand(u2);
  f.lambda1 = l1;
  f.lambda2 = l2;
  f.u_gamma = sys.mapg.expand(ug);
  return f;
}

void check_residual(const BlockSystem& sys, const InterfaceOperator& op,
                    const SolutionFields& fields, const char* path) {
  const auto res = residual_report(sys, op, fields);
  for (double r : res) {
    if (!(r <= 1e-9)) {
      throw SolverError(std::string(path) + ": block residual " + std::to_string(r) +
                        " exceeds tolerance (singular or ill-posed system?)");
    }
  }
}

}  // namespace

SolutionFields MonolithicSolver::solve(const InterfaceOperator& op) const {
  const BlockSystem& s = *sys_;
  const int n1 = s.n1(), n2 = s.n2(), m1 = s.nm1(), m2 = s.nm2(), ng = s.ng();
  const int o1 = 0, o2 = n1, om1 = n1 + n2, om2 = n1 + n2 + m1, og = n1 + n2 + m1 + m2;
  const int n = og + ng;

  std::vector<Eigen::Triplet<double>> trips;
  append_block(trips, s.A1, o1, o1);
  append_block(trips, s.A2, o2, o2);
  append_block(trips, s.B1, o1, om1, -1.0, /*transpose=*/true);  // -B1^T
  append_block(trips, s.B2, o2, om2, -1.0, /*transpose=*/true);
  append_block(trips, s.B1, om1, o1);
  append_block(trips, s.B2, om2, o2);
  append_block(trips, s.B1g, om1, og, -1.0);
  append_block(trips, s.B2g, om2, og, -1.0);
  if (s.mode == CouplingMode::Robin) {
    append_block(trips, s.C1, om1, om1, s.alpha);
    append_block(trips, s.C2, om2, om2, s.alpha);
  }
  append_block(trips, s.B1g, og, om1, 1.0, /*transpose=*/true);
  append_block(trips, s.B2g, og, om2, 1.0, /*transpose=*/true);
  append_block(trips, op.Ag_ff, og, og);

  SpMat M(n, n);
  M.setFromTriplets(trips.begin(), trips.end());
  M.makeCompressed();

  Vec b(n);
  b.segment(o1, n1) = s.f1;
  b.segment(o2, n2) = s.f2;
  b.segment(om1, m1) = s.g1;
  b.segment(om2, m2) = s.g2;
  b.segment(og, ng) = op.r;

  if (b.norm() == 0.0) {
    return expand_fields(s, Vec::Zero(n1), Vec::Zero(n2), Vec::Zero(m1), Vec::Zero(m2),
                         Vec::Zero(ng));
  }

  Eigen::SparseLU<SpMat> lu;
  lu.analyzePattern(M);
  lu.factorize(M);
  if (lu.info() != Eigen::Success)
    throw SolverError("monolithic factorization failed (singular block matrix?)");
  Vec x = lu.solve(b);
  // one step of iterative refinement keeps the residual at direct-solve level
  x += lu.solve(b - M * x);
  const double rel = (M * x - b).norm() / b.norm();
  if (!(rel <= 1e-10))
    throw SolverError("monolithic solve residual " + std::to_string(rel) + " too large");

  SolutionFields fields = expand_fields(s, x.segment(o1, n1), x.segment(o2, n2),
                                        x.segment(om1, m1), x.segment(om2, m2),
                                        x.segment(og, ng));
  check_residual(s, op, fields, "solve_block");
  return fields;
}

SchurSolver::SchurSolver(const BlockSystem& sys) : sys_(&sys) {
  const BlockSystem& s = sys;
  A1_fact_.compute(s.A1);
  A2_fact_.compute(s.A2);
  if (A1_fact_.info() != Eigen::Success || A2_fact_.info() != Eigen::Success)
    throw SolverError("schur_solve: bulk stiffness factorization failed");

  auto inner_schur = [&](const SpMat& B, const SpMat& C,
                         const Eigen::SimplicialLDLT<SpMat>& F) {
    const int m = static_cast<int>(B.rows());
    Eigen::MatrixXd S(m, m);
    const Eigen::MatrixXd Bt = Eigen::MatrixXd(B.transpose());
    constexpr int chunk = 64;
    for (int c0 = 0; c0 < m; c0 += chunk) {
      const int w = std::min(chunk, m - c0);
      const Eigen::MatrixXd X = F.solve(Bt.middleCols(c0, w));
      S.middleCols(c0, w) = B * X;
    }
    if (sys_->mode == CouplingMode::Robin) S += sys_->alpha * Eigen::MatrixXd(C);
    return S;
  };

  Eigen::MatrixXd S1 = inner_schur(s.B1, s.C1, A1_fact_);
  Eigen::MatrixXd S2 = inner_schur(s.B2, s.C2, A2_fact_);
  S1_fact_.compute(S1);
  S2_fact_.compute(S2);
  if (S1_fact_.info() != Eigen::Success || S2_fact_.info() != Eigen::Success)
    throw SolverError("schur_solve: inner Schur block not positive definite");

  B1g_dense_ = Eigen::MatrixXd(s.B1g);
  B2g_dense_ = Eigen::MatrixXd(s.B2g);
  T_ = B1g_dense_.transpose() * S1_fact_.solve(B1g_dense_) +
       B2g_dense_.transpose() * S2_fact_.solve(B2g_dense_);
}

SolutionFields SchurSolver::solve(const InterfaceOperator& op) const {
  const BlockSystem& s = *sys_;
  const Vec y1 = A1_fact_.solve(s.f1);
  const Vec y2 = A2_fact_.solve(s.f2);
  const Vec w1 = S1_fact_.solve((s.g1 - s.B1 * y1).eval());
  const Vec w2 = S2_fact_.solve((s.g2 - s.B2 * y2).eval());

  Eigen::MatrixXd S = T_ + Eigen::MatrixXd(op.Ag_ff);
  const Vec rhs = op.r - B1g_dense_.transpose() * w1 - B2g_dense_.transpose() * w2;
  Eigen::LDLT<Eigen::MatrixXd> outer(S);
  if (outer.info() != Eigen::Success)
    throw SolverError("schur_solve: interface operator factorization failed");
  const Vec ug = outer.solve(rhs);

  const Vec l1 = w1 + S1_fact_.solve((s.B1g * ug).eval());
  const Vec l2 = w2 + S2_fact_.solve((s.B2g * ug).eval());
  const Vec u1 = y1 + A1_fact_.solve((s.B1.transpose() * l1).eval());
  const Vec u2 = y2 + A2_fact_.solve((s.B2.transpose() * l2).eval());

  SolutionFields fields = expand_fields(s, u1, u2, l1, l2, ug);
  check_residual(s, op, fields, "schur_solve");
  return fields;
}

SolutionFields solve_block(const BlockSystem& sys, const InterfaceOperator& op) {
  return MonolithicSolver(sys).solve(op);
}

SolutionFields schur_solve(const BlockSystem& sys, const InterfaceOperator& op) {
  return SchurSolver(sys).solve(op);
}

}  // namespace gfet
