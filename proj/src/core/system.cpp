#include "core/system.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace gfet {

DirichletData collect_dirichlet(const Mesh2D& mesh, double V_S, double V_D, double V_G) {
  DirichletData dd;
  dd.constrained.assign(mesh.vertex_count(), 0);
  dd.values = Vec::Zero(mesh.vertex_count());
  std::vector<char> has_value(mesh.vertex_count(), 0);
  auto impose = [&](int v, double val) {
    if (has_value[v] && std::abs(dd.values[v] - val) > 1e-14) {
      throw AssemblyError("conflicting Dirichlet values at a shared boundary node");
    }
    dd.constrained[v] = 1;
    has_value[v] = 1;
    dd.values[v] = val;
  };
  for (const auto& e : mesh.boundary_edges) {
    double val;
    switch (e.tag) {
      case BoundaryTag::DirichletSource: val = V_S; break;
      case BoundaryTag::DirichletDrain: val = V_D; break;
      case BoundaryTag::DirichletGate: val = V_G; break;
      default: continue;
    }
    impose(e.a, val);
    impose(e.b, val);
  }
  return dd;
}

FieldMap make_field_map(const std::vector<char>& constrained, const Vec& values) {
  FieldMap map;
  const int n = static_cast<int>(constrained.size());
  map.full_to_free.assign(n, -1);
  map.constrained_values = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (constrained[i]) {
      map.constrained_values[i] = values[i];
    } else {
      map.full_to_free[i] = static_cast<int>(map.free_to_full.size());
      map.free_to_full.push_back(i);
    }
  }
  return map;
}

Vec FieldMap::restrict_free(const Vec& full) const {
  Vec out(free_count());
  for (int i = 0; i < free_count(); ++i) out[i] = full[free_to_full[i]];
  return out;
}

Vec FieldMap::expand(const Vec& free) const {
  Vec out = constrained_values;
  for (int i = 0; i < free_count(); ++i) out[free_to_full[i]] = free[i];
  return out;
}

void split_square(const SpMat& M, const FieldMap& map, SpMat& M_ff, SpMat& M_fc) {
  std::vector<Eigen::Triplet<double>> ff, fc;
  for (int k = 0; k < M.outerSize(); ++k) {
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      const int r = map.full_to_free[it.row()];
      if (r < 0) continue;
      const int c = map.full_to_free[it.col()];
      if (c >= 0)
        ff.emplace_back(r, c, it.value());
      else
        fc.emplace_back(r, static_cast<int>(it.col()), it.value());
    }
  }
  M_ff.resize(map.free_count(), map.free_count());
  M_ff.setFromTriplets(ff.begin(), ff.end());
  M_fc.resize(map.free_count(), M.cols());
  M_fc.setFromTriplets(fc.begin(), fc.end());
}

void split_columns(const SpMat& M, const FieldMap& map, SpMat& M_f, SpMat& M_c) {
  std::vector<Eigen::Triplet<double>> f, c;
  for (int k = 0; k < M.outerSize(); ++k) {
    for (SpMat::InnerIterator it(M, k); it; ++it) {
      const int col = map.full_to_free[it.col()];
      if (col >= 0)
        f.emplace_back(static_cast<int>(it.row()), col, it.value());
      else
        c.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  M_f.resize(M.rows(), map.free_count());
  M_f.setFromTriplets(f.begin(), f.end());
  M_c.resize(M.rows(), M.cols());
  M_c.setFromTriplets(c.begin(), c.end());
}

void BlockSystem::set_boundary_values(double V_S, double V_D, double V_G) {
  DirichletData d1 = collect_dirichlet(mesh1, V_S, V_D, V_G);
  DirichletData d2 = collect_dirichlet(mesh2, V_S, V_D, V_G);
  map1.constrained_values = d1.values;
  map2.constrained_values = d2.values;
  Vec gvals = Vec::Zero(gamma.node_count());
  gvals[0] = V_S;
  gvals[gamma.node_count() - 1] = V_D;
  mapg.constrained_values = gvals;

  f1 = -(A1_fc * map1.constrained_values);
  f2 = -(A2_fc * map2.constrained_values);
  g1 = -(B1c * map1.constrained_values) + B1gc * mapg.constrained_values;
  g2 = -(B2c * map2.constrained_values) + B2gc * mapg.constrained_values;
}

BlockSystem assemble_block_system(const DeviceConfig& cfg) {
  cfg.validate();
  BlockSystem sys;
  sys.mode = cfg.coupling_mode;
  sys.alpha = (cfg.coupling_mode == CouplingMode::Robin) ? cfg.robin_alpha() : 0.0;

  sys.mesh1 = build_subdomain_mesh(cfg, 1);
  sys.mesh2 = build_subdomain_mesh(cfg, 2);
  sys.gamma = build_interface_grid(cfg);
  sys.mult1 = build_multiplier_space(trace_partition(sys.mesh1));
  sys.mult2 = build_multiplier_space(trace_partition(sys.mesh2));

  sys.A1_full = assemble_stiffness_2d(sys.mesh1, cfg.eps_ox);
  sys.A2_full = assemble_stiffness_2d(sys.mesh2, cfg.eps_ox);
  sys.Ag_full = assemble_interface_stiffness(sys.gamma, cfg.d, cfg.eps_par);
  sys.B1_full = assemble_trace_coupling(sys.mesh1, sys.mult1);
  sys.B2_full = assemble_trace_coupling(sys.mesh2, sys.mult2);
  sys.B1g_full = assemble_cross_coupling(sys.mult1, sys.gamma);
  sys.B2g_full = assemble_cross_coupling(sys.mult2, sys.gamma);
  sys.C1 = assemble_multiplier_mass(sys.mult1);
  sys.C2 = assemble_multiplier_mass(sys.mult2);

  DirichletData d1 = collect_dirichlet(sys.mesh1, cfg.V_S, cfg.V_D, cfg.V_G);
  DirichletData d2 = collect_dirichlet(sys.mesh2, cfg.V_S, cfg.V_D, cfg.V_G);
  sys.map1 = make_field_map(d1.constrained, d1.values);
  sys.map2 = make_field_map(d2.constrained, d2.values);

  std::vector<char> gconstr(sys.gamma.node_count(), 0);
  gconstr.front() = 1;
  gconstr.back() = 1;
  Vec gvals = Vec::Zero(sys.gamma.node_count());
  gvals[0] = cfg.V_S;
  gvals[sys.gamma.node_count() - 1] = cfg.V_D;
  sys.mapg = make_field_map(gconstr, gvals);

  split_square(sys.A1_full, sys.map1, sys.A1, sys.A1_fc);
  split_square(sys.A2_full, sys.map2, sys.A2, sys.A2_fc);
  split_square(sys.Ag_full, sys.mapg, sys.Ag, sys.Ag_fc);
  split_columns(sys.B1_full, sys.map1, sys.B1, sys.B1c);
  split_columns(sys.B2_full, sys.map2, sys.B2, sys.B2c);
  split_columns(sys.B1g_full, sys.mapg, sys.B1g, sys.B1gc);
  split_columns(sys.B2g_full, sys.mapg, sys.B2g, sys.B2gc);

  sys.set_boundary_values(cfg.V_S, cfg.V_D, cfg.V_G);
  return sys;
}

InterfaceOperator make_interface_operator(const BlockSystem& sys, const Vec& load_full) {
  InterfaceOperator op;
  op.Ag_ff = sys.Ag;
  op.r = sys.mapg.restrict_free(load_full) - sys.Ag_fc * sys.mapg.constrained_values;
  return op;
}

std::array<double, 5> residual_report(const BlockSystem& sys, const InterfaceOperator& op,
                                      const SolutionFields& fields) {
  const Vec u1 = sys.map1.restrict_free(fields.u1);
  const Vec u2 = sys.map2.restrict_free(fields.u2);
  const Vec ug = sys.mapg.restrict_free(fields.u_gamma);

  const Vec r1 = sys.A1 * u1 - sys.B1.transpose() * fields.lambda1 - sys.f1;
  const Vec r2 = sys.A2 * u2 - sys.B2.transpose() * fields.lambda2 - sys.f2;
  Vec r3 = sys.B1 * u1 - sys.B1g * ug - sys.g1;
  Vec r4 = sys.B2 * u2 - sys.B2g * ug - sys.g2;
  if (sys.mode == CouplingMode::Robin) {
    r3 += sys.alpha * (sys.C1 * fields.lambda1);
    r4 += sys.alpha * (sys.C2 * fields.lambda2);
  }
  const Vec r5 = op.Ag_ff * ug + sys.B1g.transpose() * fields.lambda1 +
                 sys.B2g.transpose() * fields.lambda2 - op.r;

  auto rel = [](const Vec& r, double scale) {
    return r.norm() / std::max(scale, 1e-300);
  };
  const double s1 = std::max(sys.f1.norm(), (sys.A1 * u1).norm());
  const double s2 = std::max(sys.f2.norm(), (sys.A2 * u2).norm());
  const double s3 = std::max(sys.g1.norm(), (sys.B1 * u1).norm());
  const double s4 = std::max(sys.g2.norm(), (sys.B2 * u2).norm());
  const double s5 = std::max(op.r.norm(), (op.Ag_ff * ug).norm());
  return {rel(r1, std::max(s1, 1.0)), rel(r2, std::max(s2, 1.0)),
          rel(r3, std::max(s3, 1.0)), rel(r4, std::max(s4, 1.0)),
          rel(r5, std::max(s5, 1.0))};
}

Vec coupling_residual(const BlockSystem& sys, const SolutionFields& fields, int subdomain) {
  if (subdomain == 1) {
    Vec r = sys.B1_full * fields.u1 - sys.B1g_full * fields.u_gamma;
    if (sys.mode == CouplingMode::Robin) r += sys.alpha * (sys.C1 * fields.lambda1);
    return r;
  }
  Vec r = sys.B2_full * fields.u2 - sys.B2g_full * fields.u_gamma;
  if (sys.mode == CouplingMode::Robin) r += sys.alpha * (sys.C2 * fields.lambda2);
  return r;
}

}  // namespace gfet
