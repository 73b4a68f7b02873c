#include "core/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace gfet {

namespace {

struct GaussRule {
  std::vector<double> points;   // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

GaussRule gauss_rule(int n) {
  GaussRule r;
  switch (n) {
    case 1:
      r.points = {0.5};
      r.weights = {1.0};
      break;
    case 2: {
      const double s = 0.5 / std::sqrt(3.0);
      r.points = {0.5 - s, 0.5 + s};
      r.weights = {0.5, 0.5};
      break;
    }
    case 3: {
      const double s = 0.5 * std::sqrt(3.0 / 5.0);
      r.points = {0.5 - s, 0.5, 0.5 + s};
      r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
      break;
    }
    default: {
      // 4-point Gauss-Legendre, exact to degree 7
      const double a = 0.5 * std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = 0.5 * std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 72.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 72.0;
      r.points = {0.5 - b, 0.5 - a, 0.5 + a, 0.5 + b};
      r.weights = {wb, wa, wa, wb};
      break;
    }
  }
  return r;
}

bool partitions_match(const InterfaceGrid& a, const InterfaceGrid& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  const double tol = 1e-12 * std::max(1.0, a.length());
  for (size_t i = 0; i < a.nodes.size(); ++i)
    if (std::abs(a.nodes[i] - b.nodes[i]) > tol) return false;
  return true;
}

}  // namespace

double integrate_product_p1(double h, double al, double ar, double bl, double br) {
  return h * (2.0 * al * bl + al * br + ar * bl + 2.0 * ar * br) / 6.0;
}

MultiplierSpace build_multiplier_space(const InterfaceGrid& partition) {
  if (partition.intervals() < 2)
    throw AssemblyError("multiplier space needs at least 2 intervals (space is empty otherwise)");
  return MultiplierSpace{partition};
}

void MultiplierSpace::interval_values(int m, int j, double& left, double& right) const {
  const int n = partition.intervals();
  if (j == 0) {
    left = right = (m == 0) ? 1.0 : 0.0;
    return;
  }
  if (j == n - 1) {
    left = right = (m == dof_count() - 1) ? 1.0 : 0.0;
    return;
  }
  left = (m + 1 == j) ? 1.0 : 0.0;
  right = (m + 1 == j + 1) ? 1.0 : 0.0;
}

double MultiplierSpace::eval(int m, double x) const {
  const auto& nodes = partition.nodes;
  const int n = partition.intervals();
  int j = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()) - 1;
  j = std::clamp(j, 0, n - 1);
  double vl, vr;
  interval_values(m, j, vl, vr);
  const double t = (x - nodes[j]) / (nodes[j + 1] - nodes[j]);
  return vl + (vr - vl) * t;
}

SpMat assemble_stiffness_2d(const Mesh2D& mesh, double eps) {
  if (!(eps > 0)) throw AssemblyError("assemble_stiffness_2d: eps must be positive");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 9);
  const double area_tol = 1e-14 * mesh.hx() * mesh.hy();
  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.vertices[tri[0]];
    const auto& p1 = mesh.vertices[tri[1]];
    const auto& p2 = mesh.vertices[tri[2]];
    const double area = triangle_area(p0, p1, p2);
    if (area <= area_tol) throw AssemblyError("degenerate triangle in stiffness assembly");
    const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
    const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tri[i], tri[j], eps * (b[i] * b[j] + c[i] * c[j]) / (4.0 * area));
  }
  SpMat A(mesh.vertex_count(), mesh.vertex_count());
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat assemble_interface_stiffness(const InterfaceGrid& grid, double d, double eps_par) {
  if (!(d > 0) || !(eps_par > 0))
    throw AssemblyError("assemble_interface_stiffness: d and eps_par must be positive");
  const int n = grid.node_count();
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * grid.intervals());
  for (int j = 0; j < grid.intervals(); ++j) {
    const double k = d * eps_par / grid.spacing(j);
    trips.emplace_back(j, j, k);
    trips.emplace_back(j + 1, j + 1, k);
    trips.emplace_back(j, j + 1, -k);
    trips.emplace_back(j + 1, j, -k);
  }
  SpMat A(n, n);
  A.setFromTriplets(trips.begin(), trips.end());
  return A;
}

SpMat assemble_trace_coupling(const Mesh2D& mesh, const MultiplierSpace& mult) {
  const InterfaceGrid trace = trace_partition(mesh);
  if (!partitions_match(mult.partition, trace))
    throw AssemblyError("assemble_trace_coupling: multiplier partition != trace partition");

  std::vector<Eigen::Triplet<double>> trips;
  const int n_int = trace.intervals();
  for (int j = 0; j < n_int; ++j) {
    const double h = trace.spacing(j);
    // interface hats with support on interval j: trace nodes j and j+1
    for (int m = std::max(0, j - 1); m <= std::min(mult.dof_count() - 1, j); ++m) {
      double ml, mr;
      mult.interval_values(m, j, ml, mr);
      if (ml == 0.0 && mr == 0.0) continue;
      // hat at trace node j: (1, 0); at node j+1: (0, 1)
      trips.emplace_back(m, mesh.interface_node_ids[j], integrate_product_p1(h, ml, mr, 1.0, 0.0));
      trips.emplace_back(m, mesh.interface_node_ids[j + 1], integrate_product_p1(h, ml, mr, 0.0, 1.0));
    }
  }
  SpMat B(mult.dof_count(), mesh.vertex_count());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

SpMat assemble_cross_coupling(const MultiplierSpace& mult, const InterfaceGrid& grid) {
  // Merge the two breakpoint sets; on each merged interval both factors are
  // linear, so the closed-form product integral is exact.
  const auto& pa = mult.partition.nodes;
  const auto& pb = grid.nodes;
  std::vector<double> merged;
  merged.reserve(pa.size() + pb.size());
  std::merge(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(merged));
  const double tol = 1e-12 * std::max(1.0, grid.length());
  merged.erase(std::unique(merged.begin(), merged.end(),
                           [&](double x, double y) { return std::abs(x - y) <= tol; }),
               merged.end());

  std::vector<Eigen::Triplet<double>> trips;
  int ja = 0, jb = 0;
  for (size_t s = 0; s + 1 < merged.size(); ++s) {
    const double x0 = merged[s], x1 = merged[s + 1];
    const double h = x1 - x0;
    const double xm = 0.5 * (x0 + x1);
    while (ja + 1 < static_cast<int>(pa.size()) - 1 && pa[ja + 1] <= xm) ++ja;
    while (jb + 1 < static_cast<int>(pb.size()) - 1 && pb[jb + 1] <= xm) ++jb;
    const double ta0 = (x0 - pa[ja]) / (pa[ja + 1] - pa[ja]);
    const double ta1 = (x1 - pa[ja]) / (pa[ja + 1] - pa[ja]);
    const double tb0 = (x0 - pb[jb]) / (pb[jb + 1] - pb[jb]);
    const double tb1 = (x1 - pb[jb]) / (pb[jb + 1] - pb[jb]);
    for (int m = std::max(0, ja - 1); m <= std::min(mult.dof_count() - 1, ja); ++m) {
      double ml, mr;
      mult.interval_values(m, ja, ml, mr);
      if (ml == 0.0 && mr == 0.0) continue;
      const double m0 = ml + (mr - ml) * ta0;
      const double m1 = ml + (mr - ml) * ta1;
      // grid hats with support here: nodes jb (falling) and jb+1 (rising)
      const double fall0 = 1.0 - tb0, fall1 = 1.0 - tb1;
      trips.emplace_back(m, jb, integrate_product_p1(h, m0, m1, fall0, fall1));
      trips.emplace_back(m, jb + 1, integrate_product_p1(h, m0, m1, tb0, tb1));
    }
  }
  SpMat B(mult.dof_count(), grid.node_count());
  B.setFromTriplets(trips.begin(), trips.end());
  return B;
}

SpMat assemble_multiplier_mass(const MultiplierSpace& mult) {
  const int n_int = mult.partition.intervals();
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < n_int; ++j) {
    const double h = mult.partition.spacing(j);
    for (int m = std::max(0, j - 1); m <= std::min(mult.dof_count() - 1, j); ++m) {
      double ml, mr;
      mult.interval_values(m, j, ml, mr);
      if (ml == 0.0 && mr == 0.0) continue;
      for (int k = m; k <= std::min(mult.dof_count() - 1, j); ++k) {
        double kl, kr;
        mult.interval_values(k, j, kl, kr);
        if (kl == 0.0 && kr == 0.0) continue;
        const double v = integrate_product_p1(h, ml, mr, kl, kr);
        trips.emplace_back(m, k, v);
        if (k != m) trips.emplace_back(k, m, v);
      }
    }
  }
  SpMat C(mult.dof_count(), mult.dof_count());
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

Vec assemble_interface_load(const InterfaceGrid& grid, const LinearFunctional1D& f) {
  const GaussRule rule = gauss_rule(f.quad_points);
  Vec load = Vec::Zero(grid.node_count());
  for (int j = 0; j < grid.intervals(); ++j) {
    const double a = grid.nodes[j], b = grid.nodes[j + 1];
    // split at interior breakpoints of f
    std::vector<double> cuts = {a};
    for (double br : f.breakpoints)
      if (br > a + 1e-14 * grid.length() && br < b - 1e-14 * grid.length()) cuts.push_back(br);
    std::sort(cuts.begin(), cuts.end());
    cuts.push_back(b);
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
      const double h = cuts[s + 1] - cuts[s];
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const double x = cuts[s] + h * rule.points[q];
        const double fx = f.f(x);
        if (!std::isfinite(fx)) throw AssemblyError("interface load: non-finite density value");
        const double t = (x - a) / (b - a);
        const double w = h * rule.weights[q] * fx;
        load[j] += w * (1.0 - t);
        load[j + 1] += w * t;
      }
    }
  }
  return load;
}

SpMat assemble_weighted_interface_mass(const InterfaceGrid& grid, const Vec& nodal_weight) {
  if (nodal_weight.size() != grid.node_count())
    throw AssemblyError("weighted interface mass: weight size mismatch");
  const GaussRule rule = gauss_rule(3);  // integrand cubic, exact
  std::vector<Eigen::Triplet<double>> trips;
  for (int j = 0; j < grid.intervals(); ++j) {
    const double h = grid.spacing(j);
    const double wl = nodal_weight[j], wr = nodal_weight[j + 1];
    double m00 = 0, m01 = 0, m11 = 0;
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double t = rule.points[q];
      const double w = (wl + (wr - wl) * t) * h * rule.weights[q];
      m00 += w * (1.0 - t) * (1.0 - t);
      m01 += w * (1.0 - t) * t;
      m11 += w * t * t;
    }
    trips.emplace_back(j, j, m00);
    trips.emplace_back(j, j + 1, m01);
    trips.emplace_back(j + 1, j, m01);
    trips.emplace_back(j + 1, j + 1, m11);
  }
  SpMat M(grid.node_count(), grid.node_count());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

}  // namespace gfet
