#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace gfet {

namespace {

// Locates each coarse node inside the fine grid; throws when not nested.
std::vector<int> nesting_map(const InterfaceGrid& coarse, const InterfaceGrid& fine) {
  std::vector<int> idx(coarse.node_count());
  const double tol = 1e-9 * std::max(1.0, fine.length());
  int j = 0;
  for (int i = 0; i < coarse.node_count(); ++i) {
    while (j < fine.node_count() && fine.nodes[j] < coarse.nodes[i] - tol) ++j;
    if (j >= fine.node_count() || std::abs(fine.nodes[j] - coarse.nodes[i]) > tol)
      throw AssemblyError("interface grids are not nested");
    idx[i] = j;
  }
  return idx;
}

double eval_p1_1d(const InterfaceGrid& grid, const Vec& nodal, double x) {
  const auto& nodes = grid.nodes;
  int j = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), x) - nodes.begin()) - 1;
  j = std::clamp(j, 0, grid.intervals() - 1);
  const double t = (x - nodes[j]) / grid.spacing(j);
  return nodal[j] + (nodal[j + 1] - nodal[j]) * t;
}

}  // namespace

NormTriple norm_interface(const InterfaceGrid& grid, const Vec& nodal) {
  NormTriple n;
  for (int j = 0; j < grid.intervals(); ++j) {
    const double h = grid.spacing(j);
    const double a = nodal[j], b = nodal[j + 1];
    n.l2 += h * (a * a + a * b + b * b) / 3.0;
    const double slope = (b - a) / h;
    n.h1semi += h * slope * slope;
  }
  n.h1 = n.l2 + n.h1semi;
  n.l2 = std::sqrt(n.l2);
  n.h1semi = std::sqrt(n.h1semi);
  n.h1 = std::sqrt(n.h1);
  return n;
}

NormTriple diff_interface(const InterfaceGrid& coarse_grid, const Vec& coarse,
                          const InterfaceGrid& fine_grid, const Vec& fine) {
  nesting_map(coarse_grid, fine_grid);  // validity check
  Vec diff(fine_grid.node_count());
  for (int j = 0; j < fine_grid.node_count(); ++j)
    diff[j] = eval_p1_1d(coarse_grid, coarse, fine_grid.nodes[j]) - fine[j];
  return norm_interface(fine_grid, diff);
}

double h1_error_interface(const InterfaceGrid& coarse_grid, const Vec& coarse,
                          const InterfaceGrid& fine_grid, const Vec& fine) {
  const NormTriple d = diff_interface(coarse_grid, coarse, fine_grid, fine);
  const NormTriple r = norm_interface(fine_grid, fine);
  if (r.h1 == 0.0) throw AssemblyError("h1_error_interface: zero reference norm");
  return d.h1 / r.h1;
}

NormTriple norm_2d(const Mesh2D& mesh, const Vec& nodal) {
  NormTriple n;
  for (const auto& tri : mesh.triangles) {
    const auto& p0 = mesh.vertices[tri[0]];
    const auto& p1 = mesh.vertices[tri[1]];
    const auto& p2 = mesh.vertices[tri[2]];
    const double area = triangle_area(p0, p1, p2);
    const double v0 = nodal[tri[0]], v1 = nodal[tri[1]], v2 = nodal[tri[2]];
    n.l2 += area / 6.0 * (v0 * v0 + v1 * v1 + v2 * v2 + v0 * v1 + v1 * v2 + v0 * v2);
    const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
    const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
    const double gx = (b[0] * v0 + b[1] * v1 + b[2] * v2) / (2.0 * area);
    const double gy = (c[0] * v0 + c[1] * v1 + c[2] * v2) / (2.0 * area);
    n.h1semi += area * (gx * gx + gy * gy);
  }
  n.h1 = n.l2 + n.h1semi;
  n.l2 = std::sqrt(n.l2);
  n.h1semi = std::sqrt(n.h1semi);
  n.h1 = std::sqrt(n.h1);
  return n;
}

namespace {

void check_nested_2d(const Mesh2D& coarse, const Mesh2D& fine) {
  if (fine.nx % coarse.nx != 0 || fine.ny % coarse.ny != 0)
    throw AssemblyError("2D meshes are not nested");
  auto pow2 = [](int k) { return (k & (k - 1)) == 0; };
  if (!pow2(fine.nx / coarse.nx) || !pow2(fine.ny / coarse.ny))
    throw AssemblyError("2D nesting ratios must be powers of two");
  if (coarse.subdomain_id != fine.subdomain_id)
    throw AssemblyError("2D error: subdomain mismatch");
}

}  // namespace

NormTriple diff_2d(const Mesh2D& coarse, const Vec& uc, const Mesh2D& fine, const Vec& uf) {
  check_nested_2d(coarse, fine);
  // Coarse values sampled at fine nodes; the difference of nodal interpolants
  // is then integrated exactly trianglewise. For equal x/y ratios the coarse
  // restriction is linear per fine triangle, making this the exact error.
  Vec diff(fine.vertex_count());
  for (int iy = 0; iy <= fine.ny; ++iy) {
    for (int ix = 0; ix <= fine.nx; ++ix) {
      const int v = fine.vertex_index(ix, iy);
      const auto& p = fine.vertices[v];
      diff[v] = coarse.eval_p1(uc, p.x(), p.y()) - uf[v];
    }
  }
  return norm_2d(fine, diff);
}

double h1_error_2d(const Mesh2D& coarse1, const Vec& u1c, const Mesh2D& coarse2, const Vec& u2c,
                   const Mesh2D& fine1, const Vec& u1f, const Mesh2D& fine2, const Vec& u2f) {
  const NormTriple d1 = diff_2d(coarse1, u1c, fine1, u1f);
  const NormTriple d2 = diff_2d(coarse2, u2c, fine2, u2f);
  const NormTriple r1 = norm_2d(fine1, u1f);
  const NormTriple r2 = norm_2d(fine2, u2f);
  const double num = std::sqrt(d1.h1 * d1.h1 + d2.h1 * d2.h1);
  const double den = std::sqrt(r1.h1 * r1.h1 + r2.h1 * r2.h1);
  if (den == 0.0) throw AssemblyError("h1_error_2d: zero reference norm");
  return num / den;
}

LinfRecord linf_error_2d(const Mesh2D& coarse1, const Vec& u1c, const Mesh2D& coarse2,
                         const Vec& u2c, const Mesh2D& fine1, const Vec& u1f,
                         const Mesh2D& fine2, const Vec& u2f) {
  check_nested_2d(coarse1, fine1);
  check_nested_2d(coarse2, fine2);
  LinfRecord rec;
  double max_ref = 0;
  auto scan = [&](const Mesh2D& coarse, const Vec& uc, const Mesh2D& fine, const Vec& uf) {
    for (int v = 0; v < fine.vertex_count(); ++v) {
      const auto& p = fine.vertices[v];
      const double d = std::abs(coarse.eval_p1(uc, p.x(), p.y()) - uf[v]);
      max_ref = std::max(max_ref, std::abs(uf[v]));
      if (d > rec.error) {
        rec.error = d;
        rec.argmax_x = p.x();
        rec.argmax_y = p.y();
      }
    }
  };
  scan(coarse1, u1c, fine1, u1f);
  scan(coarse2, u2c, fine2, u2f);
  if (max_ref == 0.0) throw AssemblyError("linf_error_2d: zero reference field");
  rec.error /= max_ref;
  return rec;
}

double convergence_slope(const std::vector<std::pair<double, double>>& h_and_error) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [h, e] : h_and_error) {
    if (e > 0.0 && h > 0.0) pts.emplace_back(std::log(h), std::log(e));
  }
  if (pts.size() < 3)
    throw AssemblyError("convergence_slope: need at least 3 nonzero records");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  const double mx = sx / pts.size(), my = sy / pts.size();
  double num = 0, den = 0;
  for (const auto& [x, y] : pts) {
    num += (x - mx) * (y - my);
    den += (x - mx) * (x - mx);
  }
  return num / den;
}

ErrorRecord compute_errors(const SelfConsistentResult& coarse, const Mesh2D& cmesh1,
                           const Mesh2D& cmesh2, const InterfaceGrid& cgrid, double h,
                           const SelfConsistentResult& ref, const Mesh2D& rmesh1,
                           const Mesh2D& rmesh2, const InterfaceGrid& rgrid) {
  ErrorRecord rec;
  rec.h = h;
  rec.E_1D = h1_error_interface(cgrid, coarse.state.u_gamma, rgrid, ref.state.u_gamma);
  rec.E_rho = h1_error_interface(cgrid, coarse.state.rho, rgrid, ref.state.rho);
  rec.E_2D = h1_error_2d(cmesh1, coarse.fields.u1, cmesh2, coarse.fields.u2, rmesh1,
                         ref.fields.u1, rmesh2, ref.fields.u2);
  const LinfRecord li = linf_error_2d(cmesh1, coarse.fields.u1, cmesh2, coarse.fields.u2,
                                      rmesh1, ref.fields.u1, rmesh2, ref.fields.u2);
  rec.E_Linf = li.error;
  rec.argmax_x = li.argmax_x;
  rec.argmax_y = li.argmax_y;
  return rec;
}

std::vector<IvRecord> extract_iv(const std::vector<SweepPoint>& sweep) {
  std::vector<IvRecord> records;
  records.reserve(sweep.size());
  for (const auto& p : sweep)
    records.push_back({p.V_DS, p.drain_current, p.J_constancy, p.gummel_iter});
  std::sort(records.begin(), records.end(),
            [](const IvRecord& a, const IvRecord& b) { return a.V_DS < b.V_DS; });
  return records;
}

}  // namespace gfet
