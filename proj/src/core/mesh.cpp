#include "core/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace gfet {

double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

Mesh2D build_subdomain_mesh(const DeviceConfig& cfg, int subdomain_id) {
  if (cfg.Nx < 1 || cfg.Ny < 1) throw ConfigError("build_subdomain_mesh: Nx and Ny must be >= 1");
  if (subdomain_id != 1 && subdomain_id != 2)
    throw ConfigError("build_subdomain_mesh: subdomain_id must be 1 or 2");

  Mesh2D m;
  m.subdomain_id = subdomain_id;
  m.nx = cfg.Nx;
  m.ny = cfg.Ny;
  m.length = cfg.L;
  const double half = cfg.l / 2.0;
  m.y_min = (subdomain_id == 1) ? 0.0 : -half;
  m.y_max = (subdomain_id == 1) ? half : 0.0;

  m.vertices.resize(static_cast<size_t>(m.nx + 1) * (m.ny + 1));
  for (int iy = 0; iy <= m.ny; ++iy) {
    // Evaluated as scale*(index/count) so that nested refinements produce
    // bitwise identical coordinates.
    const double fy = static_cast<double>(iy) / m.ny;
    const double y = (subdomain_id == 1) ? half * fy : half * (fy - 1.0);
    for (int ix = 0; ix <= m.nx; ++ix) {
      const double x = cfg.L * (static_cast<double>(ix) / m.nx);
      m.vertices[m.vertex_index(ix, iy)] = Eigen::Vector2d(x, y);
    }
  }

  m.triangles.reserve(static_cast<size_t>(2) * m.nx * m.ny);
  for (int iy = 0; iy < m.ny; ++iy) {
    for (int ix = 0; ix < m.nx; ++ix) {
      const int v00 = m.vertex_index(ix, iy);
      const int v10 = m.vertex_index(ix + 1, iy);
      const int v01 = m.vertex_index(ix, iy + 1);
      const int v11 = m.vertex_index(ix + 1, iy + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }

  // Gate tie-break: an outer horizontal edge is DirichletGate iff its midpoint
  // lies strictly inside (x_G, L - x_G).
  auto horizontal_tag = [&](int ix) {
    const double mid = cfg.L * (ix + 0.5) / m.nx;
    return (mid > cfg.x_G && mid < cfg.L - cfg.x_G) ? BoundaryTag::DirichletGate
                                                    : BoundaryTag::Neumann;
  };

  const int iy_interface = (subdomain_id == 1) ? 0 : m.ny;
  const int iy_outer = (subdomain_id == 1) ? m.ny : 0;
  for (int ix = 0; ix < m.nx; ++ix) {
    m.boundary_edges.push_back({m.vertex_index(ix, iy_interface),
                                m.vertex_index(ix + 1, iy_interface),
                                BoundaryTag::Interface});
    m.boundary_edges.push_back({m.vertex_index(ix, iy_outer),
                                m.vertex_index(ix + 1, iy_outer), horizontal_tag(ix)});
  }
  for (int iy = 0; iy < m.ny; ++iy) {
    m.boundary_edges.push_back({m.vertex_index(0, iy), m.vertex_index(0, iy + 1),
                                BoundaryTag::DirichletSource});
    m.boundary_edges.push_back({m.vertex_index(m.nx, iy), m.vertex_index(m.nx, iy + 1),
                                BoundaryTag::DirichletDrain});
  }

  m.interface_node_ids.resize(m.nx + 1);
  for (int ix = 0; ix <= m.nx; ++ix) m.interface_node_ids[ix] = m.vertex_index(ix, iy_interface);
  return m;
}

InterfaceGrid build_interface_grid(const DeviceConfig& cfg) {
  if (cfg.N_gamma < 2)
    throw ConfigError("build_interface_grid: N_gamma must be >= 2 (no interior unknown otherwise)");
  InterfaceGrid g;
  g.nodes.resize(cfg.N_gamma + 1);
  for (int i = 0; i <= cfg.N_gamma; ++i)
    g.nodes[i] = cfg.L * (static_cast<double>(i) / cfg.N_gamma);
  return g;
}

InterfaceGrid trace_partition(const Mesh2D& mesh) {
  InterfaceGrid g;
  g.nodes.reserve(mesh.interface_node_ids.size());
  for (int id : mesh.interface_node_ids) g.nodes.push_back(mesh.vertices[id].x());
  return g;
}

double scaled_mesh_diameter(const DeviceConfig& cfg) {
  const double rx = 1.0 / (static_cast<double>(cfg.Nx) * cfg.Nx);
  const double ratio = cfg.l / cfg.L;
  const double ry = ratio * ratio / (static_cast<double>(cfg.Ny) * cfg.Ny);
  return std::sqrt(rx + ry);
}

double Mesh2D::eval_p1(const Eigen::VectorXd& nodal, double x, double y) const {
  const double fx = (x - 0.0) / hx();
  const double fy = (y - y_min) / hy();
  int ix = std::clamp(static_cast<int>(std::floor(fx)), 0, nx - 1);
  int iy = std::clamp(static_cast<int>(std::floor(fy)), 0, ny - 1);
  const double xi = std::clamp(fx - ix, 0.0, 1.0);
  const double eta = std::clamp(fy - iy, 0.0, 1.0);
  const int v00 = vertex_index(ix, iy);
  const int v10 = vertex_index(ix + 1, iy);
  const int v01 = vertex_index(ix, iy + 1);
  const int v11 = vertex_index(ix + 1, iy + 1);
  if (eta <= xi) {
    // lower triangle (v00, v10, v11): u = u00 + (u10-u00)*xi + (u11-u10)*eta
    return nodal[v00] + (nodal[v10] - nodal[v00]) * xi + (nodal[v11] - nodal[v10]) * eta;
  }
  // upper triangle (v00, v11, v01)
  return nodal[v00] + (nodal[v11] - nodal[v01]) * xi + (nodal[v01] - nodal[v00]) * eta;
}

}  // namespace gfet
