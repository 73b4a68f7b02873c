#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "core/config.hpp"

namespace gfet {

enum class BoundaryTag { DirichletSource, DirichletDrain, DirichletGate, Neumann, Interface };

// 1D partition of the interface gamma = (0, L) x {0}.
struct InterfaceGrid {
  std::vector<double> nodes;  // strictly increasing, first 0, last L

  int intervals() const { return static_cast<int>(nodes.size()) - 1; }
  int node_count() const { return static_cast<int>(nodes.size()); }
  double spacing(int i) const { return nodes[i + 1] - nodes[i]; }
  double length() const { return nodes.back() - nodes.front(); }
};

// Structured P1 triangulation of one oxide rectangle.
// Vertices are laid out row-major, index = iy*(nx+1)+ix, with iy=0 the lowest
// y row. Every grid cell is split along the bottom-left -> top-right diagonal,
// which keeps refinements by powers of two nested.
struct Mesh2D {
  int subdomain_id = 1;  // 1: upper oxide (0,l/2), 2: lower oxide (-l/2,0)
  int nx = 0, ny = 0;
  double length = 0, y_min = 0, y_max = 0;

  std::vector<Eigen::Vector2d> vertices;
  std::vector<std::array<int, 3>> triangles;  // positively oriented

  struct BoundaryEdge {
    int a, b;
    BoundaryTag tag;
  };
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> interface_node_ids;  // nodes on y = 0, ordered by x

  int vertex_index(int ix, int iy) const { return iy * (nx + 1) + ix; }
  int vertex_count() const { return static_cast<int>(vertices.size()); }
  double hx() const { return length / nx; }
  double hy() const { return (y_max - y_min) / ny; }

  // Exact point evaluation of a P1 nodal field (points snapped to the domain).
  double eval_p1(const Eigen::VectorXd& nodal, double x, double y) const;
};

Mesh2D build_subdomain_mesh(const DeviceConfig& cfg, int subdomain_id);
InterfaceGrid build_interface_grid(const DeviceConfig& cfg);
InterfaceGrid trace_partition(const Mesh2D& mesh);

// sqrt(1/Nx^2 + (l/L)^2 / Ny^2), the scaled triangle diameter of the study.
double scaled_mesh_diameter(const DeviceConfig& cfg);

double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c);

}  // namespace gfet
