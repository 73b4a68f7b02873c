#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "core/errors.hpp"
#include "core/mesh.hpp"

using namespace gfet;

namespace {

DeviceConfig make_cfg(int Nx, int Ny, int Ng = 8) {
  DeviceConfig cfg;
  cfg.Nx = Nx;
  cfg.Ny = Ny;
  cfg.N_gamma = Ng;
  return cfg;
}

int count_tag(const Mesh2D& m, BoundaryTag tag) {
  int n = 0;
  for (const auto& e : m.boundary_edges)
    if (e.tag == tag) ++n;
  return n;
}

}  // namespace

TEST_CASE("smallest grid has 4 vertices, 2 triangles, 1 interface edge") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(1, 1), 1);
  CHECK(m.vertex_count() == 4);
  CHECK(m.triangles.size() == 2);
  CHECK(count_tag(m, BoundaryTag::Interface) == 1);
  CHECK(m.interface_node_ids.size() == 2);
}

TEST_CASE("vertex and triangle counts follow (Nx+1)(Ny+1) and 2 Nx Ny") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(60, 16), 2);
  CHECK(m.vertex_count() == 61 * 17);
  CHECK(m.vertex_count() == 1037);
  CHECK(m.triangles.size() == 1920);
}

TEST_CASE("triangles positively oriented and areas sum to L*l/2") {
  for (int sub : {1, 2}) {
    const Mesh2D m = build_subdomain_mesh(make_cfg(7, 5), sub);
    double total = 0;
    for (const auto& t : m.triangles) {
      const double a = triangle_area(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
      CHECK(a > 0);
      total += a;
    }
    CHECK(total == doctest::Approx(60.0 * 2.0).epsilon(1e-12));
  }
}

TEST_CASE("gate tagging uses the edge-midpoint rule") {
  DeviceConfig cfg = make_cfg(2, 1);
  cfg.x_G = 10.0;  // L = 60: midpoints 15 and 45 both inside (10, 50)
  const Mesh2D m = build_subdomain_mesh(cfg, 1);
  CHECK(count_tag(m, BoundaryTag::DirichletGate) == 2);
  CHECK(count_tag(m, BoundaryTag::Neumann) == 0);

  DeviceConfig cfg2 = make_cfg(6, 1);
  cfg2.x_G = 10.0;  // midpoints 5,15,25,35,45,55: 5 and 55 outside
  const Mesh2D m2 = build_subdomain_mesh(cfg2, 1);
  CHECK(count_tag(m2, BoundaryTag::DirichletGate) == 4);
  CHECK(count_tag(m2, BoundaryTag::Neumann) == 2);
}

TEST_CASE("every boundary edge carries exactly one tag and verticals are Dirichlet") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(6, 3), 1);
  CHECK(m.boundary_edges.size() == static_cast<size_t>(2 * 6 + 2 * 3));
  CHECK(count_tag(m, BoundaryTag::DirichletSource) == 3);
  CHECK(count_tag(m, BoundaryTag::DirichletDrain) == 3);
  // interface edges never touch the Neumann tag (gamma closure is Dirichlet-bounded)
  for (const auto& e : m.boundary_edges) {
    const bool vertical = m.vertices[e.a].x() == m.vertices[e.b].x();
    if (vertical)
      CHECK((e.tag == BoundaryTag::DirichletSource || e.tag == BoundaryTag::DirichletDrain));
  }
}

TEST_CASE("interface grid examples") {
  DeviceConfig cfg = make_cfg(4, 2, 3);
  const InterfaceGrid g = build_interface_grid(cfg);
  REQUIRE(g.node_count() == 4);
  CHECK(g.nodes[0] == 0.0);
  CHECK(g.nodes[1] == doctest::Approx(20.0));
  CHECK(g.nodes[2] == doctest::Approx(40.0));
  CHECK(g.nodes[3] == 60.0);

  cfg.N_gamma = 240;
  const InterfaceGrid g2 = build_interface_grid(cfg);
  CHECK(g2.node_count() == 241);
  CHECK(g2.spacing(100) == doctest::Approx(0.25));

  cfg.N_gamma = 2;
  const InterfaceGrid g3 = build_interface_grid(cfg);
  CHECK(g3.nodes[1] == doctest::Approx(30.0));

  cfg.N_gamma = 1;
  CHECK_THROWS_AS(build_interface_grid(cfg), ConfigError);
}

TEST_CASE("trace partition matches mesh interface nodes for both subdomains") {
  const DeviceConfig cfg = make_cfg(60, 4);
  const InterfaceGrid t1 = trace_partition(build_subdomain_mesh(cfg, 1));
  const InterfaceGrid t2 = trace_partition(build_subdomain_mesh(cfg, 2));
  REQUIRE(t1.node_count() == 61);
  CHECK(t1.spacing(13) == doctest::Approx(1.0));
  for (int i = 0; i < t1.node_count(); ++i) CHECK(t1.nodes[i] == t2.nodes[i]);

  const InterfaceGrid t3 = trace_partition(build_subdomain_mesh(make_cfg(4, 2), 1));
  CHECK(t3.node_count() == 5);
}

TEST_CASE("scaled mesh diameter formula") {
  CHECK(scaled_mesh_diameter(make_cfg(60, 16)) == doctest::Approx(1.7180e-2).epsilon(1e-3));
  CHECK(scaled_mesh_diameter(make_cfg(120, 32)) ==
        doctest::Approx(0.5 * scaled_mesh_diameter(make_cfg(60, 16))).epsilon(1e-12));
  DeviceConfig sq = make_cfg(1, 1);
  sq.l = sq.L;
  CHECK(scaled_mesh_diameter(sq) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("refined meshes are nested and coarse fields are linear per fine triangle") {
  const Mesh2D coarse = build_subdomain_mesh(make_cfg(6, 4), 1);
  const Mesh2D fine = build_subdomain_mesh(make_cfg(12, 8), 1);

  // every coarse vertex appears bitwise in the fine mesh
  for (int iy = 0; iy <= coarse.ny; ++iy) {
    for (int ix = 0; ix <= coarse.nx; ++ix) {
      const auto& pc = coarse.vertices[coarse.vertex_index(ix, iy)];
      const auto& pf = fine.vertices[fine.vertex_index(2 * ix, 2 * iy)];
      CHECK(pc.x() == pf.x());
      CHECK(pc.y() == pf.y());
    }
  }

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1, 1);
  Eigen::VectorXd nodal(coarse.vertex_count());
  for (int i = 0; i < nodal.size(); ++i) nodal[i] = dist(rng);
  for (const auto& t : fine.triangles) {
    const auto& p0 = fine.vertices[t[0]];
    const auto& p1 = fine.vertices[t[1]];
    const auto& p2 = fine.vertices[t[2]];
    const double cx = (p0.x() + p1.x() + p2.x()) / 3.0;
    const double cy = (p0.y() + p1.y() + p2.y()) / 3.0;
    const double mean = (coarse.eval_p1(nodal, p0.x(), p0.y()) +
                         coarse.eval_p1(nodal, p1.x(), p1.y()) +
                         coarse.eval_p1(nodal, p2.x(), p2.y())) / 3.0;
    CHECK(coarse.eval_p1(nodal, cx, cy) == doctest::Approx(mean).epsilon(1e-12));
  }
}

TEST_CASE("eval_p1 reproduces affine fields exactly") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(5, 3), 2);
  Eigen::VectorXd nodal(m.vertex_count());
  for (int v = 0; v < m.vertex_count(); ++v)
    nodal[v] = 0.3 + 1.7 * m.vertices[v].x() - 0.9 * m.vertices[v].y();
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ux(0, 60), uy(-2, 0);
  for (int k = 0; k < 200; ++k) {
    const double x = ux(rng), y = uy(rng);
    CHECK(m.eval_p1(nodal, x, y) == doctest::Approx(0.3 + 1.7 * x - 0.9 * y).epsilon(1e-12));
  }
}

TEST_CASE("invalid grid counts are rejected") {
  DeviceConfig cfg = make_cfg(0, 4);
  CHECK_THROWS_AS(build_subdomain_mesh(cfg, 1), ConfigError);
  CHECK_THROWS_AS(build_subdomain_mesh(make_cfg(4, 4), 3), ConfigError);
}

TEST_CASE("triangulation is conforming: interior edges shared twice, boundary once") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(5, 3), 1);
  std::map<std::pair<int, int>, int> edge_count;
  auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
  for (const auto& t : m.triangles) {
    for (int e = 0; e < 3; ++e) ++edge_count[key(t[e], t[(e + 1) % 3])];
  }
  std::set<std::pair<int, int>> boundary;
  for (const auto& e : m.boundary_edges) {
    CHECK(boundary.insert(key(e.a, e.b)).second);  // exactly one tag per edge
  }
  for (const auto& [edge, count] : edge_count) {
    CHECK(count <= 2);
    if (count == 1) CHECK(boundary.count(edge) == 1);
    if (count == 2) CHECK(boundary.count(edge) == 0);
  }
}
