#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/SparseCholesky>
#include <cmath>
#include <random>

#include "core/assembly.hpp"
#include "core/errors.hpp"
#include "core/system.hpp"

using namespace gfet;

namespace {

DeviceConfig make_cfg(int Nx, int Ny, int Ng = 8) {
  DeviceConfig cfg;
  cfg.Nx = Nx;
  cfg.Ny = Ny;
  cfg.N_gamma = Ng;
  return cfg;
}

InterfaceGrid uniform_grid(double length, int n) {
  InterfaceGrid g;
  for (int i = 0; i <= n; ++i) g.nodes.push_back(length * i / n);
  return g;
}

double max_asymmetry(const SpMat& A) {
  const SpMat D = SpMat(A - SpMat(A.transpose()));
  double scale = 0, diff = 0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it) diff = std::max(diff, std::abs(it.value()));
  return scale > 0 ? diff / scale : 0.0;
}

}  // namespace

TEST_CASE("single right-triangle element stiffness matches the closed form") {
  const double h = 0.7, eps = 2.5;
  Mesh2D tri;
  tri.nx = tri.ny = 1;
  tri.length = h;
  tri.y_min = 0;
  tri.y_max = h;
  tri.vertices = {{0, 0}, {h, 0}, {0, h}};
  tri.triangles = {{0, 1, 2}};
  const SpMat K = assemble_stiffness_2d(tri, eps);
  const double expected[3][3] = {{2, -1, -1}, {-1, 1, 0}, {-1, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(K.coeff(i, j) == doctest::Approx(eps / 2.0 * expected[i][j]).epsilon(1e-14));
}

TEST_CASE("2D stiffness has constants in its kernel and is symmetric") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(9, 5), 2);
  const SpMat A = assemble_stiffness_2d(m, 3.9);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(m.vertex_count());
  CHECK((A * ones).lpNorm<Eigen::Infinity>() <= 1e-13);
  CHECK(max_asymmetry(A) <= 1e-14);
}

TEST_CASE("patch test: boundary data g = x is reproduced exactly") {
  const Mesh2D m = build_subdomain_mesh(make_cfg(8, 4), 1);
  const SpMat A = assemble_stiffness_2d(m, 3.9);
  std::vector<char> constrained(m.vertex_count(), 0);
  Eigen::VectorXd values = Eigen::VectorXd::Zero(m.vertex_count());
  for (int iy = 0; iy <= m.ny; ++iy) {
    for (int ix = 0; ix <= m.nx; ++ix) {
      if (ix == 0 || ix == m.nx || iy == 0 || iy == m.ny) {
        const int v = m.vertex_index(ix, iy);
        constrained[v] = 1;
        values[v] = m.vertices[v].x();
      }
    }
  }
  const FieldMap map = make_field_map(constrained, values);
  SpMat A_ff, A_fc;
  split_square(A, map, A_ff, A_fc);
  Eigen::SimplicialLDLT<SpMat> ldlt(A_ff);
  const Eigen::VectorXd u_f = ldlt.solve(Eigen::VectorXd(-(A_fc * map.constrained_values)));
  const Eigen::VectorXd u = map.expand(u_f);
  for (int v = 0; v < m.vertex_count(); ++v)
    CHECK(u[v] == doctest::Approx(m.vertices[v].x()).epsilon(1e-12));
}

TEST_CASE("interface stiffness: tridiagonal rows (d eps/h)(-1, 2, -1)") {
  const InterfaceGrid g = uniform_grid(60.0, 3);  // h = 20, d*eps = 1
  const SpMat A = assemble_interface_stiffness(g, 0.5, 2.0);
  CHECK(A.coeff(1, 1) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(A.coeff(2, 2) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(A.coeff(1, 2) == doctest::Approx(-0.05).epsilon(1e-14));
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  CHECK((A * ones).lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("multiplier space: dimension and end-interval-constant basis") {
  const InterfaceGrid two = uniform_grid(60.0, 2);
  const MultiplierSpace m2 = build_multiplier_space(two);
  CHECK(m2.dof_count() == 1);
  for (double x : {0.0, 11.0, 30.0, 47.0, 60.0}) CHECK(m2.eval(0, x) == 1.0);

  const InterfaceGrid three = uniform_grid(60.0, 3);
  const MultiplierSpace m3 = build_multiplier_space(three);
  CHECK(m3.dof_count() == 2);
  CHECK(m3.eval(0, 5.0) == 1.0);                       // constant on e_0
  CHECK(m3.eval(0, 30.0) == doctest::Approx(0.5));     // decays on the middle interval
  CHECK(m3.eval(0, 45.0) == 0.0);                      // zero on e_L
  CHECK(m3.eval(1, 45.0) == 1.0);

  for (int n : {2, 3, 7, 16}) {
    const MultiplierSpace ms = build_multiplier_space(uniform_grid(60.0, n));
    CHECK(ms.dof_count() == n - 1);
    // partition of unity
    std::mt19937 rng(n);
    std::uniform_real_distribution<double> ux(0.0, 60.0);
    for (int k = 0; k < 50; ++k) {
      const double x = ux(rng);
      double sum = 0;
      for (int m = 0; m < ms.dof_count(); ++m) sum += ms.eval(m, x);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-13));
    }
  }

  InterfaceGrid one;
  one.nodes = {0.0, 60.0};
  CHECK_THROWS_AS(build_multiplier_space(one), AssemblyError);
}

TEST_CASE("trace coupling integrates multiplier basis against traces exactly") {
  DeviceConfig cfg = make_cfg(3, 2);
  cfg.L = 3.0;  // uniform 3-interval trace partition with h = 1
  cfg.x_j1 = 1.0;
  cfg.x_j2 = 2.0;
  const Mesh2D mesh = build_subdomain_mesh(cfg, 1);
  const MultiplierSpace mult = build_multiplier_space(trace_partition(mesh));
  const SpMat B = assemble_trace_coupling(mesh, mult);
  REQUIRE(B.rows() == 2);
  REQUIRE(B.cols() == mesh.vertex_count());

  // B * 1 = integrals of the multiplier basis; first dof: 1 (on e_0) + 1/2
  const Eigen::VectorXd integrals = B * Eigen::VectorXd::Ones(mesh.vertex_count());
  CHECK(integrals[0] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(integrals[1] == doctest::Approx(1.5).epsilon(1e-14));

  // columns of off-interface vertices vanish
  for (int k = 0; k < B.outerSize(); ++k) {
    for (SpMat::InnerIterator it(B, k); it; ++it)
      CHECK(mesh.vertices[it.col()].y() == 0.0);
  }

  DeviceConfig other = cfg;
  other.Nx = 4;
  const Mesh2D mesh4 = build_subdomain_mesh(other, 1);
  CHECK_THROWS_AS(assemble_trace_coupling(mesh4, mult), AssemblyError);
}

TEST_CASE("cross coupling on matching partitions equals the trace coupling") {
  DeviceConfig cfg = make_cfg(5, 2);
  const Mesh2D mesh = build_subdomain_mesh(cfg, 2);
  const MultiplierSpace mult = build_multiplier_space(trace_partition(mesh));
  const SpMat B = assemble_trace_coupling(mesh, mult);
  const SpMat Bg = assemble_cross_coupling(mult, trace_partition(mesh));
  for (int m = 0; m < mult.dof_count(); ++m) {
    for (int j = 0; j < Bg.cols(); ++j) {
      CHECK(Bg.coeff(m, j) ==
            doctest::Approx(B.coeff(m, mesh.interface_node_ids[j])).epsilon(1e-13));
    }
  }
}

TEST_CASE("cross coupling: constant multiplier against a finer grid") {
  const MultiplierSpace mult = build_multiplier_space(uniform_grid(60.0, 2));
  const InterfaceGrid grid = uniform_grid(60.0, 3);  // h = 20
  const SpMat Bg = assemble_cross_coupling(mult, grid);
  REQUIRE(Bg.rows() == 1);
  CHECK(Bg.coeff(0, 0) == doctest::Approx(10.0).epsilon(1e-13));
  CHECK(Bg.coeff(0, 1) == doctest::Approx(20.0).epsilon(1e-13));
  CHECK(Bg.coeff(0, 2) == doctest::Approx(20.0).epsilon(1e-13));
  CHECK(Bg.coeff(0, 3) == doctest::Approx(10.0).epsilon(1e-13));
}

TEST_CASE("cross coupling converges to the exact integral of a smooth density") {
  // oracle: int mu_m x(L-x) dx via exact antiderivatives of (a + b x) x (L - x)
  const double L = 60.0;
  const MultiplierSpace mult = build_multiplier_space(uniform_grid(L, 4));
  auto exact_piece = [&](double x0, double x1, double v0, double v1) {
    // mu(x) = v0 + (v1 - v0)(x - x0)/(x1 - x0); integrate mu * (L x - x^2)
    const double s = (v1 - v0) / (x1 - x0);
    const double a = v0 - s * x0;  // mu = a + s x
    auto F = [&](double x) {
      return a * (L * x * x / 2.0 - x * x * x / 3.0) +
             s * (L * x * x * x / 3.0 - x * x * x * x / 4.0);
    };
    return F(x1) - F(x0);
  };
  Eigen::VectorXd exact(mult.dof_count());
  for (int m = 0; m < mult.dof_count(); ++m) {
    double total = 0;
    for (int j = 0; j < mult.partition.intervals(); ++j) {
      double vl, vr;
      mult.interval_values(m, j, vl, vr);
      total += exact_piece(mult.partition.nodes[j], mult.partition.nodes[j + 1], vl, vr);
    }
    exact[m] = total;
  }

  auto error_at = [&](int n) {
    const InterfaceGrid g = uniform_grid(L, n);
    Eigen::VectorXd nodal(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) nodal[i] = g.nodes[i] * (L - g.nodes[i]);
    const SpMat Bg = assemble_cross_coupling(mult, g);
    return ((Bg * nodal) - exact).lpNorm<Eigen::Infinity>();
  };
  const double e40 = error_at(40), e80 = error_at(80);
  CHECK(e40 / e80 == doctest::Approx(4.0).epsilon(0.05));  // nodal interpolation is O(h^2)
}

TEST_CASE("multiplier mass: Gram matrix is SPD, tridiagonal, [L] for 2 intervals") {
  const MultiplierSpace m2 = build_multiplier_space(uniform_grid(60.0, 2));
  const SpMat C2 = assemble_multiplier_mass(m2);
  REQUIRE(C2.rows() == 1);
  CHECK(C2.coeff(0, 0) == doctest::Approx(60.0).epsilon(1e-14));

  const MultiplierSpace m8 = build_multiplier_space(uniform_grid(60.0, 8));
  const SpMat C = assemble_multiplier_mass(m8);
  CHECK(max_asymmetry(C) <= 1e-14);
  for (int k = 0; k < C.outerSize(); ++k)
    for (SpMat::InnerIterator it(C, k); it; ++it)
      CHECK(std::abs(it.row() - it.col()) <= 1);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> dist(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x(C.rows());
    for (int i = 0; i < x.size(); ++i) x[i] = dist(rng);
    if (x.norm() == 0) continue;
    CHECK(x.dot(Eigen::VectorXd(C * x)) > 0);
  }
}

TEST_CASE("interface load: constants, hats, and junction jumps") {
  const InterfaceGrid g = uniform_grid(60.0, 6);  // h = 10
  LinearFunctional1D constant{[](double) { return 2.5; }, 3, {}};
  const Vec lc = assemble_interface_load(g, constant);
  for (int j = 1; j < 6; ++j) CHECK(lc[j] == doctest::Approx(25.0).epsilon(1e-14));
  CHECK(lc[0] == doctest::Approx(12.5).epsilon(1e-14));

  // f = hat_2 reproduces the mass-matrix column: h/6 (1, 4, 1)
  LinearFunctional1D hat{[&](double x) {
                           const double t = std::abs(x - g.nodes[2]) / 10.0;
                           return t < 1.0 ? 1.0 - t : 0.0;
                         },
                         3,
                         {g.nodes[1], g.nodes[2], g.nodes[3]}};
  const Vec lh = assemble_interface_load(g, hat);
  CHECK(lh[1] == doctest::Approx(10.0 / 6.0).epsilon(1e-12));
  CHECK(lh[2] == doctest::Approx(40.0 / 6.0).epsilon(1e-12));
  CHECK(lh[3] == doctest::Approx(10.0 / 6.0).epsilon(1e-12));

  // piecewise constant with a jump on a node: entry = h (f- + f+) / 2
  LinearFunctional1D step{[&](double x) { return x < 30.0 ? 2.0 : 6.0; }, 3, {30.0}};
  const Vec ls = assemble_interface_load(g, step);
  CHECK(ls[3] == doctest::Approx(10.0 * (2.0 + 6.0) / 2.0).epsilon(1e-13));

  LinearFunctional1D bad{[](double) { return std::nan(""); }, 3, {}};
  CHECK_THROWS_AS(assemble_interface_load(g, bad), AssemblyError);

  // nonnegative densities give nonnegative loads
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> pos(0.0, 3.0);
  LinearFunctional1D noisy{[&](double) { return pos(rng); }, 3, {}};
  const Vec ln = assemble_interface_load(g, noisy);
  for (int i = 0; i < ln.size(); ++i) CHECK(ln[i] >= 0.0);
}

TEST_CASE("weighted interface mass with unit weight is the plain mass matrix") {
  const InterfaceGrid g = uniform_grid(60.0, 5);
  const SpMat M = assemble_weighted_interface_mass(g, Vec::Ones(6));
  const double h = 12.0;
  CHECK(M.coeff(2, 2) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-13));
  CHECK(M.coeff(2, 3) == doctest::Approx(h / 6.0).epsilon(1e-13));
  CHECK(M.coeff(0, 0) == doctest::Approx(h / 3.0).epsilon(1e-13));
}

TEST_CASE("cross-integration consistency for matching partitions") {
  // mu^T (B_i w - B^i_g v) = 0 whenever trace(w) = v on gamma
  DeviceConfig cfg = make_cfg(6, 3);
  const Mesh2D mesh = build_subdomain_mesh(cfg, 1);
  const InterfaceGrid trace = trace_partition(mesh);
  const MultiplierSpace mult = build_multiplier_space(trace);
  const SpMat B = assemble_trace_coupling(mesh, mult);
  const SpMat Bg = assemble_cross_coupling(mult, trace);

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> dist(-2, 2);
  Eigen::VectorXd w(mesh.vertex_count());
  for (int i = 0; i < w.size(); ++i) w[i] = dist(rng);
  Eigen::VectorXd v(trace.node_count());
  for (int j = 0; j < v.size(); ++j) v[j] = w[mesh.interface_node_ids[j]];
  CHECK(((B * w) - (Bg * v)).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("degenerate triangle raises an assembly error") {
  Mesh2D bad;
  bad.nx = bad.ny = 1;
  bad.length = 1;
  bad.y_min = 0;
  bad.y_max = 1;
  bad.vertices = {{0, 0}, {1, 0}, {2, 0}};
  bad.triangles = {{0, 1, 2}};
  CHECK_THROWS_AS(assemble_stiffness_2d(bad, 1.0), AssemblyError);
}
