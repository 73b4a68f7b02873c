#include "core/transmission.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/constants.hpp"
#include "core/errors.hpp"

namespace gfet {

double smoothed_delta(double y, double a) {
  if (!(a > 0)) throw AssemblyError("smoothed_delta: width must be positive");
  const double t = y / a;
  return std::exp(-t * t) / (a * std::sqrt(M_PI));
}

namespace {

// y levels for the upper half (0, l/2]:
//  - uniform a/2 spacing through |y| <= 3a,
//  - geometric growth (ratio <= 1.3) rescaled to land exactly on d/2,
//  - geometric growth capped at l/(2*ny_outer), uniform tail to l/2.
std::vector<double> upper_levels(const DeviceConfig& cfg) {
  const double a = cfg.smoothing_a;
  const double d2 = cfg.d / 2.0;
  const double l2 = cfg.l / 2.0;
  const double refine = cfg.trans_y_refine;
  const double h_cap = l2 / cfg.trans_Ny_outer / refine;
  std::vector<double> ys;

  const double r1_top = std::min(3.0 * a, d2);
  const int n1 =
      std::max(1, static_cast<int>(std::ceil(refine * r1_top / (a / 2.0) - 1e-12)));
  for (int i = 1; i <= n1; ++i) ys.push_back(r1_top * i / n1);

  double h_last = r1_top / n1;
  if (d2 > r1_top + 1e-12) {
    const double rem = d2 - r1_top;
    std::vector<double> steps;
    double h = h_last, sum = 0;
    while (sum < rem) {
      h = std::min(h * 1.3, rem);
      steps.push_back(h);
      sum += h;
    }
    const double scale = rem / sum;
    double y = r1_top;
    for (size_t i = 0; i < steps.size(); ++i) {
      y = (i + 1 == steps.size()) ? d2 : y + steps[i] * scale;
      ys.push_back(y);
    }
    h_last = steps.back() * scale;
  }

  // region above the strip
  {
    const double rem = l2 - d2;
    std::vector<double> steps;
    double h = h_last, sum = 0;
    while (sum < rem) {
      h = std::min(h * 1.3, h_cap);
      if (sum + h > rem) h = rem - sum;
      steps.push_back(h);
      sum += h;
    }
    double y = d2;
    for (size_t i = 0; i < steps.size(); ++i) {
      y = (i + 1 == steps.size()) ? l2 : y + steps[i];
      ys.push_back(y);
    }
  }
  return ys;
}

}  // namespace

StripMesh build_strip_mesh(const DeviceConfig& cfg) {
  cfg.validate();
  StripMesh m;
  m.L = cfg.L;
  m.l = cfg.l;
  m.d = cfg.d;

  m.xs.resize(cfg.trans_Nx + 1);
  for (int i = 0; i <= cfg.trans_Nx; ++i)
    m.xs[i] = cfg.L * (static_cast<double>(i) / cfg.trans_Nx);

  const std::vector<double> up = upper_levels(cfg);
  m.ys.reserve(2 * up.size() + 1);
  for (auto it = up.rbegin(); it != up.rend(); ++it) m.ys.push_back(-*it);
  m.midline_iy = static_cast<int>(m.ys.size());
  m.ys.push_back(0.0);
  for (double y : up) m.ys.push_back(y);

  const int nx = m.nx(), ny = m.ny();
  m.triangles.reserve(static_cast<size_t>(2) * nx * ny);
  m.tri_eps.reserve(m.triangles.capacity());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int v00 = m.vertex_index(ix, iy);
      const int v10 = m.vertex_index(ix + 1, iy);
      const int v01 = m.vertex_index(ix, iy + 1);
      const int v11 = m.vertex_index(ix + 1, iy + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
      // tensor by centroid: strip rows never straddle +-d/2 (node lines there)
      for (int t = 0; t < 2; ++t) {
        const auto& tri = m.triangles[m.triangles.size() - 2 + t];
        const double yc = (m.y_of(tri[0]) + m.y_of(tri[1]) + m.y_of(tri[2])) / 3.0;
        if (std::abs(yc) < cfg.d / 2.0)
          m.tri_eps.emplace_back(cfg.eps_par, cfg.eps_perp);
        else
          m.tri_eps.emplace_back(cfg.eps_ox, cfg.eps_ox);
      }
    }
  }
  return m;
}

double StripMesh::eval(const Eigen::VectorXd& nodal, double x, double y) const {
  const int nxc = nx();
  const double hx = xs[1] - xs[0];
  int ix = std::clamp(static_cast<int>(std::floor(x / hx)), 0, nxc - 1);
  int iy = static_cast<int>(std::upper_bound(ys.begin(), ys.end(), y) - ys.begin()) - 1;
  iy = std::clamp(iy, 0, ny() - 1);
  const double xi = std::clamp((x - xs[ix]) / (xs[ix + 1] - xs[ix]), 0.0, 1.0);
  const double eta = std::clamp((y - ys[iy]) / (ys[iy + 1] - ys[iy]), 0.0, 1.0);
  const int v00 = vertex_index(ix, iy);
  const int v10 = vertex_index(ix + 1, iy);
  const int v01 = vertex_index(ix, iy + 1);
  const int v11 = vertex_index(ix + 1, iy + 1);
  if (eta <= xi)
    return nodal[v00] + (nodal[v10] - nodal[v00]) * xi + (nodal[v11] - nodal[v10]) * eta;
  return nodal[v00] + (nodal[v11] - nodal[v01]) * xi + (nodal[v01] - nodal[v00]) * eta;
}

SpMat assemble_strip_stiffness(const StripMesh& mesh,
                               const std::vector<std::pair<double, double>>* tensors) {
  const auto& eps = tensors ? *tensors : mesh.tri_eps;
  if (eps.size() != mesh.triangles.size())
    throw AssemblyError("strip stiffness: tensor list size mismatch");
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 9);
  for (size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const Eigen::Vector2d p0(mesh.x_of(tri[0]), mesh.y_of(tri[0]));
    const Eigen::Vector2d p1(mesh.x_of(tri[1]), mesh.y_of(tri[1]));
    const Eigen::Vector2d p2(mesh.x_of(tri[2]), mesh.y_of(tri[2]));
    const double area = triangle_area(p0, p1, p2);
    if (area <= 0) throw AssemblyError("strip stiffness: degenerate triangle");
    const double b[3] = {p1.y() - p2.y(), p2.y() - p0.y(), p0.y() - p1.y()};
    const double c[3] = {p2.x() - p1.x(), p0.x() - p2.x(), p1.x() - p0.x()};
    const auto [ex, ey] = eps[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trips.emplace_back(tri[i], tri[j],
                           (ex * b[i] * b[j] + ey * c[i] * c[j]) / (4.0 * area));
  }
  SpMat K(mesh.vertex_count(), mesh.vertex_count());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

TransmissionSolver::TransmissionSolver(const DeviceConfig& cfg)
    : cfg_(cfg), mesh_(build_strip_mesh(cfg)) {
  xgrid_.nodes = mesh_.xs;
  K_full_ = assemble_strip_stiffness(mesh_);

  // Dirichlet tagging: full vertical edges carry V_S / V_D, outer horizontal
  // edges carry V_G iff the edge midpoint is strictly inside (x_G, L - x_G).
  const int nx = mesh_.nx(), ny = mesh_.ny();
  dirichlet_.assign(mesh_.vertex_count(), 0);
  // slot factors: 1 -> V_S, 2 -> V_D, 3 -> V_G (checked for conflicts)
  std::vector<int> slot(mesh_.vertex_count(), 0);
  auto impose = [&](int v, int s) {
    if (slot[v] != 0 && slot[v] != s)
      throw AssemblyError("transmission mesh: conflicting Dirichlet tags at a node");
    slot[v] = s;
    dirichlet_[v] = 1;
  };
  for (int iy = 0; iy <= ny; ++iy) {
    impose(mesh_.vertex_index(0, iy), 1);
    impose(mesh_.vertex_index(nx, iy), 2);
  }
  for (int ix = 0; ix < nx; ++ix) {
    const double mid = 0.5 * (mesh_.xs[ix] + mesh_.xs[ix + 1]);
    if (mid > cfg.x_G && mid < cfg.L - cfg.x_G) {
      for (int iy : {0, ny}) {
        for (int dx : {0, 1}) {
          const int v = mesh_.vertex_index(ix + dx, iy);
          if (slot[v] == 1 || slot[v] == 2) continue;  // corners keep S/D
          impose(v, 3);
        }
      }
    }
  }
  dirichlet_scaled_ = Vec::Zero(mesh_.vertex_count());
  for (int v = 0; v < mesh_.vertex_count(); ++v) dirichlet_scaled_[v] = slot[v];

  free_of_full_.assign(mesh_.vertex_count(), -1);
  for (int v = 0; v < mesh_.vertex_count(); ++v) {
    if (!dirichlet_[v]) {
      free_of_full_[v] = static_cast<int>(full_of_free_.size());
      full_of_free_.push_back(v);
    }
  }

  // split K into ff / fc
  {
    std::vector<Eigen::Triplet<double>> ff, fc;
    for (int k = 0; k < K_full_.outerSize(); ++k) {
      for (SpMat::InnerIterator it(K_full_, k); it; ++it) {
        const int r = free_of_full_[it.row()];
        if (r < 0) continue;
        const int c = free_of_full_[it.col()];
        if (c >= 0)
          ff.emplace_back(r, c, it.value());
        else
          fc.emplace_back(r, static_cast<int>(it.col()), it.value());
      }
    }
    K_ff_.resize(static_cast<int>(full_of_free_.size()), static_cast<int>(full_of_free_.size()));
    K_ff_.setFromTriplets(ff.begin(), ff.end());
    K_fc_.resize(static_cast<int>(full_of_free_.size()), mesh_.vertex_count());
    K_fc_.setFromTriplets(fc.begin(), fc.end());
  }

  // bulk / midline partition of the free dofs
  pos_in_block_.assign(full_of_free_.size(), -1);
  for (int f = 0; f < static_cast<int>(full_of_free_.size()); ++f) {
    const int v = full_of_free_[f];
    const int iy = v / (nx + 1);
    if (iy == mesh_.midline_iy) {
      pos_in_block_[f] = static_cast<int>(midline_free_.size());
      midline_free_.push_back(f);
    } else {
      pos_in_block_[f] = static_cast<int>(bulk_free_.size());
      bulk_free_.push_back(f);
    }
  }

  std::vector<char> is_mid(full_of_free_.size(), 0);
  for (int f : midline_free_) is_mid[f] = 1;
  std::vector<Eigen::Triplet<double>> bb, bm, mb, mm;
  for (int k = 0; k < K_ff_.outerSize(); ++k) {
    for (SpMat::InnerIterator it(K_ff_, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (!is_mid[r] && !is_mid[c]) bb.emplace_back(pos_in_block_[r], pos_in_block_[c], it.value());
      else if (!is_mid[r]) bm.emplace_back(pos_in_block_[r], pos_in_block_[c], it.value());
      else if (!is_mid[c]) mb.emplace_back(pos_in_block_[r], pos_in_block_[c], it.value());
      else mm.emplace_back(pos_in_block_[r], pos_in_block_[c], it.value());
    }
  }
  const int nb = static_cast<int>(bulk_free_.size());
  const int nm = static_cast<int>(midline_free_.size());
  K_bb_.resize(nb, nb);
  K_bb_.setFromTriplets(bb.begin(), bb.end());
  K_bm_.resize(nb, nm);
  K_bm_.setFromTriplets(bm.begin(), bm.end());
  K_mb_.resize(nm, nb);
  K_mb_.setFromTriplets(mb.begin(), mb.end());
  K_mm_.resize(nm, nm);
  K_mm_.setFromTriplets(mm.begin(), mm.end());

  K_bb_fact_.compute(K_bb_);
  if (K_bb_fact_.info() != Eigen::Success)
    throw SolverError("transmission: bulk factorization failed");

  // dense midline Schur complement, formed in column chunks
  T_mid_ = Eigen::MatrixXd(K_mm_);
  const Eigen::MatrixXd Bm = Eigen::MatrixXd(K_bm_);
  constexpr int chunk = 64;
  for (int c0 = 0; c0 < nm; c0 += chunk) {
    const int w = std::min(chunk, nm - c0);
    const Eigen::MatrixXd X = K_bb_fact_.solve(Bm.middleCols(c0, w));
    T_mid_.middleCols(c0, w) -= K_mb_ * X;
  }
}

Vec TransmissionSolver::boundary_values(double V_S, double V_D) const {
  Vec u = Vec::Zero(mesh_.vertex_count());
  for (int v = 0; v < mesh_.vertex_count(); ++v) {
    switch (static_cast<int>(dirichlet_scaled_[v])) {
      case 1: u[v] = V_S; break;
      case 2: u[v] = V_D; break;
      case 3: u[v] = cfg_.V_G; break;
      default: break;
    }
  }
  return u;
}

Vec TransmissionSolver::assemble_load(const Vec& rho_nodal) const {
  // int s (N_dop - rho)(x) g_a(y) phi dx dy with a degree-4 triangle rule.
  static const double w1 = 0.223381589678011, w2 = 0.109951743655322;
  static const double a1 = 0.445948490915965, a2 = 0.091576213509771;
  static const double bary[6][3] = {
      {1 - 2 * a1, a1, a1}, {a1, 1 - 2 * a1, a1}, {a1, a1, 1 - 2 * a1},
      {1 - 2 * a2, a2, a2}, {a2, 1 - 2 * a2, a2}, {a2, a2, 1 - 2 * a2}};
  static const double wq[6] = {w1, w1, w1, w2, w2, w2};

  const double s = constants::source_scale();
  const double cutoff = 14.0 * cfg_.smoothing_a;
  const double hx = mesh_.xs[1] - mesh_.xs[0];
  Vec load = Vec::Zero(mesh_.vertex_count());
  for (size_t t = 0; t < mesh_.triangles.size(); ++t) {
    const auto& tri = mesh_.triangles[t];
    double ymin = 1e300, ymax = -1e300;
    for (int i = 0; i < 3; ++i) {
      ymin = std::min(ymin, mesh_.y_of(tri[i]));
      ymax = std::max(ymax, mesh_.y_of(tri[i]));
    }
    if (ymin > cutoff || ymax < -cutoff) continue;
    const Eigen::Vector2d p[3] = {{mesh_.x_of(tri[0]), mesh_.y_of(tri[0])},
                                  {mesh_.x_of(tri[1]), mesh_.y_of(tri[1])},
                                  {mesh_.x_of(tri[2]), mesh_.y_of(tri[2])}};
    const double area = triangle_area(p[0], p[1], p[2]);
    for (int q = 0; q < 6; ++q) {
      const double x = bary[q][0] * p[0].x() + bary[q][1] * p[1].x() + bary[q][2] * p[2].x();
      const double y = bary[q][0] * p[0].y() + bary[q][1] * p[1].y() + bary[q][2] * p[2].y();
      // P1 interpolation of rho on the uniform x grid
      int ix = std::clamp(static_cast<int>(std::floor(x / hx)), 0, mesh_.nx() - 1);
      const double tx = (x - mesh_.xs[ix]) / hx;
      const double rho = rho_nodal[ix] + (rho_nodal[ix + 1] - rho_nodal[ix]) * tx;
      const double f = s * (cfg_.doping_at(x) - rho) * smoothed_delta(y, cfg_.smoothing_a);
      const double wa = wq[q] * area * f;
      for (int i = 0; i < 3; ++i) load[tri[i]] += wa * bary[q][i];
    }
  }
  return load;
}

Vec TransmissionSolver::solve_given(const Vec& load_full, const Vec& u_mid_prev,
                                    const SpMat* Mw1d, double V_S, double V_D) const {
  const int nb = static_cast<int>(bulk_free_.size());
  const int nm = static_cast<int>(midline_free_.size());
  const Vec uc = boundary_values(V_S, V_D);

  Vec b_free(full_of_free_.size());
  for (size_t f = 0; f < full_of_free_.size(); ++f) b_free[f] = load_full[full_of_free_[f]];
  b_free -= K_fc_ * uc;

  Vec b_b(nb), b_m(nm);
  for (int i = 0; i < nb; ++i) b_b[i] = b_free[bulk_free_[i]];
  for (int i = 0; i < nm; ++i) b_m[i] = b_free[midline_free_[i]];

  Eigen::MatrixXd S = T_mid_;
  Vec rhs = b_m - K_mb_ * K_bb_fact_.solve(b_b);
  if (Mw1d) {
    // midline-lumped linearization: LHS += Mw (interior), RHS += Mw * u_prev
    const int nxn = mesh_.nx() + 1;
    Vec mw_u = *Mw1d * u_mid_prev;
    // interior midline nodes are x-index 1..nx-1; free index i <-> x-index i+1
    for (int i = 0; i < nm; ++i) rhs[i] += mw_u[i + 1];
    // subtract the constrained-column contribution of u^{k+1} endpoints
    Vec bc = Vec::Zero(nxn);
    bc[0] = V_S;
    bc[nxn - 1] = V_D;
    Vec mw_bc = *Mw1d * bc;
    for (int i = 0; i < nm; ++i) rhs[i] -= mw_bc[i + 1];
    for (int k = 0; k < Mw1d->outerSize(); ++k) {
      for (SpMat::InnerIterator it(*Mw1d, k); it; ++it) {
        const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (r >= 1 && r <= nm && c >= 1 && c <= nm) S(r - 1, c - 1) += it.value();
      }
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> fact(S);
  if (fact.info() != Eigen::Success)
    throw SolverError("transmission: midline factorization failed");
  const Vec u_m = fact.solve(rhs);
  const Vec u_b = K_bb_fact_.solve((b_b - K_bm_ * u_m).eval());

  Vec u = uc;
  for (int i = 0; i < nb; ++i) u[full_of_free_[bulk_free_[i]]] = u_b[i];
  for (int i = 0; i < nm; ++i) u[full_of_free_[midline_free_[i]]] = u_m[i];
  return u;
}

Vec TransmissionSolver::midline_values(const Vec& u) const {
  Vec m(mesh_.nx() + 1);
  for (int ix = 0; ix <= mesh_.nx(); ++ix)
    m[ix] = u[mesh_.vertex_index(ix, mesh_.midline_iy)];
  return m;
}

Vec TransmissionSolver::solve_transmission(const Vec& rho_nodal, double V_S, double V_D) {
  if (rho_nodal.size() != mesh_.nx() + 1)
    throw AssemblyError("solve_transmission: density must be nodal on the x grid");
  return solve_given(assemble_load(rho_nodal), Vec(), nullptr, V_S, V_D);
}

TransmissionResult TransmissionSolver::self_consistent_solve(double V_DS,
                                                             const TransportState* warm) {
  const double V_S = cfg_.V_S;
  const double V_D = cfg_.V_S + V_DS;
  const double U_T = cfg_.thermal_voltage();
  const double s = constants::source_scale();
  const int n = mesh_.nx() + 1;

  TransportState state;
  if (warm) {
    state = *warm;
    state.u_gamma[0] = V_S;
    state.u_gamma[n - 1] = V_D;
    state.gummel_iter = 0;
  } else {
    state.u_gamma.resize(n);
    for (int i = 0; i < n; ++i) state.u_gamma[i] = V_S + (V_D - V_S) * mesh_.xs[i] / cfg_.L;
    state.rho = equilibrium_density(Vec(state.u_gamma.array() - V_S), cfg_.N_plus, U_T);
  }

  std::vector<double> history;
  Vec u_full;
  bool converged = false;
  for (int k = 0; k < cfg_.gummel_max_iter; ++k) {
    const Vec w = (s / U_T) * state.rho;
    const SpMat Mw1d = assemble_weighted_interface_mass(xgrid_, w);
    const Vec load = assemble_load(state.rho);
    u_full = solve_given(load, state.u_gamma, &Mw1d, V_S, V_D);
    const Vec u_mid = midline_values(u_full);
    const double diff = (u_mid - state.u_gamma).lpNorm<Eigen::Infinity>();
    history.push_back(diff);
    state.u_gamma = u_mid;
    state.rho = (V_D == V_S)
                    ? equilibrium_density(Vec(u_mid.array() - V_S), cfg_.N_plus, U_T)
                    : solve_dd(xgrid_, u_mid, cfg_).rho;
    state.gummel_iter = k + 1;
    if (diff < cfg_.gummel_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "transmission gummel did not converge after " << cfg_.gummel_max_iter
       << " iterations (last update " << (history.empty() ? 0.0 : history.back()) << " V)";
    throw GummelError(os.str(), state, history);
  }

  // final plain solve with the converged density restores the Galerkin
  // identity Ku = F(rho) to solver precision (the linearization terms only
  // cancel to gummel_tol otherwise)
  u_full = solve_given(assemble_load(state.rho), state.u_gamma, nullptr, V_S, V_D);
  state.u_gamma = midline_values(u_full);

  state.converged = true;
  state.J = solve_dd(xgrid_, state.u_gamma, cfg_).J;

  TransmissionResult out;
  out.u = std::move(u_full);
  out.state = std::move(state);
  out.update_history = std::move(history);
  return out;
}

TransmissionResult TransmissionSolver::solve_continued(double V_DS) {
  TransmissionResult res = self_consistent_solve(0.0);
  if (V_DS == 0.0) return res;
  const double steps_real = V_DS / cfg_.dV_step;
  const int steps = static_cast<int>(std::round(steps_real));
  if (steps < 1 || std::abs(steps - steps_real) > 1e-9)
    throw ConfigError("target V_DS must be a multiple of dV_step");
  for (int i = 1; i <= steps; ++i) res = self_consistent_solve(i * cfg_.dV_step, &res.state);
  return res;
}

std::vector<SweepPoint> TransmissionSolver::voltage_sweep(
    double V_max, const std::function<void(double, const TransmissionResult&)>& on_point) {
  const double steps_real = V_max / cfg_.dV_step;
  const int steps = static_cast<int>(std::round(steps_real));
  if (V_max < 0 || (V_max > 0 && std::abs(steps - steps_real) > 1e-9))
    throw ConfigError("V_max must be a non-negative multiple of dV_step");
  std::vector<SweepPoint> points;
  TransmissionResult res;
  for (int i = 0; i <= steps; ++i) {
    const double V = i * cfg_.dV_step;
    res = self_consistent_solve(V, i == 0 ? nullptr : &res.state);
    const DdResult dd = solve_dd(xgrid_, res.state.u_gamma, cfg_);
    points.push_back({V, dd.J, -dd.J, dd.J_constancy, res.state.gummel_iter});
    if (on_point) on_point(V, res);
  }
  return points;
}

std::vector<std::pair<double, double>> TransmissionSolver::vertical_slice(const Vec& u,
                                                                          double x) const {
  if (x < 0 || x > cfg_.L) throw AssemblyError("vertical_slice: x outside the device");
  std::vector<std::pair<double, double>> slice;
  slice.reserve(mesh_.ys.size());
  for (double y : mesh_.ys) slice.emplace_back(y, mesh_.eval(u, x, y));
  return slice;
}

double TransmissionSolver::energy_residual(const Vec& u_full, const Vec& rho, double V_S,
                                           double V_D) const {
  const Vec load = assemble_load(rho);
  const Vec uc = boundary_values(V_S, V_D);
  Vec b_free(full_of_free_.size());
  for (size_t f = 0; f < full_of_free_.size(); ++f) b_free[f] = load[full_of_free_[f]];
  b_free -= K_fc_ * uc;
  Vec u_free(full_of_free_.size());
  for (size_t f = 0; f < full_of_free_.size(); ++f) u_free[f] = u_full[full_of_free_[f]];
  const double energy = u_free.dot(Vec(K_ff_ * u_free));
  const double resid = u_free.dot(Vec(K_ff_ * u_free)) - u_free.dot(b_free);
  return std::abs(resid) / std::max(std::abs(energy), 1e-300);
}

}  // namespace gfet
