// Excess, improvement of flatness, C^{1,alpha} graph extraction, the viscosity
// touching diagnostic, and the varifold maximum principle residual.
#pragma once

#include <gmtlab/allard_monotonicity.hpp>
#include <gmtlab/fields.hpp>
#include <gmtlab/varifold.hpp>

#include <Eigen/Sparse>

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace gmtlab {

class multi_sheet_error : public error {
public:
  using error::error;
};
class support_gap_error : public error {
public:
  using error::error;
};

/// E(M, B) = osc over the best-fit plane divided by the radius, plus a
/// curvature penalty C_pen Lambda radius.
inline double excess(const DiscreteVarifold& v, const Ball& b, double C_pen) {
  Plane T = best_fit_plane(v, b);
  return oscillation(v, T, b) / b.radius + C_pen * v.lambda() * b.radius;
}

struct FlatnessParams {
  double eta = 0.25;
  double eps0 = 0.02;
  double c = 0.1;    // curvature smallness Lambda <= c eps / R
  double support_tol = 1e-8;
};

struct FlatnessResult {
  enum class Status { Ok, Fail, NotApplicable } status = Status::NotApplicable;
  Plane T;
  double eps = 0.0;             // measured osc_S(B_R) / R
  double osc_S_R = 0.0;
  double osc_T_eta = 0.0;
  double bound = 0.0;           // eta^{1+alpha} osc_S(B_R)
  double plane_dist_over_eps = 0.0;
  std::string violated;         // named hypothesis when not applicable
};

/// One improvement-of-flatness step around the ball center: measures the
/// hypotheses, fits T at scale eta R, and checks
/// osc_T(B_{eta R}) <= eta^{1+alpha} osc_S(B_R).
inline FlatnessResult improve_flatness(const DiscreteVarifold& v, const Ball& b, const Plane& S,
                                       double alpha, const FlatnessParams& p = {}) {
  FlatnessResult out;
  const double R = b.radius;
  if (v.min_distance_to(b.center) > p.support_tol) {
    out.violated = "base point not in support";
    return out;
  }
  out.osc_S_R = oscillation(v, S, b);
  out.eps = out.osc_S_R / R;
  if (out.eps > p.eps0) {
    out.violated = "osc_S(B_R) <= eps0 R";
    return out;
  }
  if (out.eps > 0 && v.lambda() > p.c * out.eps / R) {
    out.violated = "Lambda <= c eps / R";
    return out;
  }
  for (int k = 1; k <= 8; ++k) {
    Ball sub{b.center, R * k / 8.0};
    if (density_ratio(v, sub) > 1.5 + 1e-9) {
      out.violated = "density ratio <= 3/2";
      return out;
    }
  }
  Ball beta{b.center, p.eta * R};
  out.T = best_fit_plane(v, beta);
  out.osc_T_eta = oscillation(v, out.T, beta);
  out.bound = std::pow(p.eta, 1.0 + alpha) * out.osc_S_R;
  out.status = out.osc_T_eta <= out.bound + 1e-12 ? FlatnessResult::Status::Ok
                                                  : FlatnessResult::Status::Fail;
  if (out.eps > 0) out.plane_dist_over_eps = plane_distance(S, out.T) / out.eps;
  return out;
}

struct GraphCell {
  Eigen::VectorXi index;  // m-dimensional grid index
  Vec center;             // in-plane coordinates of the cell center
  Vec height;             // (d-m)-vector u
  Mat grad;               // (d-m) x m finite-difference gradient
  bool grad_ok = false;
  int count = 0;
  double spread = 0.0;
};

struct GraphPatch {
  Plane base_plane;
  Vec origin;             // ball center in ambient coordinates
  double domain_radius = 0.0;
  double cell = 0.0;
  double holder_alpha = 0.5;
  double c1alpha_norm = 0.0;
  double max_spread = 0.0;
  std::vector<GraphCell> cells;
  std::map<std::vector<int>, int> lookup;

  const GraphCell* find(const std::vector<int>& idx) const {
    auto it = lookup.find(idx);
    return it == lookup.end() ? nullptr : &cells[it->second];
  }
};

struct GraphOptions {
  double cell = 0.0;              // 0: choose ~3x median atom spacing
  double coverage_radius = 0.0;   // 0: half the ball radius
  double alpha = 0.5;
  double spread_factor = 4.0;
};

namespace detail {

inline std::string cell_name(const Eigen::VectorXi& idx) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < idx.size(); ++i) os << (i ? "," : "") << idx[i];
  os << ")";
  return os.str();
}

}  // namespace detail

/// Extracts per-cell heights of supp M over the plane S inside B. Verifies
/// single-valuedness per cell and coverage of the disk of coverage_radius;
/// estimates the C^{1,alpha} seminorm from difference quotients.
inline GraphPatch extract_graph(const DiscreteVarifold& v, const Ball& b, const Plane& S,
                                const GraphOptions& opt = {}) {
  const int m = v.context().m;
  const int codim = v.context().d - m;
  auto idxs = v.atoms_in(b);
  if (idxs.empty()) throw error("extract_graph: empty ball");

  GraphPatch patch;
  patch.base_plane = S;
  patch.origin = b.center;
  patch.holder_alpha = opt.alpha;
  patch.domain_radius = opt.coverage_radius > 0 ? opt.coverage_radius : 0.5 * b.radius;

  double cell = opt.cell;
  if (cell <= 0) {
    // ~3 atom spacings so every covered cell holds a handful of atoms.
    double spacing = b.radius * std::sqrt(unit_ball_volume(m) / static_cast<double>(idxs.size()));
    cell = 3.0 * spacing;
  }
  patch.cell = cell;

  double osc_R = oscillation(v, S, b);
  double eps_hat = osc_R / b.radius;
  double lip = std::sqrt(static_cast<double>(m)) * (eps_hat + v.lambda() * b.radius);
  double spread_tol = opt.spread_factor * lip * cell + 1e-9;

  Mat nb = S.normal_basis();
  std::map<std::vector<int>, std::vector<std::pair<Vec, double>>> buckets;
  for (int i : idxs) {
    Vec rel = v.position(i) - b.center;
    Vec p = S.coords(rel);
    Vec y = nb.transpose() * rel;
    std::vector<int> key(m);
    for (int j = 0; j < m; ++j) key[j] = static_cast<int>(std::lround(p[j] / cell));
    buckets[key].push_back({(Vec(m + codim) << p, y).finished(), v.atom_mass(i)});
  }

  for (auto& [key, atoms] : buckets) {
    GraphCell c;
    c.index = Eigen::Map<const Eigen::VectorXi>(key.data(), m);
    c.center = Vec(m);
    for (int j = 0; j < m; ++j) c.center[j] = key[j] * cell;
    c.count = static_cast<int>(atoms.size());
    Mat ys(c.count, codim);
    double wsum = 0.0;
    Vec mean = Vec::Zero(codim);
    for (int a = 0; a < c.count; ++a) {
      ys.row(a) = atoms[a].first.tail(codim).transpose();
      double w = std::max(atoms[a].second, 1e-300);
      mean += w * atoms[a].first.tail(codim);
      wsum += w;
    }
    c.height = mean / wsum;
    c.spread = 2.0 * detail::half_diameter(ys);
    if (c.spread > spread_tol)
      throw multi_sheet_error("extract_graph: multi-valued cell " + detail::cell_name(c.index) +
                              " (spread " + std::to_string(c.spread) + ")");
    patch.max_spread = std::max(patch.max_spread, c.spread);
    patch.lookup[key] = static_cast<int>(patch.cells.size());
    patch.cells.push_back(std::move(c));
  }

  // Coverage of the disk of radius domain_radius (Step 3 contract).
  int K = static_cast<int>(std::floor(patch.domain_radius / cell));
  std::vector<int> probe(m, -K);
  while (true) {
    double r2 = 0.0;
    for (int j = 0; j < m; ++j) r2 += probe[j] * (double)probe[j] * cell * cell;
    if (std::sqrt(r2) <= patch.domain_radius && patch.lookup.find(probe) == patch.lookup.end()) {
      Eigen::VectorXi idx = Eigen::Map<const Eigen::VectorXi>(probe.data(), m);
      throw support_gap_error("extract_graph: support gap at cell " + detail::cell_name(idx));
    }
    int j = 0;
    for (; j < m; ++j) {
      if (++probe[j] <= K) break;
      probe[j] = -K;
    }
    if (j == m) break;
  }

  // Finite-difference gradients between neighbor cells.
  for (auto& c : patch.cells) {
    c.grad = Mat::Zero(codim, m);
    c.grad_ok = true;
    for (int j = 0; j < m; ++j) {
      std::vector<int> lo(c.index.data(), c.index.data() + m);
      std::vector<int> hi = lo;
      lo[j] -= 1;
      hi[j] += 1;
      const GraphCell* cl = patch.find(lo);
      const GraphCell* ch = patch.find(hi);
      if (cl && ch) {
        c.grad.col(j) = (ch->height - cl->height) / (2.0 * cell);
      } else if (ch) {
        c.grad.col(j) = (ch->height - c.height) / cell;
      } else if (cl) {
        c.grad.col(j) = (c.height - cl->height) / cell;
      } else {
        c.grad_ok = false;
      }
    }
  }

  // Holder seminorm from sampled difference quotients.
  double norm = 0.0;
  const int n = static_cast<int>(patch.cells.size());
  int stride = std::max(1, n * n / 200000);
  int pair_id = 0;
  for (int a = 0; a < n; ++a) {
    if (!patch.cells[a].grad_ok) continue;
    for (int q = a + 1; q < n; ++q) {
      if (pair_id++ % stride) continue;
      const auto& ca = patch.cells[a];
      const auto& cq = patch.cells[q];
      Vec dp = cq.center - ca.center;
      double dist = dp.norm();
      if (dist < 0.5 * cell) continue;
      double dev = (cq.height - ca.height - ca.grad * dp).norm();
      norm = std::max(norm, dev / std::pow(dist, 1.0 + opt.alpha));
    }
  }
  patch.c1alpha_norm = norm;
  return patch;
}

/// Residual of the varifold maximum principle at a verified local max of f on
/// supp M: trace_m D^2 f(x0) - Lambda |grad f(x0)| (contract: <= tol_disc).
inline double max_principle_residual(const DiscreteVarifold& v, const ScalarPoly& f,
                                     const Vec& x0, double radius = 0.1) {
  if (v.min_distance_to(x0) > 1e-8) throw error("max_principle_residual: x0 not in support");
  double f0 = f.value(x0);
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i);
    if ((x - x0).norm() <= radius && f.value(x) > f0 + 1e-10)
      throw error("max_principle_residual: x0 is not a local max of f on supp");
  }
  return trace_m_min(f.hessian(x0), v.context().m) - v.lambda() * f.gradient(x0).norm();
}

// ---------------------------------------------------------------------------
// Viscosity touching function (Savin-type diagnostic).
// ---------------------------------------------------------------------------

using BoundaryDataFn = std::function<Vec(const Vec&)>;  // S-coords near |p| = 1/4 -> R^{d-m}

/// Grid solution h of the Dirichlet problem on the disk B^S_{1/4}, plus the
/// touching-function parameters eps and delta. G(x) = |S^perp x / eps - h(Sx)|^2/2
/// + (delta/2)|Sx|^2.
class TouchFunction {
public:
  static constexpr double kDomainRadius = 0.25;

  /// Solves the (2m+1)-point discrete Laplace equation; grid nodes outside the
  /// open disk are Dirichlet nodes carrying g evaluated at the node.
  static TouchFunction solve(int m, int codim, int n, double eps, double delta,
                             const BoundaryDataFn& g) {
    if (m < 1 || m > 2) throw error("TouchFunction: m must be 1 or 2");
    if (!(delta > 0 && delta < 0.5)) throw error("TouchFunction: need 0 < delta < 1/2");
    TouchFunction tf;
    tf.m_ = m;
    tf.codim_ = codim;
    tf.n_ = n;
    tf.eps_ = eps;
    tf.delta_ = delta;
    tf.h_ = 2.0 * kDomainRadius / (n - 1);

    const int total = (m == 1) ? n : n * n;
    tf.values_ = Mat::Zero(total, codim);

    std::vector<int> role(total, 0);  // 0 boundary, 1 interior
    std::vector<int> sys_index(total, -1);
    int n_int = 0;
    for (int id = 0; id < total; ++id) {
      Vec p = tf.node(id);
      if (p.norm() < kDomainRadius - 1e-12) {
        role[id] = 1;
        sys_index[id] = n_int++;
      }
    }
    for (int id = 0; id < total; ++id)
      if (role[id] == 0) tf.values_.row(id) = g(tf.node(id)).transpose();

    Eigen::SparseMatrix<double> A(n_int, n_int);
    Mat rhs = Mat::Zero(n_int, codim);
    std::vector<Eigen::Triplet<double>> trips;
    for (int id = 0; id < total; ++id) {
      if (role[id] != 1) continue;
      int row = sys_index[id];
      trips.emplace_back(row, row, 2.0 * m);
      for (int nb : tf.neighbors(id)) {
        if (role[nb] == 1) trips.emplace_back(row, sys_index[nb], -1.0);
        else rhs.row(row) += tf.values_.row(nb);
      }
    }
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) throw error("TouchFunction: singular Laplace system");
    Mat sol = lu.solve(rhs);
    for (int id = 0; id < total; ++id)
      if (role[id] == 1) tf.values_.row(id) = sol.row(sys_index[id]);
    tf.roles_ = std::move(role);
    return tf;
  }

  int m() const { return m_; }
  int codim() const { return codim_; }
  double eps() const { return eps_; }
  double delta() const { return delta_; }

  /// Max (2m+1)-point residual over interior nodes (solver exactness check).
  double harmonic_residual() const {
    double worst = 0.0;
    const int total = (m_ == 1) ? n_ : n_ * n_;
    for (int id = 0; id < total; ++id) {
      if (roles_[id] != 1) continue;
      Vec r = -2.0 * m_ * values_.row(id).transpose();
      for (int nb : neighbors(id)) r += values_.row(nb).transpose();
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    return worst;
  }

  /// Bilinear interpolation of h at in-plane coordinates p (clamped to grid).
  Vec value(const Vec& p) const {
    if (m_ == 1) {
      double t = clamp_coord(p[0]);
      int i = cell_of(t);
      double w = (t - coord(i)) / h_;
      return ((1 - w) * values_.row(i) + w * values_.row(i + 1)).transpose();
    }
    double tx = clamp_coord(p[0]), ty = clamp_coord(p[1]);
    int i = cell_of(tx), j = cell_of(ty);
    double wx = (tx - coord(i)) / h_, wy = (ty - coord(j)) / h_;
    Vec v00 = values_.row(node_id(i, j)).transpose();
    Vec v10 = values_.row(node_id(i + 1, j)).transpose();
    Vec v01 = values_.row(node_id(i, j + 1)).transpose();
    Vec v11 = values_.row(node_id(i + 1, j + 1)).transpose();
    return (1 - wx) * (1 - wy) * v00 + wx * (1 - wy) * v10 + (1 - wx) * wy * v01 + wx * wy * v11;
  }

  /// Central-difference gradient at the node nearest to p, (codim x m).
  Mat gradient(const Vec& p) const {
    Mat g(codim_, m_);
    auto idx = nearest_interior(p);
    for (int axis = 0; axis < m_; ++axis) {
      int lo = shift_id(idx, axis, -1), hi = shift_id(idx, axis, +1);
      g.col(axis) = (values_.row(hi) - values_.row(lo)).transpose() / (2.0 * h_);
    }
    return g;
  }

  /// Per-component Hessians at the node nearest to p; out[k] is m x m.
  std::vector<Mat> hessian(const Vec& p) const {
    std::vector<Mat> out(codim_, Mat::Zero(m_, m_));
    auto idx = nearest_interior(p);
    int c = flat_id(idx);
    for (int a = 0; a < m_; ++a) {
      int lo = shift_id(idx, a, -1), hi = shift_id(idx, a, +1);
      Vec second = (values_.row(hi) - 2.0 * values_.row(c) + values_.row(lo)).transpose() / (h_ * h_);
      for (int k = 0; k < codim_; ++k) out[k](a, a) = second[k];
      for (int bq = a + 1; bq < m_; ++bq) {
        int pp = shift_id(shift_id_arr(idx, a, +1), bq, +1);
        int pm = shift_id(shift_id_arr(idx, a, +1), bq, -1);
        int mp = shift_id(shift_id_arr(idx, a, -1), bq, +1);
        int mm = shift_id(shift_id_arr(idx, a, -1), bq, -1);
        Vec cross =
            (values_.row(pp) - values_.row(pm) - values_.row(mp) + values_.row(mm)).transpose() /
            (4.0 * h_ * h_);
        for (int k = 0; k < codim_; ++k) out[k](a, bq) = out[k](bq, a) = cross[k];
      }
    }
    return out;
  }

private:
  double coord(int i) const { return -kDomainRadius + i * h_; }
  double clamp_coord(double t) const {
    return std::min(std::max(t, -kDomainRadius), kDomainRadius);
  }
  int cell_of(double t) const {
    int i = static_cast<int>(std::floor((t + kDomainRadius) / h_));
    return std::min(std::max(i, 0), n_ - 2);
  }
  int node_id(int i, int j) const { return i * n_ + j; }
  Vec node(int id) const {
    Vec p(m_);
    if (m_ == 1) p[0] = coord(id);
    else {
      p[0] = coord(id / n_);
      p[1] = coord(id % n_);
    }
    return p;
  }
  std::vector<int> neighbors(int id) const {
    std::vector<int> out;
    if (m_ == 1) {
      out = {id - 1, id + 1};
    } else {
      int i = id / n_, j = id % n_;
      out = {node_id(i - 1, j), node_id(i + 1, j), node_id(i, j - 1), node_id(i, j + 1)};
    }
    return out;
  }
  std::array<int, 2> nearest_interior(const Vec& p) const {
    std::array<int, 2> idx{0, 0};
    for (int axis = 0; axis < m_; ++axis) {
      int i = static_cast<int>(std::lround((clamp_coord(p[axis]) + kDomainRadius) / h_));
      idx[axis] = std::min(std::max(i, 1), n_ - 2);
    }
    return idx;
  }
  std::array<int, 2> shift_id_arr(std::array<int, 2> idx, int axis, int step) const {
    idx[axis] = std::min(std::max(idx[axis] + step, 0), n_ - 1);
    return idx;
  }
  int shift_id(const std::array<int, 2>& idx, int axis, int step) const {
    auto s = shift_id_arr(idx, axis, step);
    return flat_id(s);
  }
  int flat_id(const std::array<int, 2>& idx) const {
    return m_ == 1 ? idx[0] : node_id(idx[0], idx[1]);
  }

  int m_ = 2, codim_ = 1, n_ = 0;
  double eps_ = 0.0, delta_ = 0.0, h_ = 0.0;
  Mat values_;
  std::vector<int> roles_;
};

struct TouchResult {
  Vec x_star;
  double G_max = 0.0;
  bool interior = false;
  double min_div = 0.0;        // exact inf over Gr(m,d) via trace_m_min
  double sampled_min_div = 0.0;  // safety-net Grassmannian sample
  double rhs = 0.0;            // Lambda |grad G(x_star)|
  bool certificate = false;    // interior max with min_div > rhs
};

/// Maximizes G over supp M inside the slab |Sx| <= 1/4 and evaluates the
/// touching inequality of the harmonicity lemma at the argmax. The exact
/// infimum over planes of div_T grad G is trace_m(D^2 G); a random plane
/// sample is kept as a cross-check.
inline TouchResult viscosity_touch(const DiscreteVarifold& v, const TouchFunction& tf,
                                   const Plane& S, int plane_samples = 10000,
                                   unsigned long long seed = 42) {
  const int d = v.context().d;
  const int m = v.context().m;
  if (tf.m() != m || tf.codim() != d - m) throw error("viscosity_touch: dimension mismatch");
  Mat nb = S.normal_basis();

  TouchResult out;
  double best = -std::numeric_limits<double>::infinity();
  int best_i = -1;
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i);
    Vec p = S.coords(x);
    if (p.norm() > TouchFunction::kDomainRadius) continue;
    Vec f = nb.transpose() * x / tf.eps() - tf.value(p);
    double G = 0.5 * f.squaredNorm() + 0.5 * tf.delta() * p.squaredNorm();
    if (G > best) {
      best = G;
      best_i = i;
    }
  }
  if (best_i < 0) throw error("viscosity_touch: no atoms in the slab");
  out.G_max = best;
  out.x_star = v.position(best_i);
  Vec p = S.coords(out.x_star);
  out.interior = p.norm() <= TouchFunction::kDomainRadius - tf.delta();

  // Analytic derivatives of G at x*.
  Vec f = nb.transpose() * out.x_star / tf.eps() - tf.value(p);
  Mat Dh = tf.gradient(p);                       // codim x m
  Mat J = nb.transpose() / tf.eps() - Dh * S.basis().transpose();  // codim x d
  Mat D2G = J.transpose() * J + tf.delta() * S.projector();
  auto hess = tf.hessian(p);
  for (int k = 0; k < d - m; ++k)
    D2G -= f[k] * S.basis() * hess[k] * S.basis().transpose();

  out.min_div = trace_m_min(D2G, m);
  out.rhs = v.lambda() * (J.transpose() * f + tf.delta() * S.projector() * out.x_star).norm();

  std::mt19937_64 rng(seed);
  out.sampled_min_div = std::numeric_limits<double>::infinity();
  for (int k = 0; k < plane_samples; ++k) {
    Plane T = Plane::random(d, m, rng);
    out.sampled_min_div = std::min(out.sampled_min_div, trace_over_plane(D2G, T));
  }
  out.certificate = out.interior && out.min_div > out.rhs;
  return out;
}

}  // namespace gmtlab
