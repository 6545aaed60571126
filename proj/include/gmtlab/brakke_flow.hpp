// Time-indexed varifolds, exact and simulated mean curvature flows with
// bounded transport, the Brakke inequality residual, and the parabolic
// maximum principle.
#pragma once

#include <gmtlab/fields.hpp>
#include <gmtlab/varifold.hpp>

#include <functional>
#include <string>
#include <vector>

namespace gmtlab {

struct ParabolicCylinder {
  Vec center_x;
  double center_t = 0.0;
  double radius = 0.0;  // B_R(x0) x [t0 - R^2, t0]

  bool contains(const Vec& x, double t) const {
    return (x - center_x).norm() <= radius && t >= center_t - radius * radius - 1e-15 &&
           t <= center_t + 1e-15;
  }
};

/// phi(x,t) = q(x,t) psi(|x - c|) with q a space-time polynomial and psi the
/// C^1 radial cutoff; non-negativity is enforced where sampled.
class SpaceTimeTestFunction {
public:
  SpaceTimeTestFunction() = default;
  SpaceTimeTestFunction(SpaceTimePoly q, RadialCutoff cutoff)
      : q_(std::move(q)), cutoff_(std::move(cutoff)) {}

  static SpaceTimeTestFunction one(int d) {
    return SpaceTimeTestFunction(SpaceTimePoly::steady(ScalarPoly::constant(d, 1.0)),
                                 RadialCutoff::none(d));
  }

  double value(const Vec& x, double t) const { return q_.value(x, t) * cutoff_.value(x); }
  Vec gradient(const Vec& x, double t) const {
    return cutoff_.value(x) * q_.gradient(x, t) + q_.value(x, t) * cutoff_.gradient(x);
  }
  double dt(const Vec& x, double t) const { return q_.dt(x, t) * cutoff_.value(x); }

private:
  SpaceTimePoly q_;
  RadialCutoff cutoff_;
};

struct FlowFrame {
  double t = 0.0;
  DiscreteVarifold v;
  Mat transport;  // per-atom velocity, size() x d (0 x d when absent)
};

/// Increasing sequence of varifold frames with optional per-atom transport.
class FlowTrack {
public:
  FlowTrack() = default;
  explicit FlowTrack(std::string method) : method_(std::move(method)) {}

  void add_frame(double t, DiscreteVarifold v, Mat transport = Mat()) {
    if (!frames_.empty()) {
      if (t <= frames_.back().t) throw error("FlowTrack: frame times must increase");
      const auto& c0 = frames_.front().v.context();
      if (v.context().d != c0.d || v.context().m != c0.m)
        throw error("FlowTrack: frames must share (d, m)");
    }
    if (transport.size() > 0 && transport.rows() != v.size())
      throw error("FlowTrack: transport row count mismatch");
    frames_.push_back({t, std::move(v), std::move(transport)});
  }

  /// Records lambda_v = ||v||_inf; must dominate the stored velocities.
  void finalize(double lambda_v) {
    double vmax = 0.0;
    for (const auto& f : frames_)
      for (int i = 0; i < f.transport.rows(); ++i) vmax = std::max(vmax, f.transport.row(i).norm());
    if (lambda_v < vmax - 1e-12) throw error("FlowTrack: lambda_v below observed |v|");
    lambda_v_ = lambda_v;
  }

  int size() const { return static_cast<int>(frames_.size()); }
  const FlowFrame& frame(int k) const { return frames_[k]; }
  double lambda_v() const { return lambda_v_; }
  const std::string& method() const { return method_; }
  const GeometryContext& context() const { return frames_.front().v.context(); }
  double t_begin() const { return frames_.front().t; }
  double t_end() const { return frames_.back().t; }

  int frame_index_at(double t, double tol = 1e-9) const {
    for (int k = 0; k < size(); ++k)
      if (std::abs(frames_[k].t - t) <= tol) return k;
    throw error("FlowTrack: no frame at requested time");
  }

  /// Bracketing frame indices for interpolation; t must lie in range.
  std::pair<int, int> bracket(double t) const {
    if (t < t_begin() - 1e-12 || t > t_end() + 1e-12)
      throw error("FlowTrack: time outside track range");
    for (int k = 0; k + 1 < size(); ++k)
      if (t <= frames_[k + 1].t + 1e-15) return {k, k + 1};
    return {size() - 1, size() - 1};
  }

  Vec transport_at(int frame, int atom) const {
    const auto& f = frames_[frame];
    if (f.transport.size() == 0) return Vec::Zero(f.v.context().d);
    return f.transport.row(atom).transpose();
  }

  /// Track with space shifted by `dx` and time by `dt` (base point to origin).
  FlowTrack translated(const Vec& dx, double dt) const {
    FlowTrack out(method_);
    for (const auto& f : frames_) out.add_frame(f.t + dt, f.v.translated(dx), f.transport);
    out.finalize(lambda_v_);
    return out;
  }

  /// Distance from (x, t) to the nearest atom of the nearest frame.
  double support_distance(const Vec& x, double t, double time_tol = 1e-9) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : frames_)
      if (std::abs(f.t - t) <= time_tol) best = std::min(best, f.v.min_distance_to(x));
    return best;
  }

private:
  std::vector<FlowFrame> frames_;
  double lambda_v_ = 0.0;
  std::string method_;
};

// ---------------------------------------------------------------------------
// Exact track: shrinking round sphere, r(t) = sqrt(-2 m t), vanishing at 0.
// ---------------------------------------------------------------------------

inline DiscreteVarifold shrinking_sphere_frame(int m, double t, int n_atoms) {
  if (t >= 0) throw error("shrinking_sphere: t must be negative");
  const int d = m + 1;
  GeometryContext ctx(d, m);
  const double r = std::sqrt(-2.0 * m * t);
  const double sphere_area = (m == 1) ? 2.0 * M_PI : 4.0 * M_PI;  // |S^m|
  DiscreteVarifold v(ctx);
  v.reserve(n_atoms);
  const double w = sphere_area * std::pow(r, m) / n_atoms;
  for (int i = 0; i < n_atoms; ++i) {
    Vec u(d);
    if (m == 1) {
      double a = 2.0 * M_PI * i / n_atoms;
      u << std::cos(a), std::sin(a);
    } else {
      // Spherical Fibonacci lattice: equal-weight quadrature on S^2.
      double z = 1.0 - 2.0 * (i + 0.5) / n_atoms;
      double phi = 2.0 * M_PI * std::fmod(i * 0.618033988749894848, 1.0);
      double s = std::sqrt(1.0 - z * z);
      u << s * std::cos(phi), s * std::sin(phi), z;
    }
    Vec x = r * u;
    Vec H = -(m / r) * u;
    Plane radial = Plane::from_span(u);
    Mat tangent_rows = radial.normal_basis().transpose();
    v.add_atom(x, w, 1.0, H, tangent_rows);
  }
  v.finalize(m / r);
  return v;
}

inline FlowTrack shrinking_sphere_track(int m, double t_begin, double t_end, int n_frames,
                                        int n_atoms = 2000) {
  if (!(t_begin < t_end && t_end < 0)) throw error("shrinking_sphere_track: need t0 < t1 < 0");
  FlowTrack track("shrinking-sphere");
  for (int k = 0; k < n_frames; ++k) {
    double t = t_begin + (t_end - t_begin) * k / (n_frames - 1.0);
    track.add_frame(t, shrinking_sphere_frame(m, t, n_atoms));
  }
  track.finalize(0.0);
  return track;
}

// ---------------------------------------------------------------------------
// Graphical mean curvature flow with constant ambient transport (m = 1, 2).
// ---------------------------------------------------------------------------

struct GraphFlowSpec {
  int m = 1;
  double length = 2.0 * M_PI;     // domain [0, L]^m
  int grid_n = 128;
  bool periodic = true;
  double t_begin = 0.0;
  double t_end = 1.0;
  double cfl = 0.4;
  int n_frames = 41;
  std::function<double(const Vec&)> u0;
  Vec transport;                  // ambient velocity in R^{m+1}; empty = none
  double grad_limit = 2.0;
};

namespace detail {

struct GraphState {
  int m = 1, n = 0;
  double h = 0.0;
  bool periodic = true;
  std::vector<double> u;

  int id(int i, int j) const { return i * n + j; }
  double& at(int i, int j) { return u[id(i, j)]; }
  double get(int i, int j) const { return u[id(i, j)]; }
  int wrap(int i) const { return (i % n + n) % n; }
};

}  // namespace detail

/// Explicit graphical MCF stepping: u_t = trace[(I - grad u x grad u / W^2) D^2 u]
/// plus the transport contribution v . (-grad u, 1). Frames are converted to
/// varifolds with the exact graph formulas at the stored grid values.
inline FlowTrack graphical_flow_run(const GraphFlowSpec& spec) {
  if (spec.m < 1 || spec.m > 2) throw error("graphical_flow_run: m must be 1 or 2");
  if (!(spec.cfl > 0 && spec.cfl <= 1.0)) throw error("graphical_flow_run: CFL out of (0, 1]");
  const int d = spec.m + 1;
  const int n = spec.grid_n;
  const double h = spec.length / (spec.periodic ? n : n - 1);

  detail::GraphState st;
  st.m = spec.m;
  st.n = n;
  st.h = h;
  st.periodic = spec.periodic;
  const int total = (spec.m == 1) ? n : n * n;
  st.u.resize(total);
  auto node = [&](int i, int j) {
    Vec p(spec.m);
    p[0] = i * h;
    if (spec.m == 2) p[1] = j * h;
    return p;
  };
  for (int i = 0; i < ((spec.m == 1) ? n : n); ++i)
    for (int j = 0; j < ((spec.m == 1) ? 1 : n); ++j)
      st.u[(spec.m == 1) ? i : st.id(i, j)] = spec.u0(node(i, j));

  Vec vfield = spec.transport.size() == d ? spec.transport : Vec::Zero(d);
  bool has_transport = spec.transport.size() == d;

  const double dt_max = spec.cfl * h * h / (2.0 * spec.m);
  const int steps = std::max(1, static_cast<int>(std::ceil((spec.t_end - spec.t_begin) / dt_max)));
  const double dt = (spec.t_end - spec.t_begin) / steps;

  // Centered differences; for Dirichlet data the stencil slides inward at the
  // boundary (exact on affine data).
  auto recenter = [&](int& i, int& j) {
    if (!spec.periodic) {
      i = std::min(std::max(i, 1), n - 2);
      if (spec.m == 2) j = std::min(std::max(j, 1), n - 2);
    }
  };
  auto val = [&](const std::vector<double>& u, int ii, int jj) {
    if (spec.periodic) {
      ii = st.wrap(ii);
      jj = st.wrap(jj);
    }
    return (spec.m == 1) ? u[ii] : u[st.id(ii, jj)];
  };
  auto d1 = [&](const std::vector<double>& u, int i, int j, int axis) {
    recenter(i, j);
    int di = axis == 0 ? 1 : 0, dj = axis == 1 ? 1 : 0;
    return (val(u, i + di, j + dj) - val(u, i - di, j - dj)) / (2.0 * h);
  };
  auto d2 = [&](const std::vector<double>& u, int i, int j, int a, int b) {
    recenter(i, j);
    if (a == b) {
      int di = a == 0 ? 1 : 0, dj = a == 1 ? 1 : 0;
      return (val(u, i + di, j + dj) - 2.0 * val(u, i, j) + val(u, i - di, j - dj)) / (h * h);
    }
    return (val(u, i + 1, j + 1) - val(u, i + 1, j - 1) - val(u, i - 1, j + 1) +
            val(u, i - 1, j - 1)) /
           (4.0 * h * h);
  };

  auto frame_varifold = [&](const std::vector<double>& u) {
    GeometryContext ctx(d, spec.m);
    DiscreteVarifold out(ctx);
    out.reserve(total);
    double lam = 0.0;
    int ilim = n, jlim = (spec.m == 1) ? 1 : n;
    for (int i = 0; i < ilim; ++i)
      for (int j = 0; j < jlim; ++j) {
        Vec p = node(i, j);
        Vec grad(spec.m);
        grad[0] = d1(u, i, j, 0);
        if (spec.m == 2) grad[1] = d1(u, i, j, 1);
        Mat hess(spec.m, spec.m);
        hess(0, 0) = d2(u, i, j, 0, 0);
        if (spec.m == 2) {
          hess(1, 1) = d2(u, i, j, 1, 1);
          hess(0, 1) = hess(1, 0) = d2(u, i, j, 0, 1);
        }
        double W2 = 1.0 + grad.squaredNorm();
        double W = std::sqrt(W2);
        Vec x(d);
        x.head(spec.m) = p;
        x[spec.m] = (spec.m == 1) ? u[i] : u[st.id(i, j)];

        Mat t(spec.m, d);
        for (int a = 0; a < spec.m; ++a) {
          Vec ta = Vec::Zero(d);
          ta[a] = 1.0;
          ta[spec.m] = grad[a];
          for (int bq = 0; bq < a; ++bq) ta -= t.row(bq).dot(ta) * t.row(bq).transpose();
          t.row(a) = ta.normalized().transpose();
        }
        Mat P = Mat::Identity(spec.m, spec.m) - grad * grad.transpose() / W2;
        double Hs = (P * hess).trace() / W;
        Vec nu(d);
        nu.head(spec.m) = -grad;
        nu[spec.m] = 1.0;
        nu /= W;
        double w = std::pow(h, spec.m) * W;
        out.add_atom(x, w, 1.0, Hs * nu, t);
        lam = std::max(lam, std::abs(Hs));
      }
    out.finalize(lam);
    return out;
  };

  FlowTrack track("graphical-flow");
  std::vector<double> u = st.u;
  std::vector<double> unew(total);
  int frame_every = std::max(1, steps / std::max(1, spec.n_frames - 1));

  auto push_frame = [&](double t) {
    DiscreteVarifold v = frame_varifold(u);
    Mat tr;
    if (has_transport) {
      tr = Mat(v.size(), d);
      tr.rowwise() = vfield.transpose();
    }
    track.add_frame(t, std::move(v), std::move(tr));
  };

  push_frame(spec.t_begin);
  for (int s = 1; s <= steps; ++s) {
    int ilim = n, jlim = (spec.m == 1) ? 1 : n;
    for (int i = 0; i < ilim; ++i)
      for (int j = 0; j < jlim; ++j) {
        int id = (spec.m == 1) ? i : st.id(i, j);
        if (!spec.periodic && (i == 0 || i == n - 1 || (spec.m == 2 && (j == 0 || j == n - 1)))) {
          unew[id] = u[id];  // Dirichlet: hold boundary values
          continue;
        }
        Vec grad(spec.m);
        grad[0] = d1(u, i, j, 0);
        if (spec.m == 2) grad[1] = d1(u, i, j, 1);
        double W2 = 1.0 + grad.squaredNorm();
        if (grad.norm() > spec.grad_limit)
          throw error("graphical_flow_run: gradient blow-up at step " + std::to_string(s));
        double rhs;
        if (spec.m == 1) {
          rhs = d2(u, i, j, 0, 0) / W2;
        } else {
          Mat hess(2, 2);
          hess(0, 0) = d2(u, i, j, 0, 0);
          hess(1, 1) = d2(u, i, j, 1, 1);
          hess(0, 1) = hess(1, 0) = d2(u, i, j, 0, 1);
          Mat P = Mat::Identity(2, 2) - grad * grad.transpose() / W2;
          rhs = (P * hess).trace();
        }
        if (has_transport) {
          rhs += vfield[spec.m];
          for (int a = 0; a < spec.m; ++a) rhs -= vfield[a] * grad[a];
        }
        unew[id] = u[id] + dt * rhs;
      }
    std::swap(u, unew);
    if (s % frame_every == 0 || s == steps) push_frame(spec.t_begin + s * dt);
  }
  track.finalize(has_transport ? vfield.norm() : 0.0);
  return track;
}

// ---------------------------------------------------------------------------
// Measurements on tracks.
// ---------------------------------------------------------------------------

struct BrakkeResidual {
  double lhs = 0.0;       // M_{t2}(phi(.,t2)) - M_{t1}(phi(.,t1))
  double rhs = 0.0;       // trapezoid of int (dphi/dt + (-phi H + grad phi).(H + v_perp)) dM dt
  double residual = 0.0;  // rhs - lhs  (>= -tol for valid flows)
};

/// Tests the Brakke inequality between two stored frame times.
inline BrakkeResidual brakke_residual(const FlowTrack& track, const SpaceTimeTestFunction& phi,
                                      double t1, double t2) {
  if (!(t1 < t2)) throw error("brakke_residual: need t1 < t2");
  int k1 = track.frame_index_at(t1);
  int k2 = track.frame_index_at(t2);

  auto mass_term = [&](int k) {
    const auto& f = track.frame(k);
    double s = 0.0;
    for (int i = 0; i < f.v.size(); ++i) {
      double p = phi.value(f.v.position(i), f.t);
      if (p < -1e-12) throw error("brakke_residual: test function negative at a sample");
      s += f.v.atom_mass(i) * p;
    }
    return s;
  };
  auto integrand = [&](int k) {
    const auto& f = track.frame(k);
    double s = 0.0;
    for (int i = 0; i < f.v.size(); ++i) {
      Vec x = f.v.position(i);
      double p = phi.value(x, f.t);
      Vec gp = phi.gradient(x, f.t);
      Vec H = f.v.curvature(i);
      Vec vperp = Vec::Zero(x.size());
      if (f.transport.size() > 0) {
        Vec v = f.transport.row(i).transpose();
        Eigen::Ref<const Mat> rows = f.v.basis_rows(i);
        vperp = v;
        for (int a = 0; a < rows.rows(); ++a) {
          Vec ta = rows.row(a).transpose();
          vperp -= ta.dot(v) * ta;
        }
      }
      s += f.v.atom_mass(i) * (phi.dt(x, f.t) + (-p * H + gp).dot(H + vperp));
    }
    return s;
  };

  BrakkeResidual out;
  out.lhs = mass_term(k2) - mass_term(k1);
  std::vector<double> vals(k2 - k1 + 1);
  for (int k = k1; k <= k2; ++k) vals[k - k1] = integrand(k);
  for (int k = k1; k < k2; ++k)
    out.rhs += 0.5 * (vals[k - k1] + vals[k - k1 + 1]) * (track.frame(k + 1).t - track.frame(k).t);
  out.residual = out.rhs - out.lhs;
  return out;
}

/// osc_S over a backwards parabolic cylinder: half the normal-coordinate
/// diameter of all atoms of all frames inside Q.
inline double spacetime_oscillation(const FlowTrack& track, const Plane& S,
                                    const ParabolicCylinder& q) {
  Mat nb = S.normal_basis();
  std::vector<Vec> pts;
  for (int k = 0; k < track.size(); ++k) {
    const auto& f = track.frame(k);
    if (f.t < q.center_t - q.radius * q.radius - 1e-12 || f.t > q.center_t + 1e-12) continue;
    for (int i = 0; i < f.v.size(); ++i) {
      Vec x = f.v.position(i);
      if ((x - q.center_x).norm() <= q.radius) pts.push_back(nb.transpose() * x);
    }
  }
  if (pts.empty()) throw error("spacetime_oscillation: empty intersection with the cylinder");
  Mat P(static_cast<int>(pts.size()), nb.cols());
  for (size_t i = 0; i < pts.size(); ++i) P.row(static_cast<int>(i)) = pts[i].transpose();
  return detail::half_diameter(P);
}

/// Residual of the parabolic maximum principle at a verified local max of f on
/// the space-time track: trace_m D^2 f - d_t f - Lambda |grad f| at X0.
inline double parabolic_max_principle_residual(const FlowTrack& track, const SpaceTimePoly& f,
                                               const Vec& x0, double t0, double radius = 0.1) {
  int k0 = track.frame_index_at(t0, 1e-6);
  if (track.frame(k0).v.min_distance_to(x0) > 1e-8)
    throw error("parabolic_max_principle_residual: X0 not on the track");
  double f0 = f.value(x0, t0);
  for (int k = 0; k < track.size(); ++k) {
    const auto& fr = track.frame(k);
    if (fr.t > t0 + 1e-12 || fr.t < t0 - radius * radius - 1e-12) continue;
    for (int i = 0; i < fr.v.size(); ++i) {
      Vec x = fr.v.position(i);
      if ((x - x0).norm() <= radius && f.value(x, fr.t) > f0 + 1e-10)
        throw error("parabolic_max_principle_residual: X0 is not a local max on the track");
    }
  }
  const int m = track.context().m;
  return trace_m_min(f.hessian(x0, t0), m) - f.dt(x0, t0) -
         track.lambda_v() * f.gradient(x0, t0).norm();
}

}  // namespace gmtlab
