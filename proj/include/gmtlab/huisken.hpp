// Weighted Huisken monotonicity, parabolic oscillation decay, and space-time
// graph extraction. All ops take the track pre-translated so the base
// space-time point is (0, 0) unless a base point is passed explicitly.
#pragma once

#include <gmtlab/allard_monotonicity.hpp>
#include <gmtlab/allard_regularity.hpp>
#include <gmtlab/brakke_flow.hpp>
#include <gmtlab/convex_weight.hpp>
#include <gmtlab/heat_kernel.hpp>

#include <map>
#include <vector>

namespace gmtlab {

/// int f rho_r(. - x0, t) dM_{t0 + t}; the measure is interpolated linearly in
/// time between the two bracketing frames, the kernel is evaluated at t.
inline double gaussian_density(const FlowTrack& track, const ConvexWeight& f, const Vec& x0,
                               double t0, double r, double t) {
  if (!(t < 0 && t >= -r * r - 1e-12)) throw error("gaussian_density: need -r^2 <= t < 0");
  HeatKernelSpec spec{track.context().m, r};
  auto frame_value = [&](int k) {
    const auto& fr = track.frame(k);
    double s = 0.0;
    for (int i = 0; i < fr.v.size(); ++i) {
      Vec x = fr.v.position(i);
      double rho = heat_kernel(x - x0, t, spec).value;
      if (rho > 0) s += fr.v.atom_mass(i) * f.value(x) * rho;
    }
    return s;
  };
  auto [k0, k1] = track.bracket(t0 + t);
  if (k0 == k1) return frame_value(k0);
  double w = (t0 + t - track.frame(k0).t) / (track.frame(k1).t - track.frame(k0).t);
  return (1.0 - w) * frame_value(k0) + w * frame_value(k1);
}

struct HuiskenCurve {
  std::vector<double> times;   // sampled t < 0 relative to t0
  std::vector<double> values;  // gaussian density with weight f
  std::vector<double> slack;   // value - f(x0) + C (Lambda + eps/r^2 + eps Lambda^2)(-t)
  double min_slack = 0.0;
  double f_at_base = 0.0;
  double f_sup = 0.0;          // eps = ||f||_inf over track atoms near the base
  double E1 = 0.0;             // measured sup M_t(B_rho(x)) / rho^m
  double tol_disc = 0.0;
};

struct HuiskenOptions {
  double base_tol = 1e-6;
  double tol_disc = 0.0;
};

/// Checks the weighted Huisken lower bound at every sampled time.
inline HuiskenCurve verify_huisken_monotonicity(const FlowTrack& track, const ConvexWeight& f,
                                                const Vec& x0, double t0, double r,
                                                const std::vector<double>& times, double C,
                                                const HuiskenOptions& opt = {}) {
  if (times.empty()) throw error("verify_huisken_monotonicity: no times");
  if (track.support_distance(x0, t0, 1e-6) > opt.base_tol)
    throw error("verify_huisken_monotonicity: base point not on the track");

  HuiskenCurve out;
  out.tol_disc = opt.tol_disc;
  out.f_at_base = f.value(x0);
  const int m = track.context().m;
  const double lambda = track.lambda_v();

  for (int k = 0; k < track.size(); ++k) {
    const auto& fr = track.frame(k);
    if (fr.t < t0 - r * r - 1e-12 || fr.t > t0 + 1e-12) continue;
    for (int i = 0; i < fr.v.size(); ++i) {
      Vec x = fr.v.position(i);
      if ((x - x0).norm() <= r) out.f_sup = std::max(out.f_sup, std::abs(f.value(x)));
    }
    // Measured density bound E1 over a few probe balls per frame.
    for (int i = 0; i < fr.v.size(); i += std::max(1, fr.v.size() / 8)) {
      Vec c = fr.v.position(i);
      for (double rho : {0.25 * r, 0.5 * r, r}) {
        double mass = mass_in_ball(fr.v, Ball{c, rho});
        out.E1 = std::max(out.E1, mass / std::pow(rho, m));
      }
    }
  }

  out.min_slack = std::numeric_limits<double>::infinity();
  const double eps = out.f_sup;
  for (double t : times) {
    double val = gaussian_density(track, f, x0, t0, r, t);
    double slack =
        val - out.f_at_base + C * (lambda + eps / (r * r) + eps * lambda * lambda) * (-t);
    out.times.push_back(t);
    out.values.push_back(val);
    out.slack.push_back(slack);
    out.min_slack = std::min(out.min_slack, slack);
  }
  return out;
}

struct ParabolicDecayFit {
  std::vector<double> radii;
  std::vector<double> osc;
  std::vector<double> gaussian_ratios;  // int rho_R(., t) dM_t at sampled times
  double beta = 0.0;
  double C_fit = 0.0;
  bool degenerate = false;
  bool applicable = true;  // Gaussian density hypothesis <= 3/2 held
};

/// Power-law fit of osc_S over backwards cylinders Q_r(0,0); not-applicable
/// when the Gaussian density hypothesis fails at a sampled time.
inline ParabolicDecayFit parabolic_decay_fit(const FlowTrack& track, const Plane& S, double R,
                                             const std::vector<double>& scales) {
  if (scales.size() < 3) throw error("parabolic_decay_fit: need at least 3 scales");
  const int d = track.context().d;
  ParabolicDecayFit out;

  // Hypothesis int rho_R(., t) dM_t <= 3/2 for every t in [-R^2, 0): probed at
  // frame times and on a dyadic refinement (the bound bites only once the
  // kernel concentrates below the sheet separation).
  // The kernel is only resolvable while its width exceeds the atom spacing;
  // probing below that floor would measure quadrature noise, not density.
  double spacing = 0.0;
  {
    const auto& endf = track.frame(track.size() - 1).v;
    if (endf.size() > 0)
      spacing = std::pow(endf.total_mass() / endf.size(), 1.0 / track.context().m);
  }
  const double tau_floor = 0.5 * std::pow(3.0 * spacing, 2);
  std::vector<double> probe_ts;
  auto admit = [&](double t) {
    if (t >= track.t_begin() - 1e-12 && t < -1e-15 && -t >= tau_floor) probe_ts.push_back(t);
  };
  for (int k = 0; k < track.size(); ++k) {
    double t = track.frame(k).t;
    if (t > -R * R - 1e-12) admit(t);
  }
  for (int k = 0; k <= 16; ++k) admit(-R * R * std::pow(0.5, k));
  ConvexWeight unit_weight = ConvexWeight::constant(d, 1.0);
  for (double t : probe_ts) {
    double s = gaussian_density(track, unit_weight, Vec::Zero(d), 0.0, R, t);
    out.gaussian_ratios.push_back(s);
    if (s > 1.5 + 1e-9) out.applicable = false;
  }
  if (!out.applicable) return out;

  for (double r : scales) {
    out.radii.push_back(r);
    out.osc.push_back(spacetime_oscillation(track, S, ParabolicCylinder{Vec::Zero(d), 0.0, r}));
  }
  auto [beta, degenerate] = detail::power_law_fit(out.radii, out.osc);
  out.beta = beta;
  out.degenerate = degenerate;
  if (degenerate) return out;

  double osc_R = spacetime_oscillation(track, S, ParabolicCylinder{Vec::Zero(d), 0.0, R});
  double denom = osc_R + track.lambda_v() * R * R;
  if (denom > 0) {
    for (size_t k = 0; k < out.radii.size(); ++k) {
      double model = denom * std::pow(out.radii[k] / R, out.beta);
      if (model > 0) out.C_fit = std::max(out.C_fit, out.osc[k] / model);
    }
    out.C_fit *= (1.0 + 1e-6);
  }
  return out;
}

struct SpaceTimeCell {
  Eigen::VectorXi index;  // m spatial indices
  int tbin = 0;
  Vec center;             // in-plane coordinates
  double tcenter = 0.0;
  Vec height;
  Mat grad;               // spatial gradient, (d-m) x m
  bool grad_ok = false;
  int count = 0;
  double spread = 0.0;
};

struct SpaceTimeGraphPatch {
  Plane base_plane;
  double domain_radius = 0.0;
  double cell = 0.0;
  double tbin = 0.0;
  double holder_alpha = 0.5;
  double c1alpha_norm = 0.0;  // parabolic seminorm
  std::vector<SpaceTimeCell> cells;
  std::map<std::vector<int>, int> lookup;  // spatial indices + tbin appended

  const SpaceTimeCell* find(std::vector<int> key) const {
    auto it = lookup.find(key);
    return it == lookup.end() ? nullptr : &cells[it->second];
  }
};

struct SpaceTimeGraphOptions {
  double cell = 0.0;             // 0: ~3 atom spacings of the end frame
  double coverage_radius = 0.0;  // 0: half the cylinder radius
  double alpha = 0.5;
  double spread_factor = 4.0;
};

/// Extracts per space-time-cell heights of the track over S inside Q, checks
/// single-valuedness and coverage of Q^m_{coverage_radius}, and estimates the
/// parabolic C^{1,alpha} seminorm
/// |u(y,s) - u(x,t) - grad u(x,t).(y-x)| <= C (|x-y|^2 + |t-s|)^{(1+alpha)/2}.
inline SpaceTimeGraphPatch parabolic_extract_graph(const FlowTrack& track,
                                                   const ParabolicCylinder& q, const Plane& S,
                                                   const SpaceTimeGraphOptions& opt = {}) {
  const int m = track.context().m;
  const int codim = track.context().d - m;
  SpaceTimeGraphPatch patch;
  patch.base_plane = S;
  patch.holder_alpha = opt.alpha;
  patch.domain_radius = opt.coverage_radius > 0 ? opt.coverage_radius : 0.5 * q.radius;

  // Collect in-cylinder atoms.
  struct Sample {
    Vec p;
    double t;
    Vec y;
    double mass;
  };
  std::vector<Sample> samples;
  Mat nb = S.normal_basis();
  double frame_gap = 0.0;
  {
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int k = 0; k < track.size(); ++k) {
      const auto& fr = track.frame(k);
      if (fr.t < q.center_t - q.radius * q.radius - 1e-12 || fr.t > q.center_t + 1e-12) continue;
      if (!std::isnan(prev)) frame_gap = std::max(frame_gap, fr.t - prev);
      prev = fr.t;
      for (int i = 0; i < fr.v.size(); ++i) {
        Vec x = fr.v.position(i);
        if ((x - q.center_x).norm() > q.radius) continue;
        Vec rel = x - q.center_x;
        samples.push_back({S.coords(rel), fr.t - q.center_t, nb.transpose() * rel,
                           fr.v.atom_mass(i)});
      }
    }
  }
  if (samples.empty()) throw error("parabolic_extract_graph: empty cylinder");

  double cell = opt.cell;
  if (cell <= 0) {
    const auto& endf = track.frame(track.size() - 1).v;
    double spacing =
        q.radius * std::sqrt(unit_ball_volume(m) / std::max(1, endf.size()));
    cell = 3.0 * spacing;
  }
  patch.cell = cell;
  patch.tbin = std::max(cell * cell, frame_gap * (1.0 + 1e-9));

  double osc = spacetime_oscillation(track, S, q);
  double eps_hat = osc / q.radius;
  double lip = std::sqrt(static_cast<double>(m)) * (eps_hat + track.lambda_v() * q.radius);
  double spread_tol = opt.spread_factor * (lip * cell + eps_hat * patch.tbin / cell) + 1e-9;

  std::map<std::vector<int>, std::vector<Sample>> buckets;
  for (auto& s : samples) {
    std::vector<int> key(m + 1);
    for (int j = 0; j < m; ++j) key[j] = static_cast<int>(std::lround(s.p[j] / cell));
    key[m] = static_cast<int>(std::floor(-s.t / patch.tbin));  // t in [-R^2, 0]
    buckets[key].push_back(s);
  }

  for (auto& [key, atoms] : buckets) {
    SpaceTimeCell c;
    c.index = Eigen::Map<const Eigen::VectorXi>(key.data(), m);
    c.tbin = key[m];
    c.center = Vec(m);
    for (int j = 0; j < m; ++j) c.center[j] = key[j] * cell;
    c.tcenter = -(key[m] + 0.5) * patch.tbin;
    c.count = static_cast<int>(atoms.size());
    Mat ys(c.count, codim);
    Vec mean = Vec::Zero(codim);
    double wsum = 0.0;
    for (int a = 0; a < c.count; ++a) {
      ys.row(a) = atoms[a].y.transpose();
      double w = std::max(atoms[a].mass, 1e-300);
      mean += w * atoms[a].y;
      wsum += w;
    }
    c.height = mean / wsum;
    c.spread = 2.0 * detail::half_diameter(ys);
    if (c.spread > spread_tol)
      throw multi_sheet_error("parabolic_extract_graph: multi-valued cell " +
                              detail::cell_name(c.index) + " bin " + std::to_string(c.tbin));
    patch.lookup[key] = static_cast<int>(patch.cells.size());
    patch.cells.push_back(std::move(c));
  }

  // Coverage of B^m_{domain_radius} x [-domain_radius^2, 0].
  int K = static_cast<int>(std::floor(patch.domain_radius / cell));
  int TB = std::max(1, static_cast<int>(std::floor(patch.domain_radius * patch.domain_radius /
                                                   patch.tbin)));
  std::vector<int> probe(m + 1, 0);
  for (int j = 0; j < m; ++j) probe[j] = -K;
  while (true) {
    double r2 = 0.0;
    for (int j = 0; j < m; ++j) r2 += probe[j] * (double)probe[j] * cell * cell;
    if (std::sqrt(r2) <= patch.domain_radius && probe[m] < TB &&
        patch.lookup.find(probe) == patch.lookup.end()) {
      Eigen::VectorXi idx = Eigen::Map<const Eigen::VectorXi>(probe.data(), m);
      throw support_gap_error("parabolic_extract_graph: support gap at cell " +
                              detail::cell_name(idx) + " bin " + std::to_string(probe[m]));
    }
    int j = 0;
    for (; j <= m; ++j) {
      int lim = (j == m) ? TB - 1 : K;
      if (++probe[j] <= lim) break;
      probe[j] = (j == m) ? 0 : -K;
    }
    if (j > m) break;
  }

  // Spatial gradients within each time bin.
  for (auto& c : patch.cells) {
    c.grad = Mat::Zero(codim, m);
    c.grad_ok = true;
    std::vector<int> base(c.index.data(), c.index.data() + m);
    base.push_back(c.tbin);
    for (int j = 0; j < m; ++j) {
      auto lo = base, hi = base;
      lo[j] -= 1;
      hi[j] += 1;
      const SpaceTimeCell* cl = patch.find(lo);
      const SpaceTimeCell* ch = patch.find(hi);
      if (cl && ch) c.grad.col(j) = (ch->height - cl->height) / (2.0 * cell);
      else if (ch) c.grad.col(j) = (ch->height - c.height) / cell;
      else if (cl) c.grad.col(j) = (c.height - cl->height) / cell;
      else c.grad_ok = false;
    }
  }

  // Parabolic Holder seminorm over sampled cell pairs.
  double norm = 0.0;
  const int n = static_cast<int>(patch.cells.size());
  int stride = std::max(1, n * n / 200000);
  int pair_id = 0;
  for (int a = 0; a < n; ++a) {
    if (!patch.cells[a].grad_ok) continue;
    for (int qd = a + 1; qd < n; ++qd) {
      if (pair_id++ % stride) continue;
      const auto& ca = patch.cells[a];
      const auto& cq = patch.cells[qd];
      Vec dp = cq.center - ca.center;
      double dist2 = dp.squaredNorm() + std::abs(cq.tcenter - ca.tcenter);
      if (dist2 < 0.25 * cell * cell) continue;
      double dev = (cq.height - ca.height - ca.grad * dp).norm();
      norm = std::max(norm, dev / std::pow(dist2, 0.5 * (1.0 + opt.alpha)));
    }
  }
  patch.c1alpha_norm = norm;
  return patch;
}

}  // namespace gmtlab
