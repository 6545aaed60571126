// Truncated elliptic kernels h and g_{r,s}, the weighted density I(r), the
// weighted monotonicity check, the partial Harnack certificate, and the
// oscillation decay fit. All ops take the varifold pre-translated so the base
// point is the origin.
#pragma once

#include <gmtlab/convex_weight.hpp>
#include <gmtlab/varifold.hpp>

#include <limits>
#include <optional>
#include <vector>

namespace gmtlab {

struct KernelSpec {
  int m = 3;
  double r = 0.0;
  double s = 0.0;
};

struct KernelValue {
  double value = 0.0;
  Vec gradient;
};

/// Truncated fundamental-solution kernel. For m > 2,
///   h = (m/2 - (m-2)|x|^2/2) / (omega_m m (m-2)) inside B_1, |x|^{2-m}/(omega_m m (m-2)) outside;
/// for m = 2 the logarithmic completion (1-|x|^2)/(4 pi) inside, -log|x|/(2 pi)
/// outside is the unique C^1 match of the interior gradient -x/(m omega_m).
inline KernelValue kernel_h(const Vec& x, int m) {
  if (m < 2) throw error("kernel_h: m must be >= 2");
  const double om = unit_ball_volume(m);
  const double rho2 = x.squaredNorm();
  const double rho = std::sqrt(rho2);
  KernelValue out;
  if (m == 2) {
    out.value = rho <= 1.0 ? (1.0 - rho2) / (4.0 * M_PI) : -std::log(rho) / (2.0 * M_PI);
  } else {
    double c = 1.0 / (om * m * (m - 2));
    out.value = rho <= 1.0 ? c * (0.5 * m - 0.5 * (m - 2) * rho2) : c * std::pow(rho, 2 - m);
  }
  out.gradient = rho <= 1.0 ? Vec(-x / (m * om)) : Vec(-x / (m * om * std::pow(rho, m)));
  return out;
}

/// Hessian of h away from |x| = 1:
///   -(1/omega_m) [ I/m ]                      inside,
///   -(1/omega_m) |x|^{-m} [ I/m - x x^T/|x|^2 ]  outside.
inline Mat kernel_h_hessian(const Vec& x, int m) {
  const double om = unit_ball_volume(m);
  const int d = static_cast<int>(x.size());
  const double rho2 = x.squaredNorm();
  if (rho2 <= 1.0) return Mat(-Mat::Identity(d, d) / (m * om));
  double rho_m = std::pow(std::sqrt(rho2), m);
  return Mat((-1.0 / (om * rho_m)) * (Mat::Identity(d, d) / m - x * x.transpose() / rho2));
}

/// g_{r,s}(x) = r^{2-m} h(x/r) - s^{2-m} h(x/s); non-negative, vanishes outside
/// B_s. In the logarithmic case m = 2 the difference is constant log(r/s)/(2 pi)
/// outside B_s, so that constant is subtracted; gradients are unaffected.
inline double kernel_g(const Vec& x, const KernelSpec& spec) {
  if (!(spec.r > 0 && spec.r < spec.s)) throw error("kernel_g: need 0 < r < s");
  if (x.norm() >= spec.s) return 0.0;
  double vr = kernel_h(x / spec.r, spec.m).value;
  double vs = kernel_h(x / spec.s, spec.m).value;
  double shift = spec.m == 2 ? std::log(spec.s / spec.r) / (2.0 * M_PI) : 0.0;
  return std::pow(spec.r, 2 - spec.m) * vr - std::pow(spec.s, 2 - spec.m) * vs + shift;
}

struct KernelGDivergence {
  double value = 0.0;      // g_{r,s}(x)
  double div_S = 0.0;      // div_S grad g_{r,s}(x)
  double bound = 0.0;      // -chi_{B_r}/(omega_m r^m) + chi_{B_s}/(omega_m s^m)
  double slack = 0.0;      // bound - div_S  (contract: >= 0)
};

inline KernelGDivergence kernel_g_divergence(const Vec& x, const KernelSpec& spec, const Plane& S) {
  if (!(spec.r > 0 && spec.r < spec.s)) throw error("kernel_g: need 0 < r < s");
  const double om = unit_ball_volume(spec.m);
  const double rho = x.norm();
  KernelGDivergence out;
  out.value = kernel_g(x, spec);
  Mat hess = std::pow(spec.r, -spec.m) * kernel_h_hessian(x / spec.r, spec.m) -
             std::pow(spec.s, -spec.m) * kernel_h_hessian(x / spec.s, spec.m);
  out.div_S = trace_over_plane(hess, S);
  out.bound = (rho <= spec.r ? -1.0 / (om * std::pow(spec.r, spec.m)) : 0.0) +
              (rho <= spec.s ? 1.0 / (om * std::pow(spec.s, spec.m)) : 0.0);
  out.slack = out.bound - out.div_S;
  return out;
}

/// I(r) = (omega_m r^m)^{-1} int_{B_r} f dM for the pre-translated varifold.
inline double weighted_density(const DiscreteVarifold& v, const ConvexWeight& f, double r) {
  if (r <= 0) throw error("weighted_density: r must be positive");
  const auto& ctx = v.context();
  double sum = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i);
    if (x.norm() <= r) sum += v.atom_mass(i) * f.value(x);
  }
  return sum / (ctx.omega_m * std::pow(r, ctx.m));
}

struct DensityCurve {
  std::vector<double> radii;
  std::vector<double> values;   // I(r)
  std::vector<double> slack;    // I(r) - f(0) + C0 Lambda (||f||_inf + r) r
  double min_slack = 0.0;
  double f_at_base = 0.0;
  double f_sup = 0.0;           // ||f||_{L^inf(M)} over atoms within max radius
  double smallest_C0 = 0.0;     // least C0 making every slack non-negative
  bool density_hypothesis_ok = true;
  double tol_disc = 0.0;
};

struct MonotonicityOptions {
  double base_point_tol = 1e-8;
  double tol_disc = 0.0;        // reported; measured by the harness
};

/// Checks I(r) >= f(0) - C0 Lambda (||f||_inf + r) r across the given radii.
inline DensityCurve verify_weighted_monotonicity(const DiscreteVarifold& v, const ConvexWeight& f,
                                                 const std::vector<double>& radii, double C0,
                                                 const MonotonicityOptions& opt = {}) {
  if (radii.empty()) throw error("verify_weighted_monotonicity: no radii");
  if (v.min_distance_to(Vec::Zero(v.context().d)) > opt.base_point_tol)
    throw error("verify_weighted_monotonicity: base point not in support");

  DensityCurve out;
  out.tol_disc = opt.tol_disc;
  out.f_at_base = f.value(Vec::Zero(v.context().d));
  double rmax = *std::max_element(radii.begin(), radii.end());
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i);
    if (x.norm() <= rmax) out.f_sup = std::max(out.f_sup, std::abs(f.value(x)));
  }

  const double lambda = v.lambda();
  out.min_slack = std::numeric_limits<double>::infinity();
  for (double r : radii) {
    double I = weighted_density(v, f, r);
    double slack = I - out.f_at_base + C0 * lambda * (out.f_sup + r) * r;
    out.radii.push_back(r);
    out.values.push_back(I);
    out.slack.push_back(slack);
    out.min_slack = std::min(out.min_slack, slack);
    if (lambda > 0) {
      double needed = (out.f_at_base - I) / (lambda * (out.f_sup + r) * r);
      out.smallest_C0 = std::max(out.smallest_C0, needed);
    }
    Ball b{Vec::Zero(v.context().d), r};
    if (density_ratio(v, b) > 1.5 + 1e-9) out.density_hypothesis_ok = false;
  }
  return out;
}

struct HarnackCertificate {
  double osc_R = 0.0;
  double osc_etaR = 0.0;
  bool hyp_flatness_ok = false;   // osc(B_R) <= eta R
  bool hyp_curvature_ok = false;  // Lambda <= osc(B_R) / R^2
  bool hyp_density_ok = false;    // M(B_r) <= (3/2) omega_m r^m on sampled r
  bool hyp_ok = false;
  enum class Conclusion { Holds, Fails, NotApplicable } conclusion = Conclusion::NotApplicable;
};

/// Evaluates the hypotheses and conclusion of the partial Harnack inequality
/// osc(B_{eta R}) <= (1 - eta) osc(B_R) around the origin.
inline HarnackCertificate harnack_certificate(const DiscreteVarifold& v, const Plane& S, double R,
                                              double eta) {
  const int d = v.context().d;
  Ball bR{Vec::Zero(d), R};
  Ball beta{Vec::Zero(d), eta * R};
  HarnackCertificate out;
  out.osc_R = oscillation(v, S, bR);
  out.hyp_flatness_ok = out.osc_R <= eta * R + 1e-12;
  out.hyp_curvature_ok = v.lambda() <= out.osc_R / (R * R) + 1e-12;
  out.hyp_density_ok = true;
  for (int k = 1; k <= 8; ++k) {
    Ball b{Vec::Zero(d), R * k / 8.0};
    if (density_ratio(v, b) > 1.5 + 1e-9) out.hyp_density_ok = false;
  }
  out.hyp_ok = out.hyp_flatness_ok && out.hyp_curvature_ok && out.hyp_density_ok;
  if (!out.hyp_ok) return out;
  out.osc_etaR = oscillation(v, S, beta);
  out.conclusion = out.osc_etaR <= (1.0 - eta) * out.osc_R + 1e-12
                       ? HarnackCertificate::Conclusion::Holds
                       : HarnackCertificate::Conclusion::Fails;
  return out;
}

struct DecayFit {
  std::vector<double> radii;
  std::vector<double> osc;
  double beta = 0.0;
  double C_fit = 0.0;
  bool degenerate = false;  // all oscillations at zero; beta reported as +inf
};

namespace detail {

/// Least-squares slope of log(osc) vs log(r); degenerate when fewer than two
/// positive points remain.
inline std::pair<double, bool> power_law_fit(const std::vector<double>& radii,
                                             const std::vector<double>& osc) {
  std::vector<std::pair<double, double>> pts;
  for (size_t k = 0; k < radii.size(); ++k)
    if (osc[k] > 1e-300) pts.push_back({std::log(radii[k]), std::log(osc[k])});
  if (pts.size() < 2) return {std::numeric_limits<double>::infinity(), true};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& p : pts) {
    sx += p.first;
    sy += p.second;
    sxx += p.first * p.first;
    sxy += p.first * p.second;
  }
  double n = static_cast<double>(pts.size());
  return {(n * sxy - sx * sy) / (n * sxx - sx * sx), false};
}

}  // namespace detail

/// Least-squares power-law fit of osc(B_r) over the given scales (fixed S).
/// C_fit is the smallest constant with osc(B_r) <= C_fit (osc(B_R)+Lambda R^2)(r/R)^beta.
inline DecayFit fit_decay(const DiscreteVarifold& v, const Plane& S, double R,
                          const std::vector<double>& scales) {
  if (scales.size() < 3) throw error("fit_decay: need at least 3 scales");
  const int d = v.context().d;
  DecayFit out;
  for (double r : scales) {
    out.radii.push_back(r);
    out.osc.push_back(oscillation(v, S, Ball{Vec::Zero(d), r}));
  }
  double osc_R = oscillation(v, S, Ball{Vec::Zero(d), R});
  double denom_scale = osc_R + v.lambda() * R * R;

  auto [beta, degenerate] = detail::power_law_fit(out.radii, out.osc);
  out.beta = beta;
  out.degenerate = degenerate;
  if (degenerate) {
    out.C_fit = 0.0;
    return out;
  }
  out.C_fit = 0.0;
  if (denom_scale > 0) {
    for (size_t k = 0; k < out.radii.size(); ++k) {
      double model = denom_scale * std::pow(out.radii[k] / R, out.beta);
      if (model > 0) out.C_fit = std::max(out.C_fit, out.osc[k] / model);
    }
    out.C_fit *= (1.0 + 1e-6);
  }
  return out;
}

}  // namespace gmtlab
