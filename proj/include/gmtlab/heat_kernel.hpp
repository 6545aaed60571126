// Cutoff m-dimensional backward heat kernel rho_R and its residual identity.
#pragma once

#include <gmtlab/geometry.hpp>

namespace gmtlab {

/// rho_R(x,t) = (4 pi (-t))^{-m/2} exp(-|x|^2 / 4(-t)) phi(|x|/R) with a fixed
/// cutoff profile phi: 1 on [0,1/2], 0 at 1, cubic blend in between. The blend
/// has |phi'| <= 3 with equality at its midpoint, within the definition's
/// budget. phi is C^1 rather than C-infinity; only phi and phi' enter any
/// computed quantity.
struct HeatKernelSpec {
  int m = 2;
  double R = 1.0;

  static double phi(double s) {
    if (s <= 0.5) return 1.0;
    if (s >= 1.0) return 0.0;
    double tau = 2.0 * s - 1.0;
    return 1.0 - tau * tau * (3.0 - 2.0 * tau);
  }
  static double dphi(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    double tau = 2.0 * s - 1.0;
    return -12.0 * tau * (1.0 - tau);
  }
  static double d2phi(double s) {
    if (s <= 0.5 || s >= 1.0) return 0.0;
    double tau = 2.0 * s - 1.0;
    return -24.0 * (1.0 - 2.0 * tau);
  }
};

struct HeatKernelValue {
  double value = 0.0;
  Vec gradient;
  double dt = 0.0;
};

inline HeatKernelValue heat_kernel(const Vec& x, double t, const HeatKernelSpec& spec) {
  if (t >= 0) throw error("heat_kernel: t must be negative");
  const int d = static_cast<int>(x.size());
  HeatKernelValue out;
  out.gradient = Vec::Zero(d);
  const double rho = x.norm();
  if (rho >= spec.R) return out;

  const double tau = -t;
  const double g = std::pow(4.0 * M_PI * tau, -0.5 * spec.m) * std::exp(-x.squaredNorm() / (4.0 * tau));
  const double phi = HeatKernelSpec::phi(rho / spec.R);
  const double dphi = HeatKernelSpec::dphi(rho / spec.R);

  out.value = g * phi;
  out.gradient = g * phi * (-x / (2.0 * tau));
  if (rho > 0 && dphi != 0.0) out.gradient += g * dphi * x / (rho * spec.R);
  out.dt = phi * g * (0.5 * spec.m / tau - x.squaredNorm() / (4.0 * tau * tau));
  return out;
}

/// | d_t rho_R + div_S grad rho_R + |S^perp grad rho_R|^2 / rho_R | evaluated
/// analytically; vanishes identically where the cutoff is inactive.
inline double kernel_residual(const Vec& x, double t, const Plane& S, const HeatKernelSpec& spec) {
  if (t >= 0) throw error("kernel_residual: t must be negative");
  const int d = static_cast<int>(x.size());
  const double rho = x.norm();
  if (rho >= spec.R) throw error("kernel_residual: kernel vanishes at x");

  const double tau = -t;
  const double g = std::pow(4.0 * M_PI * tau, -0.5 * spec.m) * std::exp(-x.squaredNorm() / (4.0 * tau));
  const double s = rho / spec.R;
  const double phi = HeatKernelSpec::phi(s);
  const double dphi = HeatKernelSpec::dphi(s);
  const double d2phi = HeatKernelSpec::d2phi(s);
  if (phi <= 0) throw error("kernel_residual: kernel vanishes at x");

  Vec grad_g = g * (-x / (2.0 * tau));
  Mat hess_g = g * (x * x.transpose() / (4.0 * tau * tau) - Mat::Identity(d, d) / (2.0 * tau));

  Vec grad_phi = Vec::Zero(d);
  Mat hess_phi = Mat::Zero(d, d);
  if (rho > 0) {
    grad_phi = dphi * x / (rho * spec.R);
    hess_phi = d2phi * x * x.transpose() / (rho * rho * spec.R * spec.R) +
               dphi * (Mat::Identity(d, d) / (rho * spec.R) -
                       x * x.transpose() / (rho * rho * rho * spec.R));
  }

  double value = g * phi;
  Vec grad = phi * grad_g + g * grad_phi;
  Mat hess = phi * hess_g + grad_g * grad_phi.transpose() + grad_phi * grad_g.transpose() +
             g * hess_phi;
  double dt = phi * g * (0.5 * spec.m / tau - x.squaredNorm() / (4.0 * tau * tau));

  double div_S = trace_over_plane(hess, S);
  Vec normal_grad = grad - S.tangential(grad);
  return dt + div_S + normal_grad.squaredNorm() / value;
}

}  // namespace gmtlab
