// Polynomial scalar/vector fields with analytic derivatives, plus C^1 radial cutoffs.
#pragma once

#include <gmtlab/geometry.hpp>

#include <random>
#include <vector>

namespace gmtlab {

/// One monomial c * prod_i x_i^{e_i}.
struct Monomial {
  double coef = 0.0;
  Eigen::VectorXi exps;  // length d

  int degree() const { return exps.sum(); }

  double eval(const Vec& x) const {
    double v = coef;
    for (int i = 0; i < exps.size(); ++i)
      for (int k = 0; k < exps[i]; ++k) v *= x[i];
    return v;
  }

  // d/dx_j
  double eval_d(const Vec& x, int j) const {
    if (exps[j] == 0) return 0.0;
    double v = coef * exps[j];
    for (int i = 0; i < exps.size(); ++i) {
      int e = exps[i] - (i == j ? 1 : 0);
      for (int k = 0; k < e; ++k) v *= x[i];
    }
    return v;
  }

  // d^2/dx_j dx_k
  double eval_dd(const Vec& x, int j, int k) const {
    Eigen::VectorXi e = exps;
    double c = coef;
    if (e[j] == 0) return 0.0;
    c *= e[j];
    e[j] -= 1;
    if (e[k] == 0) return 0.0;
    c *= e[k];
    e[k] -= 1;
    double v = c;
    for (int i = 0; i < e.size(); ++i)
      for (int q = 0; q < e[i]; ++q) v *= x[i];
    return v;
  }
};

/// Scalar polynomial with analytic gradient and Hessian.
class ScalarPoly {
public:
  ScalarPoly() = default;
  ScalarPoly(int d, std::vector<Monomial> terms) : d_(d), terms_(std::move(terms)) {}

  static ScalarPoly zero(int d) { return ScalarPoly(d, {}); }

  static ScalarPoly constant(int d, double c) {
    Monomial m{c, Eigen::VectorXi::Zero(d)};
    return ScalarPoly(d, {m});
  }

  /// Random polynomial of degree <= deg with per-degree coefficient decay.
  static ScalarPoly random(int d, int deg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Monomial> terms;
    Eigen::VectorXi e = Eigen::VectorXi::Zero(d);
    enumerate(d, deg, 0, e, [&](const Eigen::VectorXi& exps) {
      int k = exps.sum();
      double scale = 1.0 / (1.0 + k * k);  // keep higher derivatives comparable
      terms.push_back({scale * gauss(rng), exps});
    });
    return ScalarPoly(d, std::move(terms));
  }

  int dim() const { return d_; }
  const std::vector<Monomial>& terms() const { return terms_; }

  double value(const Vec& x) const {
    double v = 0.0;
    for (const auto& t : terms_) v += t.eval(x);
    return v;
  }

  Vec gradient(const Vec& x) const {
    Vec g = Vec::Zero(d_);
    for (const auto& t : terms_)
      for (int j = 0; j < d_; ++j) g[j] += t.eval_d(x, j);
    return g;
  }

  Mat hessian(const Vec& x) const {
    Mat h = Mat::Zero(d_, d_);
    for (const auto& t : terms_)
      for (int j = 0; j < d_; ++j)
        for (int k = j; k < d_; ++k) {
          double v = t.eval_dd(x, j, k);
          h(j, k) += v;
          if (k != j) h(k, j) += v;
        }
    return h;
  }

private:
  template <class F>
  static void enumerate(int d, int deg, int i, Eigen::VectorXi& e, F&& f) {
    if (i == d) {
      f(e);
      return;
    }
    for (int k = 0; e.head(i).sum() + k <= deg; ++k) {
      e[i] = k;
      enumerate(d, deg, i + 1, e, f);
    }
    e[i] = 0;
  }

  int d_ = 0;
  std::vector<Monomial> terms_;
};

/// C^1 radial bump: 1 on |x-c| <= r_in, 0 on |x-c| >= r_out, cubic blend between.
struct RadialCutoff {
  Vec center;
  double r_in = 0.0;
  double r_out = 0.0;
  bool trivial = false;  // cutoff identically 1 (no compact support)

  static RadialCutoff none(int d) {
    RadialCutoff c;
    c.center = Vec::Zero(d);
    c.trivial = true;
    return c;
  }

  double value(const Vec& x) const {
    if (trivial) return 1.0;
    double rho = (x - center).norm();
    if (rho <= r_in) return 1.0;
    if (rho >= r_out) return 0.0;
    double tau = (rho - r_in) / (r_out - r_in);
    return 1.0 - tau * tau * (3.0 - 2.0 * tau);
  }

  Vec gradient(const Vec& x) const {
    if (trivial) return Vec::Zero(x.size());
    Vec rel = x - center;
    double rho = rel.norm();
    if (rho <= r_in || rho >= r_out || rho == 0.0) return Vec::Zero(x.size());
    double tau = (rho - r_in) / (r_out - r_in);
    double dpsi = -6.0 * tau * (1.0 - tau) / (r_out - r_in);
    return (dpsi / rho) * rel;
  }
};

/// Compactly supported C^1 vector field F(x) = psi(x) P(x) with polynomial P of degree <= 3.
class TestField {
public:
  TestField() = default;
  TestField(std::vector<ScalarPoly> components, RadialCutoff cutoff)
      : comps_(std::move(components)), cutoff_(std::move(cutoff)) {}

  static TestField random(int d, const RadialCutoff& cutoff, std::mt19937_64& rng, int deg = 3) {
    std::vector<ScalarPoly> comps;
    comps.reserve(d);
    for (int i = 0; i < d; ++i) comps.push_back(ScalarPoly::random(d, deg, rng));
    return TestField(std::move(comps), cutoff);
  }

  /// F(x) = x with a trivial cutoff (useful on compact surfaces).
  static TestField identity(int d) {
    std::vector<ScalarPoly> comps;
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXi e = Eigen::VectorXi::Zero(d);
      e[i] = 1;
      comps.push_back(ScalarPoly(d, {Monomial{1.0, e}}));
    }
    return TestField(std::move(comps), RadialCutoff::none(d));
  }

  static TestField constant(const Vec& c) {
    const int d = static_cast<int>(c.size());
    std::vector<ScalarPoly> comps;
    for (int i = 0; i < d; ++i) comps.push_back(ScalarPoly::constant(d, c[i]));
    return TestField(std::move(comps), RadialCutoff::none(d));
  }

  int dim() const { return static_cast<int>(comps_.size()); }
  const RadialCutoff& cutoff() const { return cutoff_; }

  Vec value(const Vec& x) const {
    const int d = dim();
    double psi = cutoff_.value(x);
    Vec v = Vec::Zero(d);
    if (psi == 0.0) return v;
    for (int i = 0; i < d; ++i) v[i] = psi * comps_[i].value(x);
    return v;
  }

  /// Jacobian J_ij = dF_i/dx_j.
  Mat jacobian(const Vec& x) const {
    const int d = dim();
    double psi = cutoff_.value(x);
    Mat j = Mat::Zero(d, d);
    if (psi == 0.0) return j;
    Vec dpsi = cutoff_.gradient(x);
    for (int i = 0; i < d; ++i) {
      double pi = comps_[i].value(x);
      Vec gi = comps_[i].gradient(x);
      j.row(i) = (psi * gi + pi * dpsi).transpose();
    }
    return j;
  }

  /// sup over samples of |F| + |grad F| (row-sum scale), used to normalize residuals.
  double c1_scale(const Mat& points) const {
    double s = 0.0;
    for (int i = 0; i < points.rows(); ++i) {
      Vec x = points.row(i).transpose();
      s = std::max(s, value(x).norm() + jacobian(x).norm());
    }
    return s;
  }

private:
  std::vector<ScalarPoly> comps_;
  RadialCutoff cutoff_;
};

/// Scalar field (x,t) -> sum_j (c_j + b_j t) mono_j(x); analytic in space and time.
class SpaceTimePoly {
public:
  SpaceTimePoly() = default;
  SpaceTimePoly(ScalarPoly steady, ScalarPoly rate) : p0_(std::move(steady)), p1_(std::move(rate)) {}

  static SpaceTimePoly steady(ScalarPoly p) {
    int d = p.dim();
    return SpaceTimePoly(std::move(p), ScalarPoly::zero(d));
  }

  int dim() const { return p0_.dim(); }

  double value(const Vec& x, double t) const { return p0_.value(x) + t * p1_.value(x); }
  Vec gradient(const Vec& x, double t) const { return p0_.gradient(x) + t * p1_.gradient(x); }
  Mat hessian(const Vec& x, double t) const { return p0_.hessian(x) + t * p1_.hessian(x); }
  double dt(const Vec& x, double /*t*/) const { return p1_.value(x); }

private:
  ScalarPoly p0_;
  ScalarPoly p1_;
};

}  // namespace gmtlab
