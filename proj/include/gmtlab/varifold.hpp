// Discrete varifolds: weighted atoms with tangent planes, multiplicities and
// generalized mean curvature, plus the measurements built on them.
#pragma once

#include <gmtlab/fields.hpp>
#include <gmtlab/geometry.hpp>

#include <algorithm>
#include <limits>
#include <utility>
#include <vector>

namespace gmtlab {

struct Ball {
  Vec center;
  double radius = 0.0;

  bool contains(const Vec& x) const { return (x - center).norm() <= radius; }
};

/// Quadrature-form approximation of an m-rectifiable measure.
/// Storage is struct-of-arrays; per-atom bases are m x d row blocks of B_.
class DiscreteVarifold {
public:
  DiscreteVarifold() = default;
  explicit DiscreteVarifold(GeometryContext ctx) : ctx_(ctx) {}

  void reserve(int n) {
    X_.conservativeResize(n, ctx_.d);
    w_.conservativeResize(n);
    mult_.conservativeResize(n);
    H_.conservativeResize(n, ctx_.d);
    B_.conservativeResize(n * ctx_.m, ctx_.d);
    n_ = 0;
    capacity_ = n;
  }

  void add_atom(const Vec& x, double weight, double multiplicity, const Vec& H, const Plane& plane) {
    add_atom(x, weight, multiplicity, H, plane.basis().transpose());
  }

  void add_atom(const Vec& x, double weight, double multiplicity, const Vec& H,
                const Eigen::Ref<const Mat>& basis_rows) {
    if (n_ == capacity_) grow();
    if (weight < 0) throw error("DiscreteVarifold: negative weight");
    if (multiplicity < 1) throw error("DiscreteVarifold: multiplicity below 1");
    X_.row(n_) = x.transpose();
    w_[n_] = weight;
    mult_[n_] = multiplicity;
    H_.row(n_) = H.transpose();
    B_.block(n_ * ctx_.m, 0, ctx_.m, ctx_.d) = basis_rows;
    ++n_;
  }

  /// Records Lambda = ||H||_inf and freezes the atom set. Lambda must dominate
  /// the observed curvatures; it is stored, never silently re-derived.
  void finalize(double lambda) {
    double hmax = 0.0;
    for (int i = 0; i < n_; ++i) hmax = std::max(hmax, H_.row(i).norm());
    if (lambda < hmax - 1e-12)
      throw error("DiscreteVarifold: lambda below observed |H|");
    lambda_ = lambda;
    double mass = total_mass();
    if (n_ > 0 && !(mass > 0) ) throw error("DiscreteVarifold: total mass must be positive");
  }

  const GeometryContext& context() const { return ctx_; }
  int size() const { return n_; }
  double lambda() const { return lambda_; }

  Vec position(int i) const { return X_.row(i).transpose(); }
  double weight(int i) const { return w_[i]; }
  double multiplicity(int i) const { return mult_[i]; }
  double atom_mass(int i) const { return w_[i] * mult_[i]; }
  Vec curvature(int i) const { return H_.row(i).transpose(); }

  Eigen::Ref<const Mat> basis_rows(int i) const { return B_.block(i * ctx_.m, 0, ctx_.m, ctx_.d); }
  Plane plane(int i) const { return Plane::from_orthonormal(basis_rows(i).transpose(), 1e-8); }

  const Mat& positions() const { return X_; }

  double total_mass() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s += atom_mass(i);
    return s;
  }

  std::vector<int> atoms_in(const Ball& b) const {
    std::vector<int> idx;
    for (int i = 0; i < n_; ++i)
      if ((X_.row(i).transpose() - b.center).norm() <= b.radius) idx.push_back(i);
    return idx;
  }

  /// Copy with every atom translated by `shift` (base-point normalization).
  DiscreteVarifold translated(const Vec& shift) const {
    DiscreteVarifold v = *this;
    v.X_.rowwise() += shift.transpose();
    return v;
  }

  double min_distance_to(const Vec& p) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_; ++i) best = std::min(best, (X_.row(i).transpose() - p).norm());
    return best;
  }

private:
  void grow() {
    int cap = std::max(64, capacity_ * 2);
    X_.conservativeResize(cap, ctx_.d);
    w_.conservativeResize(cap);
    mult_.conservativeResize(cap);
    H_.conservativeResize(cap, ctx_.d);
    B_.conservativeResize(cap * ctx_.m, ctx_.d);
    capacity_ = cap;
  }

  GeometryContext ctx_;
  Mat X_;
  Vec w_;
  Vec mult_;
  Mat H_;
  Mat B_;
  int n_ = 0;
  int capacity_ = 0;
  double lambda_ = 0.0;
};

inline double mass_in_ball(const DiscreteVarifold& v, const Ball& b) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i)
    if ((v.position(i) - b.center).norm() <= b.radius) s += v.atom_mass(i);
  return s;
}

/// M(B_r(x)) / (omega_m r^m).
inline double density_ratio(const DiscreteVarifold& v, const Ball& b) {
  if (b.radius <= 0) throw error("density_ratio: radius must be positive");
  const auto& ctx = v.context();
  return mass_in_ball(v, b) / (ctx.omega_m * std::pow(b.radius, ctx.m));
}

struct FirstVariation {
  double value = 0.0;
  bool support_ok = true;  // cutoff support inside the data bounding box
};

/// int div_{T_xM} F dM as a quadrature sum; equals -int H.F dM up to
/// discretization for consistent inputs.
inline FirstVariation first_variation(const DiscreteVarifold& v, const TestField& F) {
  FirstVariation out;
  const int d = v.context().d;
  if (F.dim() != d) throw error("first_variation: dimension mismatch");

  if (!F.cutoff().trivial) {
    Vec lo = v.positions().colwise().minCoeff().transpose();
    Vec hi = v.positions().colwise().maxCoeff().transpose();
    for (int k = 0; k < d; ++k) {
      if (F.cutoff().center[k] - F.cutoff().r_out < lo[k] - 1e-12 ||
          F.cutoff().center[k] + F.cutoff().r_out > hi[k] + 1e-12)
        out.support_ok = false;
    }
  }

  double sum = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    Vec x = v.position(i);
    if (!F.cutoff().trivial) {
      double rho = (x - F.cutoff().center).norm();
      if (rho >= F.cutoff().r_out) continue;
    }
    Mat jac = F.jacobian(x);
    sum += v.atom_mass(i) * trace_over_basis_rows(jac, v.basis_rows(i));
  }
  out.value = sum;
  return out;
}

/// int H.F dM (quadrature).
inline double curvature_pairing(const DiscreteVarifold& v, const TestField& F) {
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += v.atom_mass(i) * v.curvature(i).dot(F.value(v.position(i)));
  return s;
}

namespace detail {

// Half the diameter of a point set (rows of P). Exact: 1-D by min/max, 2-D by
// convex hull + antipodal scan, higher dimensions by pairwise scan.
inline double half_diameter(const Mat& P) {
  const int n = static_cast<int>(P.rows());
  const int k = static_cast<int>(P.cols());
  if (n == 0) return 0.0;
  if (k == 1) {
    double lo = P.col(0).minCoeff(), hi = P.col(0).maxCoeff();
    return 0.5 * (hi - lo);
  }
  if (k == 2) {
    // Andrew monotone chain.
    std::vector<std::pair<double, double>> pts(n);
    for (int i = 0; i < n; ++i) pts[i] = {P(i, 0), P(i, 1)};
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    auto cross = [](const std::pair<double, double>& o, const std::pair<double, double>& a,
                    const std::pair<double, double>& b) {
      return (a.first - o.first) * (b.second - o.second) -
             (a.second - o.second) * (b.first - o.first);
    };
    std::vector<std::pair<double, double>> hull(2 * pts.size());
    size_t h = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
      while (h >= 2 && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
      hull[h++] = pts[i];
    }
    for (size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
      while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= 0) --h;
      hull[h++] = pts[i];
    }
    hull.resize(h > 1 ? h - 1 : h);
    double best = 0.0;
    for (size_t i = 0; i < hull.size(); ++i)
      for (size_t j = i + 1; j < hull.size(); ++j) {
        double dx = hull[i].first - hull[j].first, dy = hull[i].second - hull[j].second;
        best = std::max(best, dx * dx + dy * dy);
      }
    return 0.5 * std::sqrt(best);
  }
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) best = std::max(best, (P.row(i) - P.row(j)).squaredNorm());
  return 0.5 * std::sqrt(best);
}

}  // namespace detail

/// osc_S(M, B) = half the diameter of supp M cap B in the directions normal to S.
inline double oscillation(const DiscreteVarifold& v, const Plane& S, const Ball& b) {
  auto idx = v.atoms_in(b);
  if (idx.empty()) throw error("oscillation: empty support in ball");
  Mat nb = S.normal_basis();  // d x (d-m)
  Mat P(static_cast<int>(idx.size()), nb.cols());
  for (size_t r = 0; r < idx.size(); ++r)
    P.row(static_cast<int>(r)) = (nb.transpose() * v.position(idx[r])).transpose();
  return detail::half_diameter(P);
}

/// Top-m principal directions of the mass-weighted second moment of atoms in B.
inline Plane best_fit_plane(const DiscreteVarifold& v, const Ball& b) {
  auto idx = v.atoms_in(b);
  const int d = v.context().d;
  const int m = v.context().m;
  if (static_cast<int>(idx.size()) < m + 1) throw error("best_fit_plane: too few atoms in ball");

  double wsum = 0.0;
  for (int i : idx) wsum += v.atom_mass(i);
  Vec mean = Vec::Zero(d);
  if (wsum > 0) {
    for (int i : idx) mean += v.atom_mass(i) * v.position(i);
    mean /= wsum;
  } else {
    for (int i : idx) mean += v.position(i);
    mean /= static_cast<double>(idx.size());
  }

  Mat cov = Mat::Zero(d, d);
  for (int i : idx) {
    Vec rel = v.position(i) - mean;
    double wi = wsum > 0 ? v.atom_mass(i) : 1.0;
    cov += wi * rel * rel.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  if (es.eigenvalues()[d - m] <= 1e-14 * std::max(1.0, es.eigenvalues()[d - 1]))
    throw error("best_fit_plane: rank-deficient point set");
  Mat basis = es.eigenvectors().rightCols(m);
  return Plane::from_span(basis);
}

}  // namespace gmtlab
