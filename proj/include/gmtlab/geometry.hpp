// Planes in the Grassmannian Gr(m,d), projections, and the trace_m functional.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

namespace gmtlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Volume of the unit m-ball, pi^{m/2} / Gamma(m/2 + 1).
inline double unit_ball_volume(int m) {
  if (m < 1) throw error("unit_ball_volume: m must be >= 1");
  return std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m + 1.0);
}

/// Ambient dimension d, surface dimension m, and omega_m = |B^m_1|.
struct GeometryContext {
  int d = 0;
  int m = 0;
  double omega_m = 0.0;

  GeometryContext() = default;
  GeometryContext(int d_, int m_) : d(d_), m(m_) {
    if (d < 2) throw error("GeometryContext: d must be >= 2");
    if (m < 1 || m >= d) throw error("GeometryContext: need 1 <= m < d");
    omega_m = unit_ball_volume(m);
  }
};

/// An m-dimensional linear subspace of R^d, stored as d x m orthonormal columns.
class Plane {
public:
  Plane() = default;

  /// Orthonormalizes the columns of `span` (thin QR). Throws if rank-deficient.
  static Plane from_span(const Mat& span) {
    const int d = static_cast<int>(span.rows());
    const int m = static_cast<int>(span.cols());
    if (m < 1 || m >= d) throw error("Plane: need 1 <= m < d");
    Eigen::ColPivHouseholderQR<Mat> qr(span);
    if (qr.rank() < m) throw error("Plane: spanning set is rank-deficient");
    Eigen::HouseholderQR<Mat> hqr(span);
    Mat q = hqr.householderQ() * Mat::Identity(d, m);
    // Fix the sign so the representative is deterministic.
    for (int j = 0; j < m; ++j) {
      int imax;
      q.col(j).cwiseAbs().maxCoeff(&imax);
      if (q(imax, j) < 0) q.col(j) = -q.col(j);
    }
    return Plane(std::move(q));
  }

  /// Assumes `basis` already orthonormal; verifies the Gram matrix to `tol`.
  static Plane from_orthonormal(const Mat& basis, double tol = 1e-10) {
    const int m = static_cast<int>(basis.cols());
    double dev = (basis.transpose() * basis - Mat::Identity(m, m)).cwiseAbs().maxCoeff();
    if (dev > tol) throw error("Plane: basis is not orthonormal");
    return Plane(Mat(basis));
  }

  /// Coordinate plane spanned by the given axes.
  static Plane coordinate(int d, const std::vector<int>& axes) {
    Mat b = Mat::Zero(d, static_cast<int>(axes.size()));
    for (size_t j = 0; j < axes.size(); ++j) b(axes[j], static_cast<int>(j)) = 1.0;
    return Plane(std::move(b));
  }

  /// Haar-ish random plane: QR of a Gaussian d x m matrix.
  static Plane random(int d, int m, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Mat g(d, m);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < m; ++j) g(i, j) = gauss(rng);
    return from_span(g);
  }

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  const Mat& basis() const { return basis_; }

  Mat projector() const { return basis_ * basis_.transpose(); }

  Vec tangential(const Vec& x) const { return basis_ * (basis_.transpose() * x); }
  Vec normal_part(const Vec& x) const { return x - tangential(x); }

  /// In-plane coordinates of x (length m).
  Vec coords(const Vec& x) const { return basis_.transpose() * x; }

  /// Orthonormal basis of the orthogonal complement, d x (d-m).
  Mat normal_basis() const {
    const int d = ambient_dim();
    const int m = dim();
    Eigen::HouseholderQR<Mat> qr(basis_);
    Mat q = qr.householderQ();
    return q.rightCols(d - m);
  }

private:
  explicit Plane(Mat basis) : basis_(std::move(basis)) {}
  Mat basis_;
};

struct ProjectionSplit {
  Vec tangential;
  Vec normal;
};

/// Splits x = Sx + S^perp x.
inline ProjectionSplit project(const Plane& S, const Vec& x) {
  if (x.size() != S.ambient_dim()) throw error("project: dimension mismatch");
  Vec t = S.tangential(x);
  return {t, x - t};
}

/// Operator-norm distance |P_S - P_T| between projectors. Always in [0, 1].
inline double plane_distance(const Plane& S, const Plane& T) {
  if (S.ambient_dim() != T.ambient_dim() || S.dim() != T.dim())
    throw error("plane_distance: dimension mismatch");
  Mat diff = S.projector() - T.projector();
  Eigen::SelfAdjointEigenSolver<Mat> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// trace_S A = sum_i A xi_i . xi_i over an orthonormal basis {xi_i} of S.
inline double trace_over_plane(const Mat& A, const Plane& S) {
  if (A.rows() != S.ambient_dim() || A.cols() != S.ambient_dim())
    throw error("trace_over_plane: dimension mismatch");
  const Mat& b = S.basis();
  double sum = 0.0;
  for (int j = 0; j < b.cols(); ++j) sum += b.col(j).dot(A * b.col(j));
  return sum;
}

/// Same contraction for a raw orthonormal basis stored as an m x d block.
inline double trace_over_basis_rows(const Mat& A, const Eigen::Ref<const Mat>& rows) {
  double sum = 0.0;
  for (int j = 0; j < rows.rows(); ++j) {
    Vec xi = rows.row(j).transpose();
    sum += xi.dot(A * xi);
  }
  return sum;
}

/// Sum of the m smallest eigenvalues of a symmetric A; equals min_S trace_S A.
inline double trace_m_min(const Mat& A, int m) {
  const int d = static_cast<int>(A.rows());
  if (m < 1 || m > d) throw error("trace_m_min: m out of range");
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff()))
    throw error("trace_m_min: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(m).sum();  // ascending order
}

}  // namespace gmtlab
