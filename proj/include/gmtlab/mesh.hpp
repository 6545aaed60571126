// Mesh ingestion: discrete Laplace-Beltrami of the coordinates gives the mean
// curvature vector (cotangent weights for surfaces, second differences for curves).
#pragma once

#include <gmtlab/varifold.hpp>

#include <array>
#include <map>
#include <set>
#include <vector>

namespace gmtlab {

struct TriangleMesh {
  Mat vertices;                          // n x d, d >= 3
  std::vector<std::array<int, 3>> faces;
};

struct PolylineMesh {
  Mat vertices;  // n x d, d >= 2
  bool closed = false;
};

namespace detail {

inline double triangle_area(const Vec& a, const Vec& b, const Vec& c) {
  Vec u = b - a, v = c - a;
  double g = u.squaredNorm() * v.squaredNorm() - std::pow(u.dot(v), 2);
  return 0.5 * std::sqrt(std::max(0.0, g));
}

inline double cotangent(const Vec& apex, const Vec& p, const Vec& q) {
  Vec u = p - apex, v = q - apex;
  double cosv = u.dot(v);
  double sinv = 2.0 * triangle_area(apex, p, q);
  return sinv > 0 ? cosv / sinv : 0.0;
}

// PCA plane of a local vertex cluster.
inline Plane local_fit_plane(const Mat& pts, int m) {
  const int d = static_cast<int>(pts.cols());
  Vec mean = pts.colwise().mean().transpose();
  Mat cov = Mat::Zero(d, d);
  for (int i = 0; i < pts.rows(); ++i) {
    Vec rel = pts.row(i).transpose() - mean;
    cov += rel * rel.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(cov);
  return Plane::from_span(es.eigenvectors().rightCols(m));
}

}  // namespace detail

/// Builds a DiscreteVarifold from a triangle mesh. Per vertex: H from the
/// cotangent Laplacian of the coordinates (codimension-free), weight = mixed
/// Voronoi area, plane = least-squares fit of the one-ring. Boundary vertices
/// get H = 0 and are excluded from the Lambda estimate.
inline DiscreteVarifold estimate_mean_curvature(const TriangleMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.rows());
  const int d = static_cast<int>(mesh.vertices.cols());
  GeometryContext ctx(d, 2);

  auto pos = [&](int i) { return Vec(mesh.vertices.row(i).transpose()); };

  Vec area = Vec::Zero(n);
  Mat lap = Mat::Zero(n, d);
  std::vector<std::set<int>> ring(n);
  std::map<std::pair<int, int>, int> edge_count;

  for (const auto& f : mesh.faces) {
    Vec a = pos(f[0]), b = pos(f[1]), c = pos(f[2]);
    double A = detail::triangle_area(a, b, c);
    if (A < 1e-14) throw error("estimate_mean_curvature: degenerate triangle");
    for (int k = 0; k < 3; ++k) {
      int i = f[k], j = f[(k + 1) % 3], o = f[(k + 2) % 3];
      ring[i].insert(j);
      ring[j].insert(i);
      double cot = detail::cotangent(pos(o), pos(i), pos(j));
      lap.row(i) += 0.5 * cot * (mesh.vertices.row(j) - mesh.vertices.row(i));
      lap.row(j) += 0.5 * cot * (mesh.vertices.row(i) - mesh.vertices.row(j));
      auto key = std::minmax(i, j);
      edge_count[{key.first, key.second}] += 1;
    }
    // Meyer mixed area: Voronoi for acute triangles, else 1/2 or 1/4 split.
    std::array<double, 3> sq = {(b - c).squaredNorm(), (c - a).squaredNorm(), (a - b).squaredNorm()};
    std::array<Vec, 3> v = {a, b, c};
    bool obtuse = false;
    int obtuse_at = -1;
    for (int k = 0; k < 3; ++k) {
      double opp = sq[k], adj1 = sq[(k + 1) % 3], adj2 = sq[(k + 2) % 3];
      if (opp > adj1 + adj2) {
        obtuse = true;
        obtuse_at = k;
      }
    }
    if (!obtuse) {
      for (int k = 0; k < 3; ++k) {
        int i = f[k];
        double cot1 = detail::cotangent(v[(k + 1) % 3], v[k], v[(k + 2) % 3]);
        double cot2 = detail::cotangent(v[(k + 2) % 3], v[k], v[(k + 1) % 3]);
        area[i] += 0.125 * (cot1 * sq[(k + 1) % 3] + cot2 * sq[(k + 2) % 3]);
      }
    } else {
      for (int k = 0; k < 3; ++k) area[f[k]] += (k == obtuse_at ? 0.5 : 0.25) * A;
    }
  }

  std::vector<bool> boundary(n, false);
  for (const auto& [e, cnt] : edge_count)
    if (cnt == 1) boundary[e.first] = boundary[e.second] = true;

  DiscreteVarifold out(ctx);
  out.reserve(n);
  double lambda = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec h = Vec::Zero(d);
    if (!boundary[i] && area[i] > 0) {
      h = lap.row(i).transpose() / area[i];
      lambda = std::max(lambda, h.norm());
    }
    Mat cluster(static_cast<int>(ring[i].size()) + 1, d);
    cluster.row(0) = mesh.vertices.row(i);
    int r = 1;
    for (int j : ring[i]) cluster.row(r++) = mesh.vertices.row(j);
    Plane tangent = detail::local_fit_plane(cluster, 2);
    out.add_atom(pos(i), area[i], 1.0, h, tangent);
  }
  out.finalize(lambda);
  return out;
}

/// Curve version (m = 1): curvature vector from second differences of arc length.
inline DiscreteVarifold estimate_mean_curvature(const PolylineMesh& mesh) {
  const int n = static_cast<int>(mesh.vertices.rows());
  const int d = static_cast<int>(mesh.vertices.cols());
  GeometryContext ctx(d, 1);
  if (n < 3) throw error("estimate_mean_curvature: need at least 3 points");

  auto pos = [&](int i) { return Vec(mesh.vertices.row(i).transpose()); };
  auto wrap = [&](int i) { return (i % n + n) % n; };

  DiscreteVarifold out(ctx);
  out.reserve(n);
  double lambda = 0.0;
  int i0 = mesh.closed ? 0 : 1;
  int i1 = mesh.closed ? n : n - 1;

  for (int i = 0; i < n; ++i) {
    bool interior = mesh.closed || (i >= i0 && i < i1);
    Vec h = Vec::Zero(d);
    double w = 0.0;
    Vec t = Vec::Zero(d);
    if (interior) {
      Vec prev = pos(wrap(i - 1)), cur = pos(i), next = pos(wrap(i + 1));
      double lp = (cur - prev).norm(), ln = (next - cur).norm();
      if (lp < 1e-14 || ln < 1e-14) throw error("estimate_mean_curvature: degenerate segment");
      // dT/ds at the vertex: kappa vector.
      h = 2.0 * ((next - cur) / ln - (cur - prev) / lp) / (lp + ln);
      w = 0.5 * (lp + ln);
      t = (next - prev).normalized();
      lambda = std::max(lambda, h.norm());
    } else {
      int j = (i == 0) ? 1 : n - 2;
      t = (pos(j) - pos(i)).normalized();
      w = 0.5 * (pos(j) - pos(i)).norm();
    }
    out.add_atom(pos(i), w, 1.0, h, Plane::from_span(t));
  }
  out.finalize(lambda);
  return out;
}

}  // namespace gmtlab
