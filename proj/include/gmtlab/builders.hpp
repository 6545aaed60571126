// Analytic scenario geometries. Surfaces are built from parametric meshes with
// closed-form tangent planes and mean curvature, so every downstream check has
// an exact oracle.
//
// Quadrature: element measure is lumped to vertices ring by ring. Ordinary
// strips split their area (1/2 + skew) inward / (1/2 - skew) outward; the skew
// makes the leading quadrature error of smooth integrals a deterministic
// multiple of h_mesh, matching the first-order tol_disc error model of the
// verifiers. Strips that bracket a declared measurement radius split evenly,
// so ball cuts at those radii stay second-order accurate.
#pragma once

#include <gmtlab/mesh.hpp>
#include <gmtlab/varifold.hpp>

#include <array>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

namespace gmtlab {

/// Parametric mesh in m = 1 or 2 chart coordinates with lumping fractions.
struct ParamMesh {
  int m = 2;
  Mat nodes;                                   // n x m
  std::vector<std::array<int, 3>> tris;        // m = 2
  std::vector<std::array<double, 3>> lump;     // per-triangle vertex fractions
  std::vector<std::array<int, 2>> segs;        // m = 1 (lumped half/half)
};

/// Pointwise embedding data supplied by a scenario geometry.
struct EmbeddedSample {
  Vec x;           // position in R^d
  Mat basis_rows;  // m x d orthonormal tangent rows
  Vec H;           // mean curvature vector
};

using EmbeddingFn = std::function<EmbeddedSample(const Vec& param)>;

namespace detail {

constexpr double kRadialSkew = 0.25;

// corners: (inner, outer, outer)
inline std::array<double, 3> lump_one_inner(double skew) {
  return {0.5 + skew, 0.25 - 0.5 * skew, 0.25 - 0.5 * skew};
}
// corners: (inner, outer, inner)
inline std::array<double, 3> lump_two_inner(double skew) {
  return {0.25 + 0.5 * skew, 0.5 - skew, 0.25 + 0.5 * skew};
}

/// Uniform radii lattice of spacing ~h on (0, R]. Values in `align` become
/// cell midpoints (the two neighboring rings are pinned at align -+ h/2);
/// values in `ring_align` become exact ring radii (sup-type measurements need
/// an atom at the extreme radius).
inline std::vector<double> ring_radii(double R, double h, const std::vector<double>& align,
                                      const std::vector<double>& ring_align = {}) {
  int n = std::max(1, static_cast<int>(std::lround(R / h)));
  double step = R / n;
  std::vector<double> rs;
  for (int j = 1; j <= n; ++j) rs.push_back(step * j);
  for (double a : ring_align) {
    if (a < 0.3 * step || a > R + 1e-12) continue;
    double best = 1e300;
    size_t bi = 0;
    for (size_t k = 0; k < rs.size(); ++k)
      if (std::abs(rs[k] - a) < best) {
        best = std::abs(rs[k] - a);
        bi = k;
      }
    if (std::abs(rs[bi] - R) < 1e-12 && a < R - 1e-12) rs.push_back(a);
    else rs[bi] = a;
  }
  for (double a : align) {
    if (a < 0.75 * step || a > R - 0.6 * step) continue;
    double lo = a - 0.5 * step, hi = a + 0.5 * step;
    for (double& r : rs)
      if (std::abs(r - a) <= 0.55 * step) r = (r <= a) ? lo : hi;
    // Guarantee both pinned rings exist.
    bool has_lo = false, has_hi = false;
    for (double r : rs) {
      if (std::abs(r - lo) < 1e-12) has_lo = true;
      if (std::abs(r - hi) < 1e-12) has_hi = true;
    }
    if (!has_lo) rs.push_back(lo);
    if (!has_hi) rs.push_back(hi);
  }
  std::sort(rs.begin(), rs.end());
  rs.erase(std::unique(rs.begin(), rs.end(),
                       [](double x, double y) { return std::abs(x - y) < 1e-12; }),
           rs.end());
  return rs;
}

// Stitch two concentric rings (node ids sorted by angle) with triangles and
// record lumping fractions at the given inward skew.
inline void stitch_rings(const std::vector<int>& inner, const std::vector<double>& inner_ang,
                         const std::vector<int>& outer, const std::vector<double>& outer_ang,
                         std::vector<std::array<int, 3>>& tris,
                         std::vector<std::array<double, 3>>& lump, double skew) {
  const size_t ni = inner.size(), no = outer.size();
  size_t i = 0, j = 0;
  auto ang = [](const std::vector<double>& a, size_t k) {
    return a[k % a.size()] + 2.0 * M_PI * static_cast<double>(k / a.size());
  };
  while (i < ni || j < no) {
    bool advance_outer;
    if (i == ni) advance_outer = true;
    else if (j == no) advance_outer = false;
    else advance_outer = ang(outer_ang, j + 1) <= ang(inner_ang, i + 1);
    if (advance_outer) {
      tris.push_back({inner[i % ni], outer[j % no], outer[(j + 1) % no]});
      lump.push_back(lump_one_inner(skew));
      ++j;
    } else {
      tris.push_back({inner[i % ni], outer[j % no], inner[(i + 1) % ni]});
      lump.push_back(lump_two_inner(skew));
      ++i;
    }
  }
}

}  // namespace detail

/// Triangulated disk of radius R in polar layout. Radii listed in `align`
/// become cell midpoints, so measurements at those scales cut between rings;
/// the bracketing strips are lumped evenly regardless of `skew`.
inline ParamMesh polar_disk_mesh(double R, double h, const std::vector<double>& align = {},
                                 double skew = detail::kRadialSkew,
                                 const std::vector<double>& ring_align = {}) {
  ParamMesh pm;
  pm.m = 2;
  auto radii = detail::ring_radii(R, h, align, ring_align);
  auto strip_skew = [&](double lo, double hi) {
    for (double a : align)
      if (a > lo + 1e-12 && a < hi - 1e-12) return 0.0;
    return skew;
  };
  std::vector<std::vector<int>> ring_ids(radii.size());
  std::vector<std::vector<double>> ring_angs(radii.size());

  std::vector<Eigen::RowVector2d> nodes;
  nodes.push_back({0.0, 0.0});
  for (size_t j = 0; j < radii.size(); ++j) {
    int n = std::max<int>(8, static_cast<int>(std::lround(2.0 * M_PI * radii[j] / h)));
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * M_PI * k / n;
      ring_ids[j].push_back(static_cast<int>(nodes.size()));
      ring_angs[j].push_back(a);
      nodes.push_back({radii[j] * std::cos(a), radii[j] * std::sin(a)});
    }
  }
  for (size_t k = 0; k < ring_ids[0].size(); ++k) {
    pm.tris.push_back({0, ring_ids[0][k], ring_ids[0][(k + 1) % ring_ids[0].size()]});
    pm.lump.push_back(detail::lump_one_inner(strip_skew(0.0, radii[0])));
  }
  for (size_t j = 0; j + 1 < radii.size(); ++j)
    detail::stitch_rings(ring_ids[j], ring_angs[j], ring_ids[j + 1], ring_angs[j + 1], pm.tris,
                         pm.lump, strip_skew(radii[j], radii[j + 1]));

  pm.nodes.resize(static_cast<int>(nodes.size()), 2);
  for (size_t i = 0; i < nodes.size(); ++i) pm.nodes.row(static_cast<int>(i)) = nodes[i];
  return pm;
}

/// Uniform rectangle grid [a0,b0] x [a1,b1]; axis 0 plays the angular role in
/// the lumping rule, axis 1 the radial one.
inline ParamMesh rect_grid_mesh(double a0, double b0, double a1, double b1, double h) {
  ParamMesh pm;
  pm.m = 2;
  int n0 = std::max(2, static_cast<int>(std::lround((b0 - a0) / h)) + 1);
  int n1 = std::max(2, static_cast<int>(std::lround((b1 - a1) / h)) + 1);
  pm.nodes.resize(n0 * n1, 2);
  auto id = [&](int i, int j) { return i * n1 + j; };
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j)
      pm.nodes.row(id(i, j)) << a0 + (b0 - a0) * i / (n0 - 1.0), a1 + (b1 - a1) * j / (n1 - 1.0);
  for (int i = 0; i + 1 < n0; ++i)
    for (int j = 0; j + 1 < n1; ++j) {
      pm.tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      pm.lump.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
      pm.tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      pm.lump.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3});
    }
  return pm;
}

/// 1-D chain over [a, b]; `align` values become exact nodes.
inline ParamMesh line_mesh(double a, double b, double h, const std::vector<double>& align = {}) {
  ParamMesh pm;
  pm.m = 1;
  std::set<double> xs;
  int n = std::max(2, static_cast<int>(std::lround((b - a) / h)) + 1);
  for (int i = 0; i < n; ++i) xs.insert(a + (b - a) * i / (n - 1.0));
  for (double v : align)
    if (v > a - 1e-12 && v < b + 1e-12) xs.insert(v);
  std::vector<double> sorted(xs.begin(), xs.end());
  pm.nodes.resize(static_cast<int>(sorted.size()), 1);
  for (size_t i = 0; i < sorted.size(); ++i) pm.nodes(static_cast<int>(i), 0) = sorted[i];
  for (int i = 0; i + 1 < static_cast<int>(sorted.size()); ++i) pm.segs.push_back({i, i + 1});
  return pm;
}

/// Embeds a parametric mesh as a DiscreteVarifold using its lumping fractions.
inline DiscreteVarifold embed_param_mesh(const ParamMesh& pm, int d, const EmbeddingFn& emb,
                                         double lambda) {
  GeometryContext ctx(d, pm.m);
  const int n = static_cast<int>(pm.nodes.rows());

  std::vector<EmbeddedSample> samples(n);
  for (int i = 0; i < n; ++i) samples[i] = emb(pm.nodes.row(i).transpose());

  Vec w = Vec::Zero(n);
  if (pm.m == 2) {
    for (size_t k = 0; k < pm.tris.size(); ++k) {
      const auto& t = pm.tris[k];
      const auto& f = pm.lump[k];
      double A = detail::triangle_area(samples[t[0]].x, samples[t[1]].x, samples[t[2]].x);
      for (int c = 0; c < 3; ++c) w[t[c]] += f[c] * A;
    }
  } else {
    for (const auto& s : pm.segs) {
      double L = (samples[s[1]].x - samples[s[0]].x).norm();
      w[s[0]] += 0.5 * L;
      w[s[1]] += 0.5 * L;
    }
  }

  DiscreteVarifold out(ctx);
  out.reserve(n);
  for (int i = 0; i < n; ++i)
    out.add_atom(samples[i].x, w[i], 1.0, samples[i].H, samples[i].basis_rows);
  out.finalize(lambda);
  return out;
}

namespace graphs {

/// Height data for a graph over the first m coordinates (codimension 1).
struct HeightSample {
  double u;
  Vec grad;   // m
  Mat hess;   // m x m
};

using HeightFn = std::function<HeightSample(const Vec& p)>;

/// Embedding of the graph x -> (x, u(x)) in R^{m+1} with exact tangent/curvature.
inline EmbeddingFn graph_embedding(int m, const HeightFn& height) {
  return [m, height](const Vec& p) {
    HeightSample hs = height(p);
    const int d = m + 1;
    EmbeddedSample s;
    s.x = Vec(d);
    s.x.head(m) = p;
    s.x[m] = hs.u;
    double W2 = 1.0 + hs.grad.squaredNorm();
    double W = std::sqrt(W2);
    // Tangents (e_i, du_i), Gram-Schmidt orthonormalized in order.
    Mat t(m, d);
    for (int i = 0; i < m; ++i) {
      Vec ti = Vec::Zero(d);
      ti[i] = 1.0;
      ti[m] = hs.grad[i];
      for (int j = 0; j < i; ++j) ti -= t.row(j).dot(ti) * t.row(j).transpose();
      t.row(i) = ti.normalized().transpose();
    }
    s.basis_rows = t;
    // Scalar mean curvature of a graph: (1/W) trace[(I - grad u x grad u / W^2) D^2 u].
    Mat P = Mat::Identity(m, m) - hs.grad * hs.grad.transpose() / W2;
    double Hs = (P * hs.hess).trace() / W;
    Vec nu = Vec(d);
    nu.head(m) = -hs.grad;
    nu[m] = 1.0;
    nu /= W;
    s.H = Hs * nu;
    return s;
  };
}

}  // namespace graphs

// ---------------------------------------------------------------------------
// Concrete scenario surfaces.
// ---------------------------------------------------------------------------

/// Flat unit-density m-plane through the origin in R^d (m = 1 or 2),
/// spanned by the first m coordinate axes.
inline DiscreteVarifold make_plane(int d, int m, double R, double h,
                                   const std::vector<double>& align = {}) {
  ParamMesh pm = (m == 2) ? polar_disk_mesh(R, h, align, 0.0) : line_mesh(-R, R, h, align);
  EmbeddingFn emb = [d, m](const Vec& p) {
    EmbeddedSample s;
    s.x = Vec::Zero(d);
    s.x.head(m) = p;
    s.basis_rows = Mat::Zero(m, d);
    for (int i = 0; i < m; ++i) s.basis_rows(i, i) = 1.0;
    s.H = Vec::Zero(d);
    return s;
  };
  return embed_param_mesh(pm, d, emb, 0.0);
}

/// Graph of u(p) = slope * p_1 over the first m coordinates (d = m + 1).
inline DiscreteVarifold make_tilted_plane(int m, double slope, double R, double h,
                                          const std::vector<double>& ambient_ring_align = {}) {
  // The oscillation inside an ambient ball of radius r is attained at in-plane
  // radius r / sqrt(1 + slope^2) along the tilt axis.
  std::vector<double> ring_align;
  for (double r : ambient_ring_align) ring_align.push_back(r / std::sqrt(1.0 + slope * slope));
  ParamMesh pm = (m == 2) ? polar_disk_mesh(R, h, {}, detail::kRadialSkew, ring_align)
                          : line_mesh(-R, R, h, ring_align);
  graphs::HeightFn height = [m, slope](const Vec& p) {
    graphs::HeightSample hs;
    hs.u = slope * p[0];
    hs.grad = Vec::Zero(m);
    hs.grad[0] = slope;
    hs.hess = Mat::Zero(m, m);
    return hs;
  };
  return embed_param_mesh(pm, m + 1, graphs::graph_embedding(m, height), 0.0);
}

/// Saddle graph u = eps (p_1^2 - p_2^2) / 2 (harmonic height), m = 2.
inline DiscreteVarifold make_harmonic_saddle(double eps, double R, double h) {
  ParamMesh pm = polar_disk_mesh(R, h);
  graphs::HeightFn height = [eps](const Vec& p) {
    graphs::HeightSample hs;
    hs.u = 0.5 * eps * (p[0] * p[0] - p[1] * p[1]);
    hs.grad = Vec(2);
    hs.grad << eps * p[0], -eps * p[1];
    hs.hess = Mat(2, 2);
    hs.hess << eps, 0.0, 0.0, -eps;
    return hs;
  };
  // |H| <= eps^3 |p|^2 / W^3 on the patch.
  double lam = eps * eps * eps * R * R;
  return embed_param_mesh(pm, 3, graphs::graph_embedding(2, height), lam);
}

/// Spherical cap of curvature radius rho tangent to {x_3 = 0} at the origin,
/// built as the graph u = rho - sqrt(rho^2 - |p|^2). `ambient_align` lists
/// ambient ball radii that must fall between mesh rings.
inline DiscreteVarifold make_sphere_cap(double rho, double extent, double h,
                                        const std::vector<double>& ambient_cut_align = {},
                                        const std::vector<double>& ambient_ring_align = {}) {
  // Ambient distance r from the origin maps to param radius r sqrt(1 - r^2/(4 rho^2)).
  auto to_param = [rho](const std::vector<double>& rs) {
    std::vector<double> out;
    for (double r : rs) {
      double q = 1.0 - r * r / (4.0 * rho * rho);
      if (q > 0) out.push_back(r * std::sqrt(q));
    }
    return out;
  };
  ParamMesh pm = polar_disk_mesh(extent, h, to_param(ambient_cut_align), detail::kRadialSkew,
                                 to_param(ambient_ring_align));
  graphs::HeightFn height = [rho](const Vec& p) {
    double s2 = rho * rho - p.squaredNorm();
    double s = std::sqrt(s2);
    graphs::HeightSample hs;
    hs.u = rho - s;
    hs.grad = p / s;
    hs.hess = Mat::Identity(2, 2) / s + p * p.transpose() / (s2 * s);
    return hs;
  };
  return embed_param_mesh(pm, 3, graphs::graph_embedding(2, height), 2.0 / rho);
}

/// Full round m-sphere (m = 1, 2) of radius rho with its north pole at the
/// origin (center at -rho e_d). `ambient_align` as in make_sphere_cap.
inline DiscreteVarifold make_sphere(int m, double rho, double h,
                                    const std::vector<double>& ambient_align = {}) {
  const int d = m + 1;
  Vec center = Vec::Zero(d);
  center[d - 1] = -rho;

  if (m == 1) {
    int n = std::max(16, static_cast<int>(std::lround(2.0 * M_PI * rho / h)));
    ParamMesh pm;
    pm.m = 1;
    pm.nodes.resize(n, 1);
    for (int i = 0; i < n; ++i) pm.nodes(i, 0) = 2.0 * M_PI * i / n;
    for (int i = 0; i < n; ++i) pm.segs.push_back({i, (i + 1) % n});
    EmbeddingFn emb = [rho, center](const Vec& p) {
      double th = p[0];
      EmbeddedSample s;
      s.x = Vec(2);
      s.x << rho * std::sin(th), rho * std::cos(th) - rho;
      Vec radial = (s.x - center).normalized();
      s.basis_rows = Mat(1, 2);
      s.basis_rows << -radial[1], radial[0];
      s.H = -(1.0 / rho) * radial;
      return s;
    };
    return embed_param_mesh(pm, 2, emb, 1.0 / rho);
  }

  // UV sphere: polar-angle rings from the pole. Requested ambient (chord)
  // radii fall midway between rings, as in the planar builders.
  double dth = M_PI / std::max(8, static_cast<int>(std::lround(M_PI * rho / h)));
  std::vector<double> thetas;
  {
    std::vector<double> align_theta;
    for (double r : ambient_align) {
      double q = r / (2.0 * rho);
      if (q < 1.0) align_theta.push_back(2.0 * std::asin(q));
    }
    auto raw = detail::ring_radii(M_PI, dth, align_theta);
    // ring_radii targets (0, R]; drop the final value at pi (south pole handled as a fan).
    for (double t : raw)
      if (t < M_PI - 1e-9) thetas.push_back(t);
  }

  std::vector<Vec> nodes;
  std::vector<std::vector<int>> ring_ids(thetas.size());
  std::vector<std::vector<double>> ring_angs(thetas.size());
  auto point = [&](double th, double ph) {
    Vec x(3);
    x << rho * std::sin(th) * std::cos(ph), rho * std::sin(th) * std::sin(ph),
        rho * std::cos(th) - rho;
    return x;
  };
  nodes.push_back(point(0.0, 0.0));  // pole at the origin
  for (size_t j = 0; j < thetas.size(); ++j) {
    int n = std::max<int>(8, static_cast<int>(std::lround(2.0 * M_PI * rho * std::sin(thetas[j]) / h)));
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * M_PI * k / n;
      ring_ids[j].push_back(static_cast<int>(nodes.size()));
      ring_angs[j].push_back(a);
      nodes.push_back(point(thetas[j], a));
    }
  }
  int south = static_cast<int>(nodes.size());
  nodes.push_back(point(M_PI, 0.0));

  std::vector<double> align_theta_cuts;
  for (double r : ambient_align) {
    double q = r / (2.0 * rho);
    if (q < 1.0) align_theta_cuts.push_back(2.0 * std::asin(q));
  }
  auto strip_skew = [&](double lo, double hi) {
    for (double a : align_theta_cuts)
      if (a > lo + 1e-12 && a < hi - 1e-12) return 0.0;
    return detail::kRadialSkew;
  };
  std::vector<std::array<int, 3>> tris;
  std::vector<std::array<double, 3>> lump;
  for (size_t k = 0; k < ring_ids[0].size(); ++k) {
    tris.push_back({0, ring_ids[0][k], ring_ids[0][(k + 1) % ring_ids[0].size()]});
    lump.push_back(detail::lump_one_inner(strip_skew(0.0, thetas[0])));
  }
  for (size_t j = 0; j + 1 < thetas.size(); ++j)
    detail::stitch_rings(ring_ids[j], ring_angs[j], ring_ids[j + 1], ring_angs[j + 1], tris, lump,
                         strip_skew(thetas[j], thetas[j + 1]));
  const auto& last = ring_ids.back();
  for (size_t k = 0; k < last.size(); ++k) {
    tris.push_back({last[k], south, last[(k + 1) % last.size()]});
    lump.push_back(detail::lump_two_inner(strip_skew(thetas.back(), M_PI)));
  }

  GeometryContext ctx(3, 2);
  Vec w = Vec::Zero(static_cast<int>(nodes.size()));
  for (size_t k = 0; k < tris.size(); ++k) {
    double A = detail::triangle_area(nodes[tris[k][0]], nodes[tris[k][1]], nodes[tris[k][2]]);
    for (int c = 0; c < 3; ++c) w[tris[k][c]] += lump[k][c] * A;
  }
  DiscreteVarifold out(ctx);
  out.reserve(static_cast<int>(nodes.size()));
  for (size_t i = 0; i < nodes.size(); ++i) {
    Vec radial = (nodes[i] - center).normalized();
    Plane radial_line = Plane::from_span(radial);
    Mat nb = radial_line.normal_basis();  // 3 x 2 tangent complement
    Vec H = -(2.0 / rho) * radial;
    out.add_atom(nodes[i], w[static_cast<int>(i)], 1.0, H, nb.transpose());
  }
  out.finalize(2.0 / rho);
  return out;
}

/// Minimal catenoid patch around a waist point (translated to the origin):
/// sigma(th, v) = (a cosh(v/a) cos th - a, a cosh(v/a) sin th, v).
inline DiscreteVarifold make_catenoid_patch(double a, double extent, double h) {
  ParamMesh pm = polar_disk_mesh(extent, h);
  EmbeddingFn emb = [a](const Vec& p) {
    double th = p[0], v = p[1];
    double ch = std::cosh(v / a), sh = std::sinh(v / a);
    EmbeddedSample s;
    s.x = Vec(3);
    s.x << a * ch * std::cos(th) - a, a * ch * std::sin(th), v;
    Vec st(3), sv(3);
    st << -a * ch * std::sin(th), a * ch * std::cos(th), 0.0;
    sv << sh * std::cos(th), sh * std::sin(th), 1.0;
    Mat rows(2, 3);
    rows.row(0) = st.normalized().transpose();
    rows.row(1) = sv.normalized().transpose();  // st . sv = 0
    s.basis_rows = rows;
    s.H = Vec::Zero(3);
    return s;
  };
  return embed_param_mesh(pm, 3, emb, 0.0);
}

/// Two parallel unit-density m-planes, one through the origin, one at height gap.
inline DiscreteVarifold make_two_planes(int d, int m, double R, double h, double gap) {
  DiscreteVarifold base = make_plane(d, m, R, h);
  GeometryContext ctx(d, m);
  DiscreteVarifold out(ctx);
  out.reserve(2 * base.size());
  Vec shift = Vec::Zero(d);
  shift[d - 1] = gap;
  for (int i = 0; i < base.size(); ++i) {
    out.add_atom(base.position(i), base.weight(i), base.multiplicity(i), base.curvature(i),
                 base.basis_rows(i));
    out.add_atom(base.position(i) + shift, base.weight(i), base.multiplicity(i),
                 base.curvature(i), base.basis_rows(i));
  }
  out.finalize(0.0);
  return out;
}

/// Plane with a disk of radius hole_r removed around hole_center (in-plane coords).
inline DiscreteVarifold make_punctured_plane(int d, int m, double R, double h,
                                             const Vec& hole_center, double hole_r) {
  DiscreteVarifold base = make_plane(d, m, R, h);
  GeometryContext ctx(d, m);
  DiscreteVarifold out(ctx);
  out.reserve(base.size());
  for (int i = 0; i < base.size(); ++i) {
    Vec p = base.position(i).head(m);
    if ((p - hole_center).norm() < hole_r) continue;
    out.add_atom(base.position(i), base.weight(i), base.multiplicity(i), base.curvature(i),
                 base.basis_rows(i));
  }
  out.finalize(0.0);
  return out;
}

/// Static half-plane {x_m >= 0} inside span(e_1..e_m); the designed
/// counterexample for the parabolic maximum principle (its free edge is not a
/// bounded-curvature varifold).
inline DiscreteVarifold make_half_plane(int d, int m, double R, double h) {
  ParamMesh pm = (m == 2) ? rect_grid_mesh(-R, R, 0.0, R, h) : line_mesh(0.0, R, h);
  EmbeddingFn emb = [d, m](const Vec& p) {
    EmbeddedSample s;
    s.x = Vec::Zero(d);
    if (m == 2) {
      s.x[0] = p[0];  // x'' direction
      s.x[1] = p[1];  // edge-normal direction x_m
    } else {
      s.x[0] = p[0];
    }
    s.basis_rows = Mat::Zero(m, d);
    for (int i = 0; i < m; ++i) s.basis_rows(i, i) = 1.0;
    s.H = Vec::Zero(d);
    return s;
  };
  return embed_param_mesh(pm, d, emb, 0.0);
}

}  // namespace gmtlab
