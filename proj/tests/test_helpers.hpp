// Shared fixtures: meshes with known curvature for the ingestion tests.
#pragma once

#include <gmtlab/mesh.hpp>

#include <cmath>
#include <map>

namespace gmtlab::testing {

/// Subdivided icosahedron projected to the unit sphere.
inline TriangleMesh icosphere(int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Vec> verts;
  auto add = [&](double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    verts.push_back(v.normalized());
  };
  add(-1, phi, 0); add(1, phi, 0); add(-1, -phi, 0); add(1, -phi, 0);
  add(0, -1, phi); add(0, 1, phi); add(0, -1, -phi); add(0, 1, -phi);
  add(phi, 0, -1); add(phi, 0, 1); add(-phi, 0, -1); add(-phi, 0, 1);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find({key.first, key.second});
      if (it != midpoint.end()) return it->second;
      Vec m = (verts[a] + verts[b]).normalized();
      verts.push_back(m);
      int id = static_cast<int>(verts.size()) - 1;
      midpoint[{key.first, key.second}] = id;
      return id;
    };
    std::vector<std::array<int, 3>> next;
    for (const auto& f : faces) {
      int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces = std::move(next);
  }

  TriangleMesh mesh;
  mesh.vertices.resize(static_cast<int>(verts.size()), 3);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(static_cast<int>(i)) = verts[i].transpose();
  mesh.faces = std::move(faces);
  return mesh;
}

/// Flat triangulated square patch in the z = 0 plane.
inline TriangleMesh flat_patch(double L, int n) {
  TriangleMesh mesh;
  mesh.vertices.resize(n * n, 3);
  auto id = [&](int i, int j) { return i * n + j; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      mesh.vertices.row(id(i, j)) << -L + 2.0 * L * i / (n - 1), -L + 2.0 * L * j / (n - 1), 0.0;
  for (int i = 0; i + 1 < n; ++i)
    for (int j = 0; j + 1 < n; ++j) {
      mesh.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return mesh;
}

inline PolylineMesh circle_polyline(double radius, int n) {
  PolylineMesh mesh;
  mesh.closed = true;
  mesh.vertices.resize(n, 2);
  for (int i = 0; i < n; ++i) {
    double a = 2.0 * M_PI * i / n;
    mesh.vertices.row(i) << radius * std::cos(a), radius * std::sin(a);
  }
  return mesh;
}

}  // namespace gmtlab::testing
