#include <gmtlab/mesh.hpp>

#include <catch_amalgamated.hpp>

#include "test_helpers.hpp"

using namespace gmtlab;
using Catch::Approx;

TEST_CASE("cotangent curvature of the unit sphere") {
  TriangleMesh mesh = testing::icosphere(4);  // 5120 faces
  DiscreteVarifold v = estimate_mean_curvature(mesh);
  CHECK(v.context().m == 2);
  int checked = 0;
  for (int i = 0; i < v.size(); ++i) {
    Vec h = v.curvature(i);
    if (h.norm() == 0.0) continue;  // boundary-marked (none for a closed mesh)
    ++checked;
    CHECK(h.norm() == Approx(2.0).margin(0.05));
    // Direction inward within 2 degrees.
    Vec inward = -v.position(i).normalized();
    double angle = std::acos(std::clamp(h.normalized().dot(inward), -1.0, 1.0));
    CHECK(angle < 2.0 * M_PI / 180.0);
  }
  CHECK(checked == v.size());
  CHECK(v.lambda() == Approx(2.0).margin(0.05));
  // Mass close to the sphere area.
  CHECK(v.total_mass() == Approx(4.0 * M_PI).margin(0.05));
}

TEST_CASE("flat mesh has vanishing curvature") {
  TriangleMesh mesh = testing::flat_patch(1.0, 21);
  DiscreteVarifold v = estimate_mean_curvature(mesh);
  for (int i = 0; i < v.size(); ++i) CHECK(v.curvature(i).norm() < 1e-8);
}

TEST_CASE("circle of radius 0.5 has curvature 2") {
  DiscreteVarifold v = estimate_mean_curvature(testing::circle_polyline(0.5, 400));
  for (int i = 0; i < v.size(); ++i) {
    CHECK(v.curvature(i).norm() == Approx(2.0).margin(0.01));
    Vec inward = -v.position(i).normalized();
    CHECK(v.curvature(i).normalized().dot(inward) == Approx(1.0).margin(1e-4));
  }
  CHECK(v.total_mass() == Approx(M_PI).margin(1e-3));
}

TEST_CASE("degenerate triangles are rejected") {
  TriangleMesh mesh;
  mesh.vertices.resize(3, 3);
  mesh.vertices << 0, 0, 0, 1, 0, 0, 2, 0, 0;  // collinear
  mesh.faces.push_back({0, 1, 2});
  CHECK_THROWS_AS(estimate_mean_curvature(mesh), error);
}

TEST_CASE("tangent planes from one-ring fits are accurate on the sphere") {
  TriangleMesh mesh = testing::icosphere(3);
  DiscreteVarifold v = estimate_mean_curvature(mesh);
  for (int i = 0; i < v.size(); i += 7) {
    Plane tangent = v.plane(i);
    // Exact tangent plane is the orthogonal complement of the radial direction.
    Vec radial = v.position(i).normalized();
    CHECK(tangent.normal_part(radial).norm() == Approx(radial.norm()).margin(0.02));
  }
}

TEST_CASE("first variation identity holds for ingested meshes") {
  TriangleMesh mesh = testing::icosphere(4);
  DiscreteVarifold v = estimate_mean_curvature(mesh);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 5; ++k) {
    TestField F = TestField::random(3, RadialCutoff::none(3), rng);
    auto fv = first_variation(v, F);
    double residual = fv.value + curvature_pairing(v, F);
    double scale = F.c1_scale(v.positions()) * v.total_mass();
    CHECK(std::abs(residual) < 2e-2 * scale);
  }
}
