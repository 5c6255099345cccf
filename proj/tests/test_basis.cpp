#include <doctest.h>

#include <cmath>
#include <random>

#include "hdgem/basis.hpp"
#include "hdgem/quadrature.hpp"

using namespace hdgem;

namespace {

Vec3 random_ref_point(CellKind kind, std::mt19937& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  switch (kind) {
    case CellKind::Hex:
      return Vec3(2 * u01(rng) - 1, 2 * u01(rng) - 1, 2 * u01(rng) - 1);
    case CellKind::Quad:
      return Vec3(2 * u01(rng) - 1, 2 * u01(rng) - 1, 0);
    case CellKind::Tet: {
      double a = u01(rng), b = u01(rng), c = u01(rng);
      double s = a + b + c + u01(rng);
      return Vec3(a / (s + 1e-9), b / (s + 1e-9), c / (s + 1e-9));
    }
    case CellKind::Tri: {
      double a = u01(rng), b = u01(rng);
      double s = a + b + u01(rng) + 1e-9;
      return Vec3(a / s, b / s, 0);
    }
  }
  return Vec3::Zero();
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("kronecker property at the nodes") {
  for (CellKind kind :
       {CellKind::Hex, CellKind::Tet, CellKind::Quad, CellKind::Tri})
    for (int p : {1, 2}) {
      const ReferenceBasis& b = make_basis(kind, p);
      for (int j = 0; j < b.size(); ++j) {
        Eigen::VectorXd phi = b.shape(b.nodes[j]);
        for (int i = 0; i < b.size(); ++i)
          CHECK(phi(i) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-11));
      }
    }
}

TEST_CASE("partition of unity and linear completeness") {
  std::mt19937 rng(7);
  for (CellKind kind :
       {CellKind::Hex, CellKind::Tet, CellKind::Quad, CellKind::Tri})
    for (int p : {1, 2}) {
      const ReferenceBasis& b = make_basis(kind, p);
      for (int trial = 0; trial < 20; ++trial) {
        Vec3 x = random_ref_point(kind, rng);
        Eigen::VectorXd phi = b.shape(x);
        double sum = 0.0;
        Vec3 xrec = Vec3::Zero();
        for (int i = 0; i < b.size(); ++i) {
          sum += phi(i);
          xrec += phi(i) * b.nodes[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK((xrec - x).norm() < 1e-11);
      }
    }
}

TEST_CASE("gradients match finite differences") {
  std::mt19937 rng(11);
  const double h = 1e-6;
  for (CellKind kind : {CellKind::Hex, CellKind::Tet})
    for (int p : {1, 2}) {
      const ReferenceBasis& b = make_basis(kind, p);
      Vec3 x = random_ref_point(kind, rng) * 0.5;
      Eigen::MatrixXd g = b.shape_grad(x);
      for (int d = 0; d < 3; ++d) {
        Vec3 xp = x, xm = x;
        xp(d) += h;
        xm(d) -= h;
        Eigen::VectorXd fd = (b.shape(xp) - b.shape(xm)) / (2 * h);
        for (int i = 0; i < b.size(); ++i)
          CHECK(g(i, d) == doctest::Approx(fd(i)).epsilon(1e-5));
      }
    }
}

TEST_CASE("unsupported degree is rejected") {
  CHECK_THROWS_AS(make_basis(CellKind::Hex, 3), CapabilityError);
  CHECK_THROWS_AS(make_basis(CellKind::Tet, 0), CapabilityError);
}

TEST_CASE("affine map of the unit-size hex") {
  // [-1,1]^3 -> [0,h]^3
  double h = 0.25;
  std::vector<Vec3> verts;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) verts.push_back(Vec3(i * h, j * h, k * h));
  MapResult m = map_physical(CellKind::Hex, verts, Vec3(0, 0, 0));
  CHECK(m.det == doctest::Approx(std::pow(h / 2, 3)).epsilon(1e-13));
  CHECK((m.x - Vec3(h / 2, h / 2, h / 2)).norm() < 1e-14);
  // integral of x^2 y^2 over [-1,1]^3 through the quadrature/basis pipeline
  QuadratureRule rule = make_quadrature(CellKind::Hex, 4);
  double acc = 0.0;
  for (int q = 0; q < rule.size(); ++q)
    acc += rule.weights[q] * rule.points[q].x() * rule.points[q].x() *
           rule.points[q].y() * rule.points[q].y();
  CHECK(acc == doctest::Approx(8.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("inverted element is rejected") {
  std::vector<Vec3> verts = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0),
                             Vec3(0, 0, -1)};
  CHECK_THROWS_AS(map_physical(CellKind::Tet, verts, Vec3(0.2, 0.2, 0.2)),
                  GeometryError);
}

TEST_CASE("reference_of inverts map_physical") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> jit(-0.08, 0.08);
  // a mildly distorted hex keeps the map multilinear but non-affine
  std::vector<Vec3> verts;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        verts.push_back(
            Vec3(i + jit(rng), j + jit(rng), k + jit(rng)));
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 ref = random_ref_point(CellKind::Hex, rng) * 0.9;
    Vec3 x = map_physical(CellKind::Hex, verts, ref).x;
    Vec3 back = reference_of(CellKind::Hex, verts, x);
    CHECK((back - ref).norm() < 1e-10);
  }
}

TEST_CASE("face map measures a known triangle and quad") {
  std::vector<Vec3> tri = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 0, 3)};
  QuadratureRule rule = make_quadrature(CellKind::Tri, 2);
  double area = 0.0;
  for (int q = 0; q < rule.size(); ++q) {
    FaceMapResult fm = map_face(CellKind::Tri, tri, rule.points[q]);
    area += rule.weights[q] * fm.area_element;
    CHECK(fm.raw_normal.normalized().y() == doctest::Approx(-1.0));
  }
  CHECK(area == doctest::Approx(3.0).epsilon(1e-13));
}

}  // TEST_SUITE
