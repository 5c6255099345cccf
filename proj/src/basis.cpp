#include "hdgem/basis.hpp"

#include <cmath>
#include <map>

namespace hdgem {

namespace {

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

std::vector<double> lobatto_1d(int p) {
  if (p == 1) return {-1.0, 1.0};
  if (p == 2) return {-1.0, 0.0, 1.0};
  throw CapabilityError("basis degree " + std::to_string(p) + " unsupported");
}

ReferenceBasis build(CellKind kind, int p) {
  if (p < 1 || p > 2)
    throw CapabilityError("basis degree " + std::to_string(p) + " unsupported");
  ReferenceBasis b;
  b.kind = kind;
  b.degree = p;

  const int dim = cell_dim(kind);
  const bool tensor = (kind == CellKind::Hex || kind == CellKind::Quad);

  if (tensor) {
    auto n1 = lobatto_1d(p);
    if (dim == 3) {
      for (int k = 0; k <= p; ++k)
        for (int j = 0; j <= p; ++j)
          for (int i = 0; i <= p; ++i) {
            b.nodes.emplace_back(n1[i], n1[j], n1[k]);
            b.exponents.push_back({i, j, k});
          }
    } else {
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p; ++i) {
          b.nodes.emplace_back(n1[i], n1[j], 0.0);
          b.exponents.push_back({i, j, 0});
        }
    }
  } else {
    // principal lattice, total-degree monomials
    if (dim == 3) {
      for (int k = 0; k <= p; ++k)
        for (int j = 0; j <= p - k; ++j)
          for (int i = 0; i <= p - k - j; ++i) {
            b.nodes.emplace_back(double(i) / p, double(j) / p, double(k) / p);
            b.exponents.push_back({i, j, k});
          }
    } else {
      for (int j = 0; j <= p; ++j)
        for (int i = 0; i <= p - j; ++i) {
          b.nodes.emplace_back(double(i) / p, double(j) / p, 0.0);
          b.exponents.push_back({i, j, 0});
        }
    }
  }

  const int n = b.size();
  Eigen::MatrixXd vand(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const auto& e = b.exponents[j];
      vand(i, j) = ipow(b.nodes[i].x(), e[0]) * ipow(b.nodes[i].y(), e[1]) *
                   ipow(b.nodes[i].z(), e[2]);
    }
  b.coeff = vand.inverse();
  return b;
}

}  // namespace

Eigen::VectorXd ReferenceBasis::shape(const Vec3& ref) const {
  const int n = size();
  Eigen::VectorXd mono(n);
  for (int j = 0; j < n; ++j) {
    const auto& e = exponents[j];
    mono(j) = ipow(ref.x(), e[0]) * ipow(ref.y(), e[1]) * ipow(ref.z(), e[2]);
  }
  return coeff.transpose() * mono;
}

Eigen::MatrixXd ReferenceBasis::shape_grad(const Vec3& ref) const {
  const int n = size();
  const int d = dim();
  Eigen::MatrixXd dm(n, d);
  for (int j = 0; j < n; ++j) {
    const auto& e = exponents[j];
    double px[3] = {ipow(ref.x(), e[0]), ipow(ref.y(), e[1]),
                    ipow(ref.z(), e[2])};
    for (int c = 0; c < d; ++c) {
      if (e[c] == 0) {
        dm(j, c) = 0.0;
        continue;
      }
      double g = e[c] * ipow(ref(c), e[c] - 1);
      for (int o = 0; o < 3; ++o)
        if (o != c) g *= px[o];
      dm(j, c) = g;
    }
  }
  return coeff.transpose() * dm;
}

const ReferenceBasis& make_basis(CellKind kind, int p) {
  static std::map<std::pair<int, int>, ReferenceBasis> cache;
  auto key = std::make_pair(static_cast<int>(kind), p);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build(kind, p)).first;
  return it->second;
}

MapResult map_physical(CellKind kind, const std::vector<Vec3>& verts,
                       const Vec3& ref) {
  const ReferenceBasis& geo = make_basis(kind, 1);
  Eigen::VectorXd n = geo.shape(ref);
  Eigen::MatrixXd dn = geo.shape_grad(ref);
  MapResult r;
  r.x.setZero();
  r.jacobian.setZero();
  for (int a = 0; a < geo.size(); ++a) {
    r.x += n(a) * verts[a];
    for (int c = 0; c < 3; ++c) r.jacobian.col(c) += dn(a, c) * verts[a];
  }
  r.det = r.jacobian.determinant();
  if (r.det <= 0.0)
    throw GeometryError("non-positive Jacobian determinant " +
                        std::to_string(r.det));
  return r;
}

Vec3 reference_of(CellKind kind, const std::vector<Vec3>& verts,
                  const Vec3& phys) {
  Vec3 ref = (kind == CellKind::Tet) ? Vec3(0.25, 0.25, 0.25) : Vec3(0, 0, 0);
  for (int it = 0; it < 30; ++it) {
    MapResult m = map_physical(kind, verts, ref);
    Vec3 resid = m.x - phys;
    if (resid.norm() < 1e-13) break;
    ref -= m.jacobian.inverse() * resid;
  }
  return ref;
}

FaceMapResult map_face(CellKind kind, const std::vector<Vec3>& verts,
                       const Vec3& ref) {
  const ReferenceBasis& geo = make_basis(kind, 1);
  Eigen::VectorXd n = geo.shape(ref);
  Eigen::MatrixXd dn = geo.shape_grad(ref);
  FaceMapResult r;
  r.x.setZero();
  r.d1.setZero();
  r.d2.setZero();
  for (int a = 0; a < geo.size(); ++a) {
    r.x += n(a) * verts[a];
    r.d1 += dn(a, 0) * verts[a];
    r.d2 += dn(a, 1) * verts[a];
  }
  r.raw_normal = r.d1.cross(r.d2);
  r.area_element = r.raw_normal.norm();
  return r;
}

}  // namespace hdgem
