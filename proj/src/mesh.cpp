#include "hdgem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "hdgem/quadrature.hpp"

namespace hdgem {

std::vector<Vec3> Mesh::element_coords(int e) const {
  std::vector<Vec3> out;
  out.reserve(elements[e].verts.size());
  for (int v : elements[e].verts) out.push_back(vertices[v]);
  return out;
}

std::vector<Vec3> Mesh::face_coords(int f) const {
  const Face& fc = faces[f];
  std::vector<Vec3> out;
  if (fc.verts.size() == 4) {
    // cyclic (0,1,2,3) -> tensor (0,1,3,2)
    out = {vertices[fc.verts[0]], vertices[fc.verts[1]], vertices[fc.verts[3]],
           vertices[fc.verts[2]]};
  } else {
    out = {vertices[fc.verts[0]], vertices[fc.verts[1]], vertices[fc.verts[2]]};
  }
  return out;
}

double Mesh::element_diameter(int e) const {
  auto xs = element_coords(e);
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      d = std::max(d, (xs[i] - xs[j]).norm());
  return d;
}

const std::vector<std::vector<int>>& local_faces(CellKind kind) {
  // Outward-oriented cyclic vertex orders; hex uses tensor vertex numbering.
  static const std::vector<std::vector<int>> hex = {
      {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
      {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
  static const std::vector<std::vector<int>> tet = {
      {0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}};
  return kind == CellKind::Hex ? hex : tet;
}

Vec3 tangent_frame_t1(const Vec3& n) {
  int k = 0;
  double best = std::abs(n.x());
  if (std::abs(n.y()) < best) { k = 1; best = std::abs(n.y()); }
  if (std::abs(n.z()) < best) { k = 2; }
  Vec3 ek = Vec3::Zero();
  ek(k) = 1.0;
  Vec3 t1 = ek - (ek.dot(n)) * n;
  return t1.normalized();
}

namespace {

std::vector<int> rotate_min_first(const std::vector<int>& v) {
  auto it = std::min_element(v.begin(), v.end());
  std::vector<int> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(v[(it - v.begin() + i) % v.size()]);
  return out;
}

void finish_face_geometry(Mesh& mesh) {
  for (int f = 0; f < mesh.n_faces(); ++f) {
    Face& fc = mesh.faces[f];
    auto coords = mesh.face_coords(f);
    Vec3 center = fc.verts.size() == 4 ? Vec3(0, 0, 0) : Vec3(1. / 3, 1. / 3, 0);
    FaceMapResult m = map_face(fc.kind(), coords, center);
    fc.normal = m.raw_normal.normalized();
    fc.t1 = tangent_frame_t1(fc.normal);
    fc.t2 = fc.normal.cross(fc.t1);
    if (fc.boundary() && fc.tag == BoundaryTag::Interior)
      fc.tag = BoundaryTag::GammaD;
  }
}

}  // namespace

void build_face_topology(Mesh& mesh) {
  mesh.faces.clear();
  mesh.element_faces.assign(mesh.n_elements(), {});

  std::map<std::vector<int>, int> by_key;
  std::vector<std::vector<int>> keys;

  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const auto& lf = local_faces(el.kind);
    mesh.element_faces[e].resize(lf.size());
    for (std::size_t j = 0; j < lf.size(); ++j) {
      std::vector<int> fv;
      for (int loc : lf[j]) fv.push_back(el.verts[loc]);
      std::vector<int> key = fv;
      std::sort(key.begin(), key.end());
      auto it = by_key.find(key);
      if (it == by_key.end()) {
        Face fc;
        fc.verts = rotate_min_first(fv);
        fc.owner = e;
        by_key.emplace(key, mesh.n_faces());
        keys.push_back(key);
        mesh.element_faces[e][j] = mesh.n_faces();
        mesh.faces.push_back(std::move(fc));
      } else {
        Face& fc = mesh.faces[it->second];
        if (fc.neighbor >= 0)
          throw GeometryError("non-manifold: face shared by >2 elements (third: element " +
                              std::to_string(e) + ")");
        fc.neighbor = e;
        mesh.element_faces[e][j] = it->second;
      }
    }
  }

  // reorder faces by sorted vertex key so the numbering does not depend on
  // element insertion order
  std::vector<int> perm(mesh.n_faces());
  for (int i = 0; i < mesh.n_faces(); ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(),
            [&](int a, int b) { return keys[a] < keys[b]; });
  std::vector<int> inv(mesh.n_faces());
  for (int i = 0; i < mesh.n_faces(); ++i) inv[perm[i]] = i;
  std::vector<Face> sorted;
  sorted.reserve(mesh.n_faces());
  for (int i = 0; i < mesh.n_faces(); ++i) sorted.push_back(mesh.faces[perm[i]]);
  mesh.faces = std::move(sorted);
  for (auto& ef : mesh.element_faces)
    for (int& f : ef) f = inv[f];

  finish_face_geometry(mesh);
}

Mesh generate_unit_cube_hex(int n) {
  if (n < 1) throw GeometryError("n_per_side must be >= 1");
  Mesh mesh;
  const double h = 1.0 / n;
  auto vid = [n](int i, int j, int k) {
    return i + (n + 1) * (j + (n + 1) * k);
  };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i)
        mesh.vertices.emplace_back(i * h, j * h, k * h);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        Element el;
        el.kind = CellKind::Hex;
        el.verts = {vid(i, j, k),         vid(i + 1, j, k),
                    vid(i, j + 1, k),     vid(i + 1, j + 1, k),
                    vid(i, j, k + 1),     vid(i + 1, j, k + 1),
                    vid(i, j + 1, k + 1), vid(i + 1, j + 1, k + 1)};
        mesh.elements.push_back(std::move(el));
      }
  build_face_topology(mesh);
  return mesh;
}

namespace {

// deterministic hash-based jitter in [-1,1]
double hash_unit(unsigned v, unsigned salt) {
  unsigned x = v * 2654435761u + salt * 40503u + 0x9e3779b9u;
  x ^= x >> 16;
  x *= 0x7feb352du;
  x ^= x >> 15;
  x *= 0x846ca68bu;
  x ^= x >> 16;
  return 2.0 * (x / 4294967295.0) - 1.0;
}

void append_kuhn_tets(Mesh& mesh, int n,
                      const std::function<int(int, int, int)>& vid) {
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  static const int sign[6] = {1, -1, -1, 1, 1, -1};
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        for (int p = 0; p < 6; ++p) {
          int c[3] = {i, j, k};
          std::vector<int> tv;
          tv.push_back(vid(c[0], c[1], c[2]));
          for (int s = 0; s < 3; ++s) {
            c[perms[p][s]] += 1;
            tv.push_back(vid(c[0], c[1], c[2]));
          }
          if (sign[p] < 0) std::swap(tv[1], tv[2]);
          Element el;
          el.kind = CellKind::Tet;
          el.verts = std::move(tv);
          mesh.elements.push_back(std::move(el));
        }
}

}  // namespace

Mesh generate_unit_cube_tet(int n, double jitter) {
  if (n < 1) throw GeometryError("n_per_side must be >= 1");
  Mesh mesh;
  const double h = 1.0 / n;
  auto vid = [n](int i, int j, int k) {
    return i + (n + 1) * (j + (n + 1) * k);
  };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Vec3 x(i * h, j * h, k * h);
        bool interior = i > 0 && i < n && j > 0 && j < n && k > 0 && k < n;
        if (interior && jitter > 0.0) {
          unsigned v = static_cast<unsigned>(vid(i, j, k));
          x += jitter * h * Vec3(hash_unit(v, 1), hash_unit(v, 2),
                                 hash_unit(v, 3));
        }
        mesh.vertices.push_back(x);
      }
  append_kuhn_tets(mesh, n, vid);
  build_face_topology(mesh);
  return mesh;
}

Mesh generate_ball_tet(int n, double radius, double inner_radius) {
  if (n < 2) throw GeometryError("n_per_side must be >= 2 for a ball mesh");
  Mesh mesh;
  const double h = 2.0 * radius / n;
  auto vid = [n](int i, int j, int k) {
    return i + (n + 1) * (j + (n + 1) * k);
  };
  for (int k = 0; k <= n; ++k)
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        Vec3 p(-radius + i * h, -radius + j * h, -radius + k * h);
        double rinf = p.lpNorm<Eigen::Infinity>();
        double r2 = p.norm();
        // spherified cube: infinity-norm shells map to spheres of equal radius
        mesh.vertices.push_back(r2 > 0 ? Vec3(p * (rinf / r2)) : p);
      }
  append_kuhn_tets(mesh, n, vid);
  if (inner_radius > 0.0) {
    for (auto& el : mesh.elements) {
      Vec3 c = Vec3::Zero();
      for (int v : el.verts) c += mesh.vertices[v];
      c /= double(el.verts.size());
      el.region = (c.norm() < inner_radius) ? 2 : 1;
    }
  }
  build_face_topology(mesh);
  for (auto& fc : mesh.faces)
    if (fc.boundary()) fc.tag = BoundaryTag::GammaA;
  return mesh;
}

MeshDiagnostics validate(const Mesh& mesh) {
  MeshDiagnostics diag;

  // face sharing counts recomputed from scratch
  std::map<std::vector<int>, int> count;
  for (const auto& el : mesh.elements)
    for (const auto& lf : local_faces(el.kind)) {
      std::vector<int> key;
      for (int loc : lf) key.push_back(el.verts[loc]);
      std::sort(key.begin(), key.end());
      ++count[key];
    }
  for (const auto& [key, c] : count)
    if (c > 2)
      diag.issues.push_back("non-manifold: face shared by " +
                            std::to_string(c) + " elements");

  // per-element checks
  for (int e = 0; e < mesh.n_elements(); ++e) {
    auto coords = mesh.element_coords(e);
    const auto& rule = make_quadrature(mesh.elements[e].kind, 3);
    for (int q = 0; q < rule.size(); ++q) {
      try {
        map_physical(mesh.elements[e].kind, coords, rule.points[q]);
      } catch (const GeometryError&) {
        diag.issues.push_back("element " + std::to_string(e) +
                              ": non-positive Jacobian");
        break;
      }
    }
  }

  if (!mesh.element_faces.empty()) {
    // closed-polyhedron and frame checks
    for (int e = 0; e < mesh.n_elements(); ++e) {
      Vec3 sum = Vec3::Zero();
      double surf = 0.0;
      for (int f : mesh.element_faces[e]) {
        const Face& fc = mesh.faces[f];
        auto coords = mesh.face_coords(f);
        const auto& rule = make_quadrature(fc.kind(), 3);
        double sgn = (fc.owner == e) ? 1.0 : -1.0;
        for (int q = 0; q < rule.size(); ++q) {
          FaceMapResult m = map_face(fc.kind(), coords, rule.points[q]);
          sum += sgn * rule.weights[q] * m.raw_normal;
          surf += rule.weights[q] * m.area_element;
        }
      }
      if (sum.norm() > 1e-12 * surf)
        diag.issues.push_back("element " + std::to_string(e) +
                              ": signed face areas do not close");
    }
    for (int f = 0; f < mesh.n_faces(); ++f) {
      const Face& fc = mesh.faces[f];
      double err = std::abs(fc.normal.norm() - 1.0) +
                   std::abs(fc.t1.dot(fc.t2)) + std::abs(fc.t1.dot(fc.normal)) +
                   std::abs(fc.t2.dot(fc.normal)) +
                   (fc.t1.cross(fc.t2) - fc.normal).norm();
      if (err > 1e-13)
        diag.issues.push_back("face " + std::to_string(f) +
                              ": tangent frame not orthonormal");
      if (!fc.boundary() && fc.owner >= fc.neighbor)
        diag.issues.push_back("face " + std::to_string(f) +
                              ": owner id not smaller than neighbor id");
    }
  }
  return diag;
}

MeshInfo mesh_info(const Mesh& mesh) {
  MeshInfo info;
  info.n_elements = mesh.n_elements();
  info.n_vertices = static_cast<int>(mesh.vertices.size());
  info.n_faces = mesh.n_faces();
  double hsum = 0.0;
  info.h_min = 1e300;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    double d = mesh.element_diameter(e);
    info.h_min = std::min(info.h_min, d);
    info.h_max = std::max(info.h_max, d);
    hsum += d;
  }
  if (info.n_elements > 0) info.h_mean = hsum / info.n_elements;
  for (const auto& fc : mesh.faces) {
    if (!fc.boundary()) ++info.n_interior_faces;
    else if (fc.tag == BoundaryTag::GammaA) ++info.n_gamma_a;
    else ++info.n_gamma_d;
  }
  return info;
}

}  // namespace hdgem
