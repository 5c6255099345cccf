#pragma once

#include <string>
#include <vector>

#include "hdgem/basis.hpp"
#include "hdgem/types.hpp"

namespace hdgem {

enum class BoundaryTag { Interior, GammaD, GammaA };

/// Oriented mesh face (tri or quad).
///
/// Vertices are stored in cyclic order, outward from the owner element,
/// rotated so the smallest vertex id comes first. The tangent frame
/// satisfies t1 x t2 = n with t1 derived from the global axis least
/// aligned with n.
struct Face {
  std::vector<int> verts;
  int owner = -1;
  int neighbor = -1;  // -1 on boundary
  Vec3 normal = Vec3::Zero();
  Vec3 t1 = Vec3::Zero();
  Vec3 t2 = Vec3::Zero();
  BoundaryTag tag = BoundaryTag::Interior;

  bool boundary() const { return neighbor < 0; }
  CellKind kind() const {
    return verts.size() == 3 ? CellKind::Tri : CellKind::Quad;
  }
};

struct Element {
  CellKind kind = CellKind::Hex;
  std::vector<int> verts;  // tensor order for hex, gmsh order for tet
  int region = 1;
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<Element> elements;
  std::vector<Face> faces;
  std::vector<std::vector<int>> element_faces;  // [elem][local face] -> face id

  int n_elements() const { return static_cast<int>(elements.size()); }
  int n_faces() const { return static_cast<int>(faces.size()); }

  std::vector<Vec3> element_coords(int e) const;
  /// Face vertex coordinates in the geometry-basis node order
  /// (cyclic -> tensor permutation for quads).
  std::vector<Vec3> face_coords(int f) const;

  double element_diameter(int e) const;
};

/// Local face tables (vertex indices into the element, outward-oriented,
/// cyclic order).
const std::vector<std::vector<int>>& local_faces(CellKind kind);

/// n^3 axis-aligned cubes covering [0,1]^3; all boundary faces Gamma_D.
Mesh generate_unit_cube_hex(int n_per_side);

/// Kuhn 6-tet subdivision of the n^3 grid. jitter > 0 displaces interior
/// vertices by a deterministic pseudo-random offset of jitter*h to obtain
/// a non-uniform tetrahedral mesh; the cube shape is preserved.
Mesh generate_unit_cube_tet(int n_per_side, double jitter = 0.0);

/// Tetrahedral ball mesh of the given radius (spherified-cube map applied to
/// the Kuhn subdivision of an n^3 cube grid). Boundary faces are tagged
/// Gamma_A. If inner_radius > 0, elements inside that radius get region 2;
/// n should be chosen so grid shells align with the interface (n = 6m for
/// inner_radius = radius/3).
Mesh generate_ball_tet(int n_per_side, double radius, double inner_radius = 0.0);

/// Builds faces, element_faces, normals and tangent frames from the element
/// list. Deterministic: faces ordered by their sorted vertex-id keys.
/// Throws GeometryError if a face is shared by more than two elements.
void build_face_topology(Mesh& mesh);

Vec3 tangent_frame_t1(const Vec3& n);

struct MeshDiagnostics {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

/// Checks mesh and face invariants; reports rather than throws.
MeshDiagnostics validate(const Mesh& mesh);

struct MeshInfo {
  int n_elements = 0;
  int n_vertices = 0;
  int n_faces = 0;
  int n_interior_faces = 0;
  int n_gamma_d = 0;
  int n_gamma_a = 0;
  double h_min = 0.0, h_max = 0.0, h_mean = 0.0;
};

MeshInfo mesh_info(const Mesh& mesh);

}  // namespace hdgem
