#pragma once

#include <array>
#include <vector>

#include "hdgem/types.hpp"

namespace hdgem {

/// Nodal Lagrange basis on a reference cell.
///
/// Hex/Quad: tensor-product Gauss-Lobatto nodes, tensor monomial span.
/// Tet/Tri: principal-lattice nodes, total-degree monomial span.
/// Shape functions are represented as monomial combinations through the
/// inverse Vandermonde, which gives the Kronecker property by construction.
class ReferenceBasis {
 public:
  CellKind kind;
  int degree = 0;
  std::vector<Vec3> nodes;

  int size() const { return static_cast<int>(nodes.size()); }
  int dim() const { return cell_dim(kind); }

  /// Shape values at a reference point; length size().
  Eigen::VectorXd shape(const Vec3& ref) const;
  /// Shape gradients w.r.t. reference coordinates; size() x dim().
  Eigen::MatrixXd shape_grad(const Vec3& ref) const;

  // monomial exponents and inverse Vandermonde (internal representation)
  std::vector<std::array<int, 3>> exponents;
  Eigen::MatrixXd coeff;  // coeff = V^{-1}, phi = coeff^T * monomials
};

/// Supported: kind in {hex, tet, quad, tri}, p in {1, 2}.
const ReferenceBasis& make_basis(CellKind kind, int p);

/// Isoparametric (here affine/multilinear, straight-sided) volume map.
struct MapResult {
  Vec3 x;
  Mat3 jacobian;
  double det = 0.0;
};

/// Maps a reference point of a volume cell with the given vertex coordinates.
/// Throws GeometryError if det(J) <= 0.
MapResult map_physical(CellKind kind, const std::vector<Vec3>& verts,
                       const Vec3& ref);

/// Inverse of map_physical (Newton; exact in one step for affine cells).
Vec3 reference_of(CellKind kind, const std::vector<Vec3>& verts,
                  const Vec3& phys);

/// Surface map for a face cell (quad/tri) embedded in 3D: physical point,
/// the two tangent columns of the 3x2 Jacobian, and the area element
/// |d1 x d2| (with the un-normalized normal d1 x d2).
struct FaceMapResult {
  Vec3 x;
  Vec3 d1, d2;
  Vec3 raw_normal;  // d1 x d2
  double area_element = 0.0;
};

FaceMapResult map_face(CellKind kind, const std::vector<Vec3>& verts,
                       const Vec3& ref);

}  // namespace hdgem
