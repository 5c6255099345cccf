#pragma once

#include <vector>

#include "hdgem/types.hpp"

namespace hdgem {

/// Quadrature rule on a reference cell.
///
/// Reference cells: Hex = [-1,1]^3, Quad = [-1,1]^2, Tet = unit right
/// tetrahedron {x,y,z >= 0, x+y+z <= 1}, Tri = unit right triangle.
/// Points for 2D cells store a zero third coordinate.
struct QuadratureRule {
  CellKind kind;
  int exactness = 0;  // every polynomial up to this total degree is exact
  std::vector<Vec3> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// 1D Gauss-Legendre rule on [-1,1] (Golub-Welsch).
void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w);

/// Rule integrating all polynomials of total degree <= exactness_degree.
/// Hex/Quad use tensor Gauss-Legendre; Tet/Tri a collapsed-coordinate
/// Gauss product. Throws CapabilityError for exactness_degree > 11.
QuadratureRule make_quadrature(CellKind kind, int exactness_degree);

/// Measure of the reference cell.
double reference_measure(CellKind kind);

}  // namespace hdgem
