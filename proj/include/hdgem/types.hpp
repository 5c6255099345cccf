#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hdgem {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Cell kinds. Hex and Tet are volume cells, Quad and Tri their faces.
enum class CellKind { Hex, Tet, Quad, Tri };

inline int cell_dim(CellKind k) {
  return (k == CellKind::Hex || k == CellKind::Tet) ? 3 : 2;
}

inline const char* cell_name(CellKind k) {
  switch (k) {
    case CellKind::Hex: return "hex";
    case CellKind::Tet: return "tet";
    case CellKind::Quad: return "quad";
    case CellKind::Tri: return "tri";
  }
  return "?";
}

enum class Formulation { Mixed, EField };

/// Thrown for requests outside the supported (kind, degree, exactness) envelope.
struct CapabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown for invalid geometry (non-positive Jacobians, non-manifold faces...).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown on malformed input files; carries the line number where known.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown when a run cannot proceed (singular blocks, bad stabilization...).
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hdgem
