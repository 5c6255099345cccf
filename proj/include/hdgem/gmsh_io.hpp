#pragma once

#include <string>

#include "hdgem/mesh.hpp"

namespace hdgem {

/// Reads a Gmsh MSH 4.1 ASCII file (subset: $MeshFormat, $PhysicalNames,
/// $Entities, $Nodes, $Elements). Physical names "PEC" and "ABC" on surface
/// groups map to Gamma_D / Gamma_A; volume physical tags become region ids.
/// tet10/hex27 cells are read straight-sided (corner nodes only).
/// Unreferenced vertices are dropped.
Mesh read_gmsh(const std::string& path);

/// Writes the mesh in MSH 4.1 ASCII, including boundary surface elements for
/// tagged faces. Coordinates are emitted with 17 significant digits so a
/// read-back reproduces them bitwise.
void write_gmsh(const Mesh& mesh, const std::string& path);

}  // namespace hdgem
