#pragma once

#include <vector>

#include "hdgem/mesh.hpp"

namespace hdgem {

/// Degree-of-freedom layout.
///
/// Interior dofs live per element as [H|U block ; E block], each 3*nb long
/// with index 3*node + component. Trace dofs live per face as 2*face_nb
/// values indexed 2*node + tangent (t1, t2). Gamma_D trace dofs are
/// constrained to projected boundary data and excluded from the free system.
struct DofMap {
  int degree = 1;
  std::vector<int> elem_nb;          // volume scalar basis size
  std::vector<int> face_nb;          // face scalar basis size
  std::vector<int> face_offset;      // offset into the full trace vector
  std::vector<char> face_constrained;
  std::vector<int> full_to_free;     // -1 for constrained dofs
  int n_trace_full = 0;
  int n_trace_free = 0;

  int face_ndof(int f) const { return 2 * face_nb[f]; }
  int elem_interior_ndof(int e) const { return 6 * elem_nb[e]; }
};

DofMap build_dofmap(const Mesh& mesh, int degree);

}  // namespace hdgem
