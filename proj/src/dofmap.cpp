#include "hdgem/dofmap.hpp"

namespace hdgem {

DofMap build_dofmap(const Mesh& mesh, int degree) {
  DofMap dm;
  dm.degree = degree;
  dm.elem_nb.resize(mesh.n_elements());
  for (int e = 0; e < mesh.n_elements(); ++e)
    dm.elem_nb[e] = make_basis(mesh.elements[e].kind, degree).size();

  dm.face_nb.resize(mesh.n_faces());
  dm.face_offset.resize(mesh.n_faces());
  dm.face_constrained.resize(mesh.n_faces());
  int off = 0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const Face& fc = mesh.faces[f];
    dm.face_nb[f] = make_basis(fc.kind(), degree).size();
    dm.face_offset[f] = off;
    off += 2 * dm.face_nb[f];
    dm.face_constrained[f] = fc.boundary() && fc.tag == BoundaryTag::GammaD;
  }
  dm.n_trace_full = off;

  dm.full_to_free.assign(off, -1);
  int free = 0;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (dm.face_constrained[f]) continue;
    for (int i = 0; i < dm.face_ndof(f); ++i)
      dm.full_to_free[dm.face_offset[f] + i] = free++;
  }
  dm.n_trace_free = free;
  return dm;
}

}  // namespace hdgem
