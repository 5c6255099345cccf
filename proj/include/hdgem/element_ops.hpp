#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hdgem/mesh.hpp"
#include "hdgem/physics.hpp"
#include "hdgem/quadrature.hpp"

namespace hdgem {

/// Per-face assembly data of one element kernel. The normal is the
/// element-outward one; tangent frame and face basis are the global
/// (face-owned) ones shared by both adjacent elements.
struct FaceKernelData {
  int face_nb = 0;
  Eigen::MatrixXd psi;      // nq x face_nb, face trace basis
  Eigen::MatrixXd phi_vol;  // nq x nb, volume basis at the face points
  Eigen::VectorXd w;        // physical surface weights
  Vec3 n, t1, t2;
  bool gamma_a = false;
  double tau = 1.0;
};

/// Dense discrete operators of a single element for one formulation.
///
/// Interior layout: [first field (H or U); E], each 3*nb with 3*node+comp.
/// Local trace layout: faces in local order, 2*node+tangent each.
/// The semidiscrete system reads
///   att * xdot + stiff * x + coupling * lambda = [0; -source]
///   rmat * x + lmat * lambda = abc rhs,
/// matching the 2x2-plus-trace block structure of both formulations.
struct ElementKernel {
  CellKind kind;
  int degree = 1;
  Formulation form = Formulation::Mixed;
  int nb = 0;    // scalar basis size
  int nint = 0;  // 6*nb
  int nl = 0;    // total local trace dofs
  std::vector<int> face_offsets;
  std::vector<FaceKernelData> fdata;

  Eigen::MatrixXd phi;                // volume basis at quad points (nq x nb)
  std::vector<Eigen::MatrixXd> dphi;  // physical gradients, 3 x (nq x nb)
  Eigen::VectorXd wdet;               // quad weights * detJ
  Eigen::MatrixXd mass;               // scalar mass matrix

  Eigen::MatrixXd att;       // time-derivative block
  Eigen::MatrixXd stiff;     // stiffness block
  Eigen::MatrixXd coupling;  // [D;H] (mixed) or [C;H] (e-field)
  Eigen::MatrixXd rmat;      // [I J] trace rows
  Eigen::MatrixXd lmat;      // trace-trace block incl. ABC augmentation

  Material mat;
};

using KernelPtr = std::shared_ptr<const ElementKernel>;

/// Stabilization per face. Impedance mode: tau = sqrt(eps/mu) of the
/// adjacent material(s), harmonic mean across interior material jumps,
/// scaled by tau_scale. Constant mode: tau = tau_scale everywhere.
std::vector<double> compute_face_tau(const Mesh& mesh, const MaterialMap& mats,
                                     bool impedance, double tau_scale);

/// Assembles the dense operators of element e. Kernels of geometrically and
/// materially identical elements are shared through the cache (keyed by a
/// quantized signature), which collapses structured-grid assembly to a
/// handful of distinct kernels.
class KernelCache {
 public:
  KernelPtr get(const Mesh& mesh, int e, int degree, Formulation form,
                const MaterialMap& mats, const std::vector<double>& face_tau);
  std::size_t distinct() const { return cache_.size(); }

 private:
  std::map<std::string, KernelPtr> cache_;
};

/// Face-local L2 projection of the tangential part of f onto the trace
/// space; returns 2*face_nb coefficients in the (t1,t2) frame.
Eigen::VectorXd project_trace(const Mesh& mesh, int f, int degree,
                              const std::function<Vec3(const Vec3&)>& field);

/// Element-local L2 projection of a vector field; returns 3*nb coefficients.
Eigen::VectorXd project_volume(const Mesh& mesh, int e, int degree,
                               const std::function<Vec3(const Vec3&)>& field);

/// Physical coordinates of the kernel's volume quadrature points.
Eigen::Matrix<double, Eigen::Dynamic, 3> volume_quad_points(
    const Mesh& mesh, int e, const ElementKernel& ker);

/// Source vector -(w, i_s) (mixed) or -(w, di_s/dt) (e-field) at time t,
/// filling the E-block rows; length nint.
Eigen::VectorXd assemble_source(const ElementKernel& ker,
                                const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts,
                                const SourceTerm& src, double t);

}  // namespace hdgem
