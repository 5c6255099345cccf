#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <functional>
#include <vector>

#include "hdgem/dofmap.hpp"
#include "hdgem/element_ops.hpp"
#include "hdgem/mesh.hpp"
#include "hdgem/physics.hpp"

namespace hdgem {

/// Discrete solution at one time level. interior[e] holds the element's
/// [H|U ; E] coefficients, lambda the full trace vector (constrained dofs
/// carry the Dirichlet data).
struct FieldState {
  double t = 0.0;
  std::vector<Eigen::VectorXd> interior;
  Eigen::VectorXd lambda;
};

struct ProblemSetup {
  Formulation form = Formulation::Mixed;
  int degree = 1;
  MaterialMap materials;
  std::vector<double> face_tau;  // from compute_face_tau
  double dt = 0.0;
  SourceTerm source;
  /// Prescribed tangential E on Gamma_D; null means homogeneous (PEC).
  std::function<Vec3(const Vec3&, double)> dirichlet;
  /// Incident field for the Silver-Mueller terms on Gamma_A (mixed only).
  std::function<EHField(const Vec3&, double)> incident;
};

/// Backward-Euler stepper with static condensation onto the trace variable.
///
/// Per step, each element contributes the Schur complement
///   S_e = L_e - [I J] (A_e/dt + stiff_e)^{-1} [D; H]
/// to the condensed trace matrix K (assembled and factored once), the trace
/// solve yields Lambda^{n+1}, and the interior unknowns are recovered
/// elementwise.
class CondensedSystem {
 public:
  CondensedSystem(const Mesh& mesh, const DofMap& dofmap,
                  const ProblemSetup& setup);

  /// Projects initial data; for the e-field formulation the H slot of the
  /// initializer supplies u(0) = mu^{-1} curl E(0).
  FieldState initial_state(
      const std::function<EHField(const Vec3&)>& init) const;

  /// One backward-Euler step from state.t to state.t + dt.
  void advance(FieldState& state) const;

  /// 1/2 x^T A x: electromagnetic energy (mixed) resp. 1/2 (E, sigma E).
  double energy(const FieldState& state) const;

  /// Largest pointwise jump of the tangential numerical trace across
  /// interior faces, relative to the trace magnitude.
  double trace_mismatch(const FieldState& state) const;

  const ElementKernel& kernel(int e) const { return *kernels_[e]; }
  std::size_t distinct_kernels() const { return per_kernel_.size(); }
  int n_trace_free() const { return dofmap_.n_trace_free; }
  std::int64_t condensed_nonzeros() const { return kmat_.nonZeros(); }

 private:
  struct KernelSolve {
    KernelPtr ker;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;  // of A/dt + stiff
    Eigen::MatrixXd minv_coupling;
    Eigen::MatrixXd schur;
  };

  void local_trace(const FieldState& state, int e,
                   Eigen::VectorXd& lam) const;
  Eigen::VectorXd dirichlet_values(double t) const;
  Eigen::VectorXd boundary_rhs(double t) const;

  const Mesh& mesh_;
  DofMap dofmap_;
  ProblemSetup setup_;
  std::vector<KernelPtr> kernels_;
  std::vector<int> kernel_solve_of_;  // element -> index into per_kernel_
  std::vector<KernelSolve> per_kernel_;
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 3>> quad_pts_;
  Eigen::SparseMatrix<double> kmat_;
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> solver_;
  // fallback when the direct factor does not fit in memory; the condensed
  // matrix is mass-dominated for the time steps of interest, so a
  // preconditioned Krylov solve converges quickly
  bool use_iterative_ = false;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>,
                  Eigen::IncompleteLUT<double>> iterative_;
};

}  // namespace hdgem
