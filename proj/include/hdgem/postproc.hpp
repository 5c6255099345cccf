#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "hdgem/condensed.hpp"
#include "hdgem/mesh.hpp"

namespace hdgem {

enum class ErrorMode { PerElementRatio, GlobalRatio };

/// Relative L2 error of a vector field given per element as 3*nb
/// coefficients. PerElementRatio sums elementwise error/reference ratios
/// before the square root; GlobalRatio forms the single global ratio.
/// Quadrature exactness 2p+2. Throws SolveError naming the element if the
/// reference vanishes on it (per-element mode).
double relative_l2_error(const Mesh& mesh, int degree,
                         const std::function<Eigen::VectorXd(int)>& coeffs,
                         const std::function<Vec3(const Vec3&)>& exact,
                         ErrorMode mode = ErrorMode::PerElementRatio);

/// L2 norm of a coefficient field, optionally restricted to one material
/// region (region < 0 integrates everywhere).
double field_l2(const Mesh& mesh, int degree,
                const std::function<Eigen::VectorXd(int)>& coeffs,
                int region = -1);

struct ConvergenceRow {
  double resolution = 0.0;  // 1/h or 1/dt
  double error = 0.0;
  double order = 0.0;  // NaN on the first row
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::string label;  // e.g. formulation/degree/tau description
};

/// Observed orders log(e_{k-1}/e_k)/log(r_k/r_{k-1}); resolutions must be
/// strictly increasing.
ConvergenceReport convergence_order(const std::vector<double>& errors,
                                    const std::vector<double>& resolutions);

void write_csv(const ConvergenceReport& report, const std::string& path);

/// Accumulates (1/n) sum_k x(t_k) exp(-2 pi i f t_k) over uniformly spaced
/// samples; the sample layout (one vector per element or a single vector)
/// is up to the caller.
class PointwiseDft {
 public:
  explicit PointwiseDft(double frequency) : frequency_(frequency) {}

  void add_sample(double t, const std::vector<Eigen::VectorXd>& sample);
  /// Normalized coefficients; throws ConfigError when no samples were added.
  std::vector<Eigen::VectorXcd> result() const;
  int sample_count() const { return n_; }

 private:
  double frequency_;
  int n_ = 0;
  double t0_ = 0.0, spacing_ = 0.0, t_prev_ = 0.0;
  std::vector<Eigen::VectorXcd> acc_;
};

/// Legacy-ASCII VTK export. Interior coefficients are evaluated at element
/// corners and vertex-averaged; field names are "E" and "H" (mixed) or "U"
/// (e-field). dft_e, when non-null, adds the vertex-averaged "Re_DFT_E"
/// array from per-element complex E coefficients.
void export_vtk(const Mesh& mesh, int degree, const FieldState& state,
                Formulation form, const std::string& path,
                const std::vector<Eigen::VectorXcd>* dft_e = nullptr);

}  // namespace hdgem
