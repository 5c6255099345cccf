#pragma once

#include <map>
#include <optional>
#include <string>

#include "hdgem/physics.hpp"
#include "hdgem/types.hpp"

namespace hdgem {

enum class MeshKind { CubeHex, CubeTet, BallTet, File };
enum class SourceKind { None, Manufactured };
enum class InitKind { Zero, Cavity, PlaneWave };
enum class ReferenceKind { None, Cavity, PlaneWave };

/// Flat key=value run description ('#' comments, dotted section names).
struct RunConfig {
  Formulation formulation = Formulation::Mixed;
  int degree = 1;

  MeshKind mesh_kind = MeshKind::CubeHex;
  int mesh_n = 5;
  double mesh_jitter = 0.0;
  double mesh_radius = 1.5;
  double mesh_inner_radius = 0.0;
  std::string mesh_path;

  std::map<int, Material> materials;  // default: region 1, vacuum-normalized

  bool tau_impedance = true;  // tau = tau_value * sqrt(eps/mu) when set
  double tau_value = 1.0;

  SourceKind source = SourceKind::None;
  InitKind init = InitKind::Zero;
  /// Trace data on Gamma_D: the analytic solution's tangential E (the
  /// cavity mode is PMC-like, so its tangential E is nonzero on the cube
  /// boundary) or homogeneous zero.
  bool dirichlet_exact = true;
  double wave_frequency = 3.0e8;

  double dt = 1e-4;
  double t_max = 5e-4;

  ReferenceKind reference = ReferenceKind::None;
  bool error_per_element = false;

  std::string output_vtk;
  std::string output_csv;
  std::optional<double> dft_frequency;
  std::string dft_vtk;
  int snapshot_every = 1;

  long budget_trace_dofs = 400000;
  bool override_budget = false;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

/// Cross-field checks (integral step count, e-field restrictions, material
/// sanity). Throws ConfigError naming the offending key.
void validate_config(const RunConfig& cfg);

}  // namespace hdgem
