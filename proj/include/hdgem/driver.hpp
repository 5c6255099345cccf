#pragma once

#include <string>
#include <vector>

#include "hdgem/condensed.hpp"
#include "hdgem/config.hpp"
#include "hdgem/postproc.hpp"

namespace hdgem {

struct RunResult {
  Mesh mesh;
  FieldState state;
  double error = 0.0;  // NaN when no reference is configured
  std::vector<double> energy;  // per time level, including t = 0
  double trace_mismatch = 0.0;
  std::vector<Eigen::VectorXcd> dft_e;  // empty unless a DFT was requested
  int n_steps = 0;
  int n_trace_free = 0;
  std::size_t distinct_kernels = 0;
};

Mesh build_mesh(const RunConfig& cfg);
ProblemSetup build_setup(const RunConfig& cfg, const Mesh& mesh);

/// Initializer at t = 0; the H slot carries u(0) for the e-field system.
std::function<EHField(const Vec3&)> initial_field(const RunConfig& cfg);
/// Reference E at time t per cfg.reference (null when none).
std::function<Vec3(const Vec3&)> reference_field(const RunConfig& cfg,
                                                 double t);

/// Full time loop with artifact output per the config.
RunResult run_simulation(const RunConfig& cfg);

/// Spatial study: rerun cfg at each mesh resolution, error vs reference.
ConvergenceReport space_study(RunConfig cfg, const std::vector<int>& ns);
/// Temporal study: fixed mesh, error vs reference for each step length.
ConvergenceReport time_study(RunConfig cfg, const std::vector<double>& dts);

}  // namespace hdgem
