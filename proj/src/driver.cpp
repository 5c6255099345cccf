#include "hdgem/driver.hpp"

#include <cmath>
#include <limits>

#include "hdgem/gmsh_io.hpp"

namespace hdgem {

namespace {

// spatial factor of the cavity mode's magnetic field (the sin(pi t) = 1 slice)
Vec3 cavity_h_spatial(const Vec3& x) { return cavity_mode_111(x, 0.5).H; }

Eigen::VectorXd e_block(const FieldState& st, int e) {
  int nv = (int)st.interior[e].size() / 2;
  return st.interior[e].segment(nv, nv);
}

}  // namespace

Mesh build_mesh(const RunConfig& cfg) {
  switch (cfg.mesh_kind) {
    case MeshKind::CubeHex:
      return generate_unit_cube_hex(cfg.mesh_n);
    case MeshKind::CubeTet:
      return generate_unit_cube_tet(cfg.mesh_n, cfg.mesh_jitter);
    case MeshKind::BallTet:
      return generate_ball_tet(cfg.mesh_n, cfg.mesh_radius,
                               cfg.mesh_inner_radius);
    case MeshKind::File:
      return read_gmsh(cfg.mesh_path);
  }
  throw ConfigError("mesh.kind: unhandled value");
}

ProblemSetup build_setup(const RunConfig& cfg, const Mesh& mesh) {
  ProblemSetup setup;
  setup.form = cfg.formulation;
  setup.degree = cfg.degree;
  setup.materials = cfg.materials;
  setup.face_tau =
      compute_face_tau(mesh, setup.materials, cfg.tau_impedance, cfg.tau_value);
  setup.dt = cfg.dt;

  if (cfg.source == SourceKind::Manufactured)
    setup.source =
        manufactured_cavity_source(material_for(cfg.materials, 1).sigma);

  if (cfg.init == InitKind::Cavity && cfg.dirichlet_exact)
    setup.dirichlet = [](const Vec3& x, double t) {
      return cavity_mode_111(x, t).E;
    };

  if (cfg.init == InitKind::PlaneWave) {
    const Material& bg = material_for(cfg.materials, 1);
    double f = cfg.wave_frequency, eps = bg.epsilon, mu = bg.mu;
    setup.incident = [f, eps, mu](const Vec3& x, double t) {
      return plane_wave(x, t, f, eps, mu);
    };
  }
  return setup;
}

std::function<EHField(const Vec3&)> initial_field(const RunConfig& cfg) {
  const bool efield = cfg.formulation == Formulation::EField;
  const Material bg = material_for(cfg.materials, 1);
  switch (cfg.init) {
    case InitKind::Zero:
      return [](const Vec3&) { return EHField{}; };
    case InitKind::Cavity:
      if (!efield)
        return [](const Vec3& x) { return cavity_mode_111(x, 0.0); };
      return [](const Vec3& x) {
        EHField f = cavity_mode_111(x, 0.0);
        f.H = -M_PI * cavity_h_spatial(x);  // u(0) = mu^{-1} curl E(0)
        return f;
      };
    default:
      break;
  }
  double f = cfg.wave_frequency, eps = bg.epsilon, mu = bg.mu;
  if (!efield)
    return [f, eps, mu](const Vec3& x) {
      return plane_wave(x, 0.0, f, eps, mu);
    };
  return [f, eps, mu](const Vec3& x) {
    EHField out = plane_wave(x, 0.0, f, eps, mu);
    double k = std::sqrt(eps * mu) * 2.0 * M_PI * f;
    out.H = Vec3(-(k / mu) * std::sin(k * x.y()), 0.0, 0.0);
    return out;
  };
}

std::function<Vec3(const Vec3&)> reference_field(const RunConfig& cfg,
                                                 double t) {
  switch (cfg.reference) {
    case ReferenceKind::None:
      return nullptr;
    case ReferenceKind::Cavity:
      return [t](const Vec3& x) { return cavity_mode_111(x, t).E; };
    case ReferenceKind::PlaneWave: {
      const Material& bg = material_for(cfg.materials, 1);
      double f = cfg.wave_frequency, eps = bg.epsilon, mu = bg.mu;
      return [t, f, eps, mu](const Vec3& x) {
        return plane_wave(x, t, f, eps, mu).E;
      };
    }
  }
  return nullptr;
}

RunResult run_simulation(const RunConfig& cfg) {
  validate_config(cfg);
  RunResult res;
  res.mesh = build_mesh(cfg);
  DofMap dofmap = build_dofmap(res.mesh, cfg.degree);
  if (dofmap.n_trace_free > cfg.budget_trace_dofs && !cfg.override_budget)
    throw ConfigError(
        "run exceeds budget.trace_dofs (" +
        std::to_string(dofmap.n_trace_free) + " > " +
        std::to_string(cfg.budget_trace_dofs) +
        "); pass --override-budget to run anyway");

  ProblemSetup setup = build_setup(cfg, res.mesh);
  CondensedSystem system(res.mesh, dofmap, setup);
  res.n_trace_free = dofmap.n_trace_free;
  res.distinct_kernels = system.distinct_kernels();

  FieldState state = system.initial_state(initial_field(cfg));
  res.n_steps = (int)std::llround(cfg.t_max / cfg.dt);

  PointwiseDft dft(cfg.dft_frequency.value_or(0.0));
  const bool want_dft = cfg.dft_frequency.has_value();
  auto e_coeffs = [&state, &res](int) {
    std::vector<Eigen::VectorXd> all(res.mesh.n_elements());
    for (int e = 0; e < res.mesh.n_elements(); ++e) all[e] = e_block(state, e);
    return all;
  };

  res.energy.push_back(system.energy(state));
  for (int step = 0; step < res.n_steps; ++step) {
    if (want_dft && step % cfg.snapshot_every == 0)
      dft.add_sample(state.t, e_coeffs(0));
    system.advance(state);
    res.energy.push_back(system.energy(state));
  }

  res.trace_mismatch = system.trace_mismatch(state);
  if (want_dft) res.dft_e = dft.result();

  auto ref = reference_field(cfg, state.t);
  if (ref) {
    res.error = relative_l2_error(
        res.mesh, cfg.degree, [&](int e) { return e_block(state, e); }, ref,
        cfg.error_per_element ? ErrorMode::PerElementRatio
                              : ErrorMode::GlobalRatio);
  } else {
    res.error = std::numeric_limits<double>::quiet_NaN();
  }

  if (!cfg.output_vtk.empty())
    export_vtk(res.mesh, cfg.degree, state, cfg.formulation, cfg.output_vtk);
  if (!cfg.dft_vtk.empty()) {
    if (!want_dft)
      throw ConfigError("output.dft.vtk requires output.dft.frequency");
    export_vtk(res.mesh, cfg.degree, state, cfg.formulation, cfg.dft_vtk,
               &res.dft_e);
  }
  res.state = std::move(state);
  return res;
}

ConvergenceReport space_study(RunConfig cfg, const std::vector<int>& ns) {
  std::vector<double> errors, resolutions;
  for (int n : ns) {
    cfg.mesh_n = n;
    RunResult r = run_simulation(cfg);
    errors.push_back(r.error);
    resolutions.push_back((double)n);
  }
  ConvergenceReport rep = convergence_order(errors, resolutions);
  rep.label = std::string(cfg.formulation == Formulation::Mixed ? "mixed"
                                                                : "efield") +
              " p" + std::to_string(cfg.degree) + " space";
  return rep;
}

ConvergenceReport time_study(RunConfig cfg, const std::vector<double>& dts) {
  std::vector<double> errors, resolutions;
  for (double dt : dts) {
    cfg.dt = dt;
    RunResult r = run_simulation(cfg);
    errors.push_back(r.error);
    resolutions.push_back(1.0 / dt);
  }
  ConvergenceReport rep = convergence_order(errors, resolutions);
  rep.label = std::string(cfg.formulation == Formulation::Mixed ? "mixed"
                                                                : "efield") +
              " p" + std::to_string(cfg.degree) + " time";
  return rep;
}

}  // namespace hdgem
