#include "hdgem/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hdgem {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  cfg.materials.clear();
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line without '=': " + line);
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));

    if (key == "formulation") {
      if (val == "mixed")
        cfg.formulation = Formulation::Mixed;
      else if (val == "efield")
        cfg.formulation = Formulation::EField;
      else
        throw ConfigError("formulation must be 'mixed' or 'efield'");
    } else if (key == "degree") {
      cfg.degree = to_int(key, val);
    } else if (key == "mesh.kind") {
      if (val == "cube-hex")
        cfg.mesh_kind = MeshKind::CubeHex;
      else if (val == "cube-tet")
        cfg.mesh_kind = MeshKind::CubeTet;
      else if (val == "ball-tet")
        cfg.mesh_kind = MeshKind::BallTet;
      else if (val == "file")
        cfg.mesh_kind = MeshKind::File;
      else
        throw ConfigError("mesh.kind: unknown value '" + val + "'");
    } else if (key == "mesh.n") {
      cfg.mesh_n = to_int(key, val);
    } else if (key == "mesh.jitter") {
      cfg.mesh_jitter = to_double(key, val);
    } else if (key == "mesh.radius") {
      cfg.mesh_radius = to_double(key, val);
    } else if (key == "mesh.inner_radius") {
      cfg.mesh_inner_radius = to_double(key, val);
    } else if (key == "mesh.path") {
      cfg.mesh_path = val;
    } else if (key.rfind("material.", 0) == 0) {
      size_t dot = key.find('.', 9);
      if (dot == std::string::npos)
        throw ConfigError("material key needs region and property: " + key);
      int region = to_int(key, key.substr(9, dot - 9));
      std::string prop = key.substr(dot + 1);
      Material& m = cfg.materials[region];
      if (prop == "epsilon")
        m.epsilon = to_double(key, val);
      else if (prop == "mu")
        m.mu = to_double(key, val);
      else if (prop == "sigma")
        m.set_sigma_scalar(to_double(key, val));
      else
        throw ConfigError("unknown material property: " + key);
    } else if (key == "tau.mode") {
      if (val == "impedance")
        cfg.tau_impedance = true;
      else if (val == "constant")
        cfg.tau_impedance = false;
      else
        throw ConfigError("tau.mode must be 'impedance' or 'constant'");
    } else if (key == "tau.value") {
      cfg.tau_value = to_double(key, val);
    } else if (key == "source") {
      if (val == "none")
        cfg.source = SourceKind::None;
      else if (val == "manufactured")
        cfg.source = SourceKind::Manufactured;
      else
        throw ConfigError("source: unknown value '" + val + "'");
    } else if (key == "init") {
      if (val == "zero")
        cfg.init = InitKind::Zero;
      else if (val == "cavity")
        cfg.init = InitKind::Cavity;
      else if (val == "planewave")
        cfg.init = InitKind::PlaneWave;
      else
        throw ConfigError("init: unknown value '" + val + "'");
    } else if (key == "bc.dirichlet") {
      if (val == "exact")
        cfg.dirichlet_exact = true;
      else if (val == "zero")
        cfg.dirichlet_exact = false;
      else
        throw ConfigError("bc.dirichlet must be 'exact' or 'zero'");
    } else if (key == "wave.frequency") {
      cfg.wave_frequency = to_double(key, val);
    } else if (key == "dt") {
      cfg.dt = to_double(key, val);
    } else if (key == "t_max") {
      cfg.t_max = to_double(key, val);
    } else if (key == "error.reference") {
      if (val == "none")
        cfg.reference = ReferenceKind::None;
      else if (val == "cavity")
        cfg.reference = ReferenceKind::Cavity;
      else if (val == "planewave")
        cfg.reference = ReferenceKind::PlaneWave;
      else
        throw ConfigError("error.reference: unknown value '" + val + "'");
    } else if (key == "error.mode") {
      if (val == "per-element")
        cfg.error_per_element = true;
      else if (val == "global")
        cfg.error_per_element = false;
      else
        throw ConfigError("error.mode must be 'per-element' or 'global'");
    } else if (key == "output.vtk") {
      cfg.output_vtk = val;
    } else if (key == "output.csv") {
      cfg.output_csv = val;
    } else if (key == "output.dft.frequency") {
      cfg.dft_frequency = to_double(key, val);
    } else if (key == "output.dft.vtk") {
      cfg.dft_vtk = val;
    } else if (key == "output.snapshot_every") {
      cfg.snapshot_every = to_int(key, val);
    } else if (key == "budget.trace_dofs") {
      cfg.budget_trace_dofs = to_int(key, val);
    } else {
      throw ConfigError("unknown config key: " + key);
    }
  }
  if (cfg.materials.empty()) cfg.materials[1] = Material{};
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "formulation = "
      << (cfg.formulation == Formulation::Mixed ? "mixed" : "efield") << "\n";
  out << "degree = " << cfg.degree << "\n";
  switch (cfg.mesh_kind) {
    case MeshKind::CubeHex: out << "mesh.kind = cube-hex\n"; break;
    case MeshKind::CubeTet: out << "mesh.kind = cube-tet\n"; break;
    case MeshKind::BallTet: out << "mesh.kind = ball-tet\n"; break;
    case MeshKind::File: out << "mesh.kind = file\n"; break;
  }
  out << "mesh.n = " << cfg.mesh_n << "\n";
  if (cfg.mesh_jitter != 0.0)
    out << "mesh.jitter = " << fmt(cfg.mesh_jitter) << "\n";
  if (cfg.mesh_kind == MeshKind::BallTet) {
    out << "mesh.radius = " << fmt(cfg.mesh_radius) << "\n";
    if (cfg.mesh_inner_radius != 0.0)
      out << "mesh.inner_radius = " << fmt(cfg.mesh_inner_radius) << "\n";
  }
  if (!cfg.mesh_path.empty()) out << "mesh.path = " << cfg.mesh_path << "\n";
  for (const auto& [region, m] : cfg.materials) {
    out << "material." << region << ".epsilon = " << fmt(m.epsilon) << "\n";
    out << "material." << region << ".mu = " << fmt(m.mu) << "\n";
    out << "material." << region << ".sigma = " << fmt(m.sigma(0, 0)) << "\n";
  }
  out << "tau.mode = " << (cfg.tau_impedance ? "impedance" : "constant")
      << "\n";
  out << "tau.value = " << fmt(cfg.tau_value) << "\n";
  out << "source = "
      << (cfg.source == SourceKind::None ? "none" : "manufactured") << "\n";
  out << "init = "
      << (cfg.init == InitKind::Zero
              ? "zero"
              : cfg.init == InitKind::Cavity ? "cavity" : "planewave")
      << "\n";
  out << "bc.dirichlet = " << (cfg.dirichlet_exact ? "exact" : "zero") << "\n";
  out << "wave.frequency = " << fmt(cfg.wave_frequency) << "\n";
  out << "dt = " << fmt(cfg.dt) << "\n";
  out << "t_max = " << fmt(cfg.t_max) << "\n";
  out << "error.reference = "
      << (cfg.reference == ReferenceKind::None
              ? "none"
              : cfg.reference == ReferenceKind::Cavity ? "cavity"
                                                       : "planewave")
      << "\n";
  out << "error.mode = " << (cfg.error_per_element ? "per-element" : "global")
      << "\n";
  if (!cfg.output_vtk.empty()) out << "output.vtk = " << cfg.output_vtk << "\n";
  if (!cfg.output_csv.empty()) out << "output.csv = " << cfg.output_csv << "\n";
  if (cfg.dft_frequency)
    out << "output.dft.frequency = " << fmt(*cfg.dft_frequency) << "\n";
  if (!cfg.dft_vtk.empty()) out << "output.dft.vtk = " << cfg.dft_vtk << "\n";
  out << "output.snapshot_every = " << cfg.snapshot_every << "\n";
  out << "budget.trace_dofs = " << cfg.budget_trace_dofs << "\n";
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  if (cfg.degree < 1 || cfg.degree > 2)
    throw ConfigError("degree: supported polynomial degrees are 1 and 2");
  if (!(cfg.dt > 0.0)) throw ConfigError("dt: must be positive");
  if (!(cfg.t_max > 0.0)) throw ConfigError("t_max: must be positive");
  double steps = cfg.t_max / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-8 * steps)
    throw ConfigError("t_max: must be an integer multiple of dt");
  if (cfg.mesh_kind != MeshKind::File && cfg.mesh_n < 1)
    throw ConfigError("mesh.n: must be >= 1");
  if (cfg.mesh_kind == MeshKind::File && cfg.mesh_path.empty())
    throw ConfigError("mesh.path: required for mesh.kind = file");
  if (!(cfg.tau_value > 0.0)) throw ConfigError("tau.value: must be positive");
  if (cfg.snapshot_every < 1)
    throw ConfigError("output.snapshot_every: must be >= 1");
  for (const auto& [region, m] : cfg.materials) {
    try {
      m.check();
    } catch (const ConfigError& err) {
      throw ConfigError("material." + std::to_string(region) + ": " +
                        err.what());
    }
  }
  if (cfg.formulation == Formulation::EField) {
    if (cfg.mesh_kind == MeshKind::BallTet)
      throw ConfigError(
          "formulation: the e-field system supports PEC boundaries only "
          "(ball meshes carry absorbing boundaries)");
    for (const auto& [region, m] : cfg.materials)
      if (m.sigma.norm() == 0.0)
        throw ConfigError("material." + std::to_string(region) +
                          ".sigma: the e-field system needs sigma > 0");
  }
}

}  // namespace hdgem
