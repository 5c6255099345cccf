#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "hdgem/driver.hpp"
#include "hdgem/gmsh_io.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

std::string with_dir(const std::string& dir, const std::string& path) {
  if (dir.empty() || path.empty() || path.front() == '/') return path;
  return dir + "/" + path;
}

void print_report(const hdgem::ConvergenceReport& rep) {
  std::printf("# %s\n", rep.label.c_str());
  std::printf("%-14s %-16s %s\n", "resolution", "error", "order");
  for (const auto& r : rep.rows) {
    if (std::isnan(r.order))
      std::printf("%-14.6g %-16.8e %s\n", r.resolution, r.error, "-");
    else
      std::printf("%-14.6g %-16.8e %.3f\n", r.resolution, r.error, r.order);
  }
}

std::vector<int> parse_int_list(const std::string& csv) {
  std::vector<int> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  if (out.empty()) throw hdgem::ConfigError("empty resolution list");
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) out.push_back(std::stod(tok));
  if (out.empty()) throw hdgem::ConfigError("empty step list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hdgem: implicit HDG time-domain Maxwell solver"};
  app.require_subcommand(1);

  std::string config_path, output_dir, mesh_arg, list_arg;
  bool override_budget = false;
  int threads = 1;

  auto add_common = [&](CLI::App* cmd, bool need_config) {
    auto* opt = cmd->add_option("--config", config_path, "run config file");
    if (need_config) opt->required();
    cmd->add_flag("--override-budget", override_budget,
                  "allow runs beyond the configured trace-dof budget");
    cmd->add_option("--threads", threads, "worker thread count");
    cmd->add_option("--output-dir", output_dir,
                    "directory prefix for output artifacts");
  };

  auto* run = app.add_subcommand("run", "execute one simulation");
  add_common(run, true);
  auto* cspace =
      app.add_subcommand("converge-space", "spatial convergence study");
  add_common(cspace, true);
  cspace->add_option("--resolutions", list_arg, "comma-separated mesh n list")
      ->required();
  auto* ctime =
      app.add_subcommand("converge-time", "temporal convergence study");
  add_common(ctime, true);
  ctime->add_option("--steps", list_arg, "comma-separated dt list")
      ->required();
  auto* dft = app.add_subcommand("dft", "run and export the pointwise DFT");
  add_common(dft, true);
  auto* minfo = app.add_subcommand("mesh-info", "mesh statistics and checks");
  add_common(minfo, false);
  minfo->add_option("--mesh", mesh_arg, "MSH path or cube resolution n")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (minfo->parsed()) {
      hdgem::Mesh mesh;
      if (mesh_arg.find_first_not_of("0123456789") == std::string::npos)
        mesh = hdgem::generate_unit_cube_hex(std::stoi(mesh_arg));
      else
        mesh = hdgem::read_gmsh(mesh_arg);
      hdgem::MeshInfo info = hdgem::mesh_info(mesh);
      std::printf("elements:        %d\n", info.n_elements);
      std::printf("vertices:        %d\n", info.n_vertices);
      std::printf("faces:           %d (interior %d, PEC %d, ABC %d)\n",
                  info.n_faces, info.n_interior_faces, info.n_gamma_d,
                  info.n_gamma_a);
      std::printf("h (min/mean/max): %.6g / %.6g / %.6g\n", info.h_min,
                  info.h_mean, info.h_max);
      hdgem::MeshDiagnostics diag = hdgem::validate(mesh);
      if (!diag.ok()) {
        for (const auto& issue : diag.issues)
          std::fprintf(stderr, "invalid: %s\n", issue.c_str());
        return kExitNumerical;
      }
      std::printf("validation:      ok\n");
      return 0;
    }

    hdgem::RunConfig cfg = hdgem::load_config(config_path);
    if (override_budget) cfg.override_budget = true;
    cfg.output_vtk = with_dir(output_dir, cfg.output_vtk);
    cfg.output_csv = with_dir(output_dir, cfg.output_csv);
    cfg.dft_vtk = with_dir(output_dir, cfg.dft_vtk);
    hdgem::validate_config(cfg);

    if (run->parsed() || dft->parsed()) {
      if (dft->parsed() && !cfg.dft_frequency)
        throw hdgem::ConfigError(
            "dft subcommand needs output.dft.frequency in the config");
      hdgem::RunResult res = hdgem::run_simulation(cfg);
      std::printf("steps:           %d\n", res.n_steps);
      std::printf("trace dofs:      %d\n", res.n_trace_free);
      std::printf("distinct kernels: %zu\n", res.distinct_kernels);
      if (!std::isnan(res.error))
        std::printf("relative L2(E) error: %.8e\n", res.error);
      if (!res.dft_e.empty())
        std::printf("dft samples:     %d\n",
                    res.n_steps / cfg.snapshot_every);
      return 0;
    }

    hdgem::ConvergenceReport rep;
    if (cspace->parsed())
      rep = hdgem::space_study(cfg, parse_int_list(list_arg));
    else
      rep = hdgem::time_study(cfg, parse_double_list(list_arg));
    print_report(rep);
    if (!cfg.output_csv.empty()) hdgem::write_csv(rep, cfg.output_csv);
    return 0;
  } catch (const hdgem::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const hdgem::CapabilityError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const hdgem::ParseError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return kExitIo;
  } catch (const hdgem::SolveError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const hdgem::GeometryError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
