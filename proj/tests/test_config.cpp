#include <doctest.h>

#include "hdgem/config.hpp"

using namespace hdgem;

TEST_SUITE("config") {

TEST_CASE("parsing, comments and defaults") {
  RunConfig cfg = parse_config(
      "# cavity study\n"
      "formulation = efield\n"
      "degree = 2   # quadratic\n"
      "mesh.kind = cube-tet\n"
      "mesh.n = 10\n"
      "mesh.jitter = 0.2\n"
      "material.1.epsilon = 1.5\n"
      "material.1.sigma = 1.429\n"
      "dt = 0.01\n"
      "t_max = 0.1\n");
  CHECK(cfg.formulation == Formulation::EField);
  CHECK(cfg.degree == 2);
  CHECK(cfg.mesh_kind == MeshKind::CubeTet);
  CHECK(cfg.mesh_n == 10);
  CHECK(cfg.mesh_jitter == 0.2);
  CHECK(cfg.materials.at(1).epsilon == 1.5);
  CHECK(cfg.materials.at(1).mu == 1.0);  // default
  CHECK(cfg.materials.at(1).sigma(0, 0) == 1.429);
  CHECK(cfg.materials.at(1).sigma(0, 1) == 0.0);
  CHECK(cfg.tau_impedance);        // default
  CHECK(cfg.dirichlet_exact);      // default
  CHECK(!cfg.error_per_element);   // default: global ratio
  CHECK(!cfg.dft_frequency.has_value());
  CHECK_NOTHROW(validate_config(cfg));

  // empty text yields a default vacuum material
  RunConfig empty = parse_config("");
  CHECK(empty.materials.size() == 1);
  CHECK(empty.materials.at(1).epsilon == 1.0);
}

TEST_CASE("serialize/parse round trip") {
  RunConfig cfg = parse_config(
      "formulation = mixed\n"
      "degree = 1\n"
      "mesh.kind = ball-tet\n"
      "mesh.n = 12\n"
      "mesh.radius = 1.5\n"
      "mesh.inner_radius = 0.5\n"
      "material.1.epsilon = 1\n"
      "material.2.epsilon = 2\n"
      "init = planewave\n"
      "wave.frequency = 3e8\n"
      "dt = 2e-11\n"
      "t_max = 1e-8\n"
      "output.dft.frequency = 3e8\n"
      "output.dft.vtk = dft.vtk\n"
      "budget.trace_dofs = 123456\n");
  RunConfig back = parse_config(serialize_config(cfg));
  CHECK(serialize_config(back) == serialize_config(cfg));
  CHECK(back.mesh_radius == 1.5);
  CHECK(back.mesh_inner_radius == 0.5);
  CHECK(back.materials.size() == 2);
  CHECK(back.dft_frequency.value() == 3e8);
  CHECK(back.budget_trace_dofs == 123456);
}

TEST_CASE("malformed input is rejected with the offending key") {
  CHECK_THROWS_AS(parse_config("no equals sign here"), ConfigError);
  CHECK_THROWS_AS(parse_config("nonsense.key = 1"), ConfigError);
  CHECK_THROWS_AS(parse_config("degree = two"), ConfigError);
  CHECK_THROWS_AS(parse_config("dt = 1e-4x"), ConfigError);
  CHECK_THROWS_AS(parse_config("formulation = hybrid"), ConfigError);
  CHECK_THROWS_AS(parse_config("mesh.kind = sphere"), ConfigError);
  CHECK_THROWS_AS(parse_config("material.1 = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("material.1.rho = 3"), ConfigError);
  CHECK_THROWS_AS(parse_config("tau.mode = auto"), ConfigError);
  CHECK_THROWS_AS(parse_config("bc.dirichlet = maybe"), ConfigError);
  CHECK_THROWS_AS(parse_config("error.mode = both"), ConfigError);
  CHECK_THROWS_AS(load_config("missing_config_file.cfg"), ParseError);
}

TEST_CASE("validation rejects inconsistent runs") {
  auto base = []() {
    return parse_config("dt = 0.01\nt_max = 0.1\n");
  };
  RunConfig cfg = base();
  cfg.degree = 3;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.dt = -1.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.t_max = 0.015;  // not a multiple of dt
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.tau_value = 0.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.mesh_n = 0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.mesh_kind = MeshKind::File;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);  // no path
  cfg = base();
  cfg.materials[1].epsilon = -2.0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg = base();
  cfg.snapshot_every = 0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  // e-field restrictions: conductivity required, no absorbing meshes
  cfg = base();
  cfg.formulation = Formulation::EField;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.materials[1].set_sigma_scalar(1.0);
  CHECK_NOTHROW(validate_config(cfg));
  cfg.mesh_kind = MeshKind::BallTet;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

}  // TEST_SUITE
