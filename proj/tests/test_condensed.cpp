#include <doctest.h>

#include <random>

#include "hdgem/condensed.hpp"

using namespace hdgem;

namespace {

Mat3 random_spd(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Mat3 a;
  a << u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng);
  return a.transpose() * a + 0.2 * Mat3::Identity();
}

struct DenseOracle {
  Eigen::VectorXd x_new;     // stacked interior
  Eigen::VectorXd lam_full;  // full trace vector
};

/// Monolithic backward-Euler step: every interior dof and every free trace
/// dof in one dense solve, no condensation. Independent of the Schur-path
/// code except for the element operator blocks themselves.
DenseOracle monolithic_step(const Mesh& mesh, const DofMap& dm,
                            const CondensedSystem& sys,
                            const ProblemSetup& setup,
                            const std::vector<Eigen::VectorXd>& x_old,
                            double t_new) {
  std::vector<int> xoff(mesh.n_elements() + 1, 0);
  for (int e = 0; e < mesh.n_elements(); ++e)
    xoff[e + 1] = xoff[e] + sys.kernel(e).nint;
  const int nx = xoff.back();
  const int nfree = dm.n_trace_free;
  const int n = nx + nfree;

  // constrained trace values at the new time level
  Eigen::VectorXd lam_c = Eigen::VectorXd::Zero(dm.n_trace_full);
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!dm.face_constrained[f]) continue;
    if (setup.dirichlet)
      lam_c.segment(dm.face_offset[f], dm.face_ndof(f)) = project_trace(
          mesh, f, setup.degree,
          [&](const Vec3& x) { return setup.dirichlet(x, t_new); });
  }

  Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const ElementKernel& ker = sys.kernel(e);
    mat.block(xoff[e], xoff[e], ker.nint, ker.nint) =
        ker.att / setup.dt + ker.stiff;
    rhs.segment(xoff[e], ker.nint) = ker.att * x_old[e] / setup.dt;
    if (!setup.source.empty())
      rhs.segment(xoff[e], ker.nint) +=
          assemble_source(ker, volume_quad_points(mesh, e, ker), setup.source,
                          t_new);
    const auto& ef = mesh.element_faces[e];
    for (size_t lf = 0; lf < ef.size(); ++lf) {
      int f = ef[lf];
      for (int k = 0; k < dm.face_ndof(f); ++k) {
        int lcol = ker.face_offsets[lf] + k;
        int gfull = dm.face_offset[f] + k;
        int gfree = dm.full_to_free[gfull];
        if (gfree >= 0) {
          mat.block(xoff[e], nx + gfree, ker.nint, 1) +=
              ker.coupling.col(lcol);
          mat.block(nx + gfree, xoff[e], 1, ker.nint) += ker.rmat.row(lcol);
          for (int k2 = 0; k2 < dm.face_ndof(f); ++k2) {
            int g2 = dm.full_to_free[dm.face_offset[f] + k2];
            // lmat is face-block-diagonal, so only same-face terms exist
            if (g2 >= 0)
              mat(nx + gfree, nx + g2) +=
                  ker.lmat(lcol, ker.face_offsets[lf] + k2);
            else
              rhs(nx + gfree) -= ker.lmat(lcol, ker.face_offsets[lf] + k2) *
                                 lam_c(dm.face_offset[f] + k2);
          }
        } else {
          rhs.segment(xoff[e], ker.nint) -=
              ker.coupling.col(lcol) * lam_c(gfull);
        }
      }
    }
  }

  DenseOracle out;
  Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(mat).solve(rhs);
  out.x_new = sol.head(nx);
  out.lam_full = lam_c;
  for (int i = 0; i < dm.n_trace_full; ++i)
    if (dm.full_to_free[i] >= 0) out.lam_full(i) = sol(nx + dm.full_to_free[i]);
  return out;
}

}  // namespace

TEST_SUITE("condensed") {

TEST_CASE("condensed step equals the monolithic dense solve") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> upos(0.5, 3.0);
  int cases = 0;
  for (int trial = 0; trial < 6; ++trial) {
    Mesh mesh = (trial % 2 == 0) ? generate_unit_cube_hex(1 + trial / 2)
                                 : generate_unit_cube_tet(1, 0.12);
    for (Formulation form : {Formulation::Mixed, Formulation::EField})
      for (double tau : {0.1, 1.0, 10.0}) {
        ProblemSetup setup;
        setup.form = form;
        setup.degree = 1 + (trial % 2);
        setup.materials[1].epsilon = upos(rng);
        setup.materials[1].mu = upos(rng);
        setup.materials[1].sigma = random_spd(rng);
        setup.face_tau = compute_face_tau(mesh, setup.materials, false, tau);
        setup.dt = 0.05;
        if (trial % 2 == 0)  // alternate homogeneous / driven walls
          setup.dirichlet = [](const Vec3& x, double t) {
            return Vec3(x.y() + t, x.z(), -x.x());
          };
        DofMap dm = build_dofmap(mesh, setup.degree);
        CondensedSystem sys(mesh, dm, setup);
        FieldState st;
        st.t = 0.0;
        st.interior.resize(mesh.n_elements());
        for (int e = 0; e < mesh.n_elements(); ++e) {
          st.interior[e].resize(sys.kernel(e).nint);
          for (int i = 0; i < st.interior[e].size(); ++i)
            st.interior[e](i) = u(rng);
        }
        st.lambda = Eigen::VectorXd::Zero(dm.n_trace_full);
        std::vector<Eigen::VectorXd> x_old = st.interior;

        DenseOracle oracle =
            monolithic_step(mesh, dm, sys, setup, x_old, setup.dt);
        sys.advance(st);

        double scale = 1.0 + oracle.x_new.cwiseAbs().maxCoeff();
        int off = 0;
        for (int e = 0; e < mesh.n_elements(); ++e) {
          CHECK((st.interior[e] -
                 oracle.x_new.segment(off, st.interior[e].size()))
                    .cwiseAbs()
                    .maxCoeff() < 1e-10 * scale);
          off += (int)st.interior[e].size();
        }
        CHECK((st.lambda - oracle.lam_full).cwiseAbs().maxCoeff() <
              1e-10 * scale);
        ++cases;
      }
  }
  CHECK(cases == 36);
}

TEST_CASE("linear-in-space, linear-in-time fields are advanced exactly") {
  // E(x) = (z, x, y), H(t) = H0 - (t/mu)(1,1,1) solves the curl system with
  // sigma = 0; backward Euler and the p1 space carry it without error
  const double mu = 2.0, eps = 3.0, dt = 0.1;
  const Vec3 h0(0.3, -0.2, 0.5);
  auto efun = [](const Vec3& x) { return Vec3(x.z(), x.x(), x.y()); };
  for (int n : {1, 2}) {
    Mesh mesh = generate_unit_cube_hex(n);
    ProblemSetup setup;
    setup.form = Formulation::Mixed;
    setup.degree = 1;
    setup.materials[1].epsilon = eps;
    setup.materials[1].mu = mu;
    setup.face_tau = compute_face_tau(mesh, setup.materials, false, 1.0);
    setup.dt = dt;
    setup.dirichlet = [&](const Vec3& x, double) { return efun(x); };
    DofMap dm = build_dofmap(mesh, 1);
    CondensedSystem sys(mesh, dm, setup);
    FieldState st = sys.initial_state(
        [&](const Vec3& x) { return EHField{efun(x), h0}; });
    for (int step = 0; step < 3; ++step) sys.advance(st);
    for (int e = 0; e < mesh.n_elements(); ++e) {
      Eigen::VectorXd he = project_volume(mesh, e, 1, [&](const Vec3&) {
        return Vec3(h0 - (st.t / mu) * Vec3(1, 1, 1));
      });
      Eigen::VectorXd ee = project_volume(mesh, e, 1, efun);
      int nv = (int)he.size();
      CHECK((st.interior[e].head(nv) - he).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((st.interior[e].tail(nv) - ee).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK(sys.trace_mismatch(st) < 1e-12);
  }
}

TEST_CASE("discrete energy dissipates in a closed cavity") {
  Mesh mesh = generate_unit_cube_hex(3);
  for (double sig : {0.0, 1.429}) {
    ProblemSetup setup;
    setup.form = Formulation::Mixed;
    setup.degree = 1;
    setup.materials[1].epsilon = std::sqrt(3.0);
    setup.materials[1].mu = std::sqrt(3.0);
    setup.materials[1].set_sigma_scalar(sig);
    setup.face_tau = compute_face_tau(mesh, setup.materials, true, 1.0);
    setup.dt = 0.01;
    DofMap dm = build_dofmap(mesh, 1);
    CondensedSystem sys(mesh, dm, setup);
    FieldState st = sys.initial_state(
        [](const Vec3& x) { return cavity_mode_111(x, 0.0); });
    double prev = sys.energy(st);
    CHECK(prev > 0.0);
    for (int step = 0; step < 20; ++step) {
      sys.advance(st);
      double en = sys.energy(st);
      if (sig > 0.0)
        CHECK(en < prev);
      else
        CHECK(en <= prev * (1.0 + 1e-14));
      prev = en;
    }
  }
}

TEST_CASE("zero field is a fixed point") {
  Mesh mesh = generate_unit_cube_tet(2);
  ProblemSetup setup;
  setup.form = Formulation::EField;
  setup.degree = 1;
  setup.materials[1].epsilon = 1.0;
  setup.materials[1].mu = 1.0;
  setup.materials[1].set_sigma_scalar(0.7);
  setup.face_tau = compute_face_tau(mesh, setup.materials, true, 1.0);
  setup.dt = 0.1;
  DofMap dm = build_dofmap(mesh, 1);
  CondensedSystem sys(mesh, dm, setup);
  FieldState st = sys.initial_state([](const Vec3&) { return EHField{}; });
  for (int step = 0; step < 3; ++step) sys.advance(st);
  for (int e = 0; e < mesh.n_elements(); ++e)
    CHECK(st.interior[e].cwiseAbs().maxCoeff() == 0.0);
  CHECK(st.lambda.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("e-field stepper requires positive-definite conductivity") {
  Mesh mesh = generate_unit_cube_hex(1);
  ProblemSetup setup;
  setup.form = Formulation::EField;
  setup.degree = 1;
  setup.materials[1].epsilon = 1.0;
  setup.materials[1].mu = 1.0;  // sigma left at zero
  setup.face_tau = compute_face_tau(mesh, setup.materials, true, 1.0);
  setup.dt = 0.1;
  DofMap dm = build_dofmap(mesh, 1);
  CHECK_THROWS_AS(CondensedSystem(mesh, dm, setup), SolveError);
}

TEST_CASE("stepping is bitwise deterministic") {
  auto run = []() {
    Mesh mesh = generate_unit_cube_tet(2, 0.1);
    ProblemSetup setup;
    setup.form = Formulation::Mixed;
    setup.degree = 2;
    setup.materials[1].epsilon = std::sqrt(3.0);
    setup.materials[1].mu = std::sqrt(3.0);
    setup.face_tau = compute_face_tau(mesh, setup.materials, true, 1.0);
    setup.dt = 0.01;
    setup.dirichlet = [](const Vec3& x, double t) {
      return cavity_mode_111(x, t).E;
    };
    DofMap dm = build_dofmap(mesh, 2);
    CondensedSystem sys(mesh, dm, setup);
    FieldState st = sys.initial_state(
        [](const Vec3& x) { return cavity_mode_111(x, 0.0); });
    for (int step = 0; step < 3; ++step) sys.advance(st);
    return st;
  };
  FieldState a = run(), b = run();
  CHECK((a.lambda - b.lambda).cwiseAbs().maxCoeff() == 0.0);
  for (size_t e = 0; e < a.interior.size(); ++e)
    CHECK((a.interior[e] - b.interior[e]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("step-halving converges to first order in time") {
  // Richardson-style: cavity errors at fixed final time for dt and dt/2
  Mesh mesh = generate_unit_cube_hex(3);
  auto solve_err = [&](double dt) {
    ProblemSetup setup;
    setup.form = Formulation::Mixed;
    setup.degree = 2;
    setup.materials[1].epsilon = std::sqrt(3.0);
    setup.materials[1].mu = std::sqrt(3.0);
    setup.face_tau = compute_face_tau(mesh, setup.materials, true, 1.0);
    setup.dt = dt;
    setup.dirichlet = [](const Vec3& x, double t) {
      return cavity_mode_111(x, t).E;
    };
    DofMap dm = build_dofmap(mesh, 2);
    CondensedSystem sys(mesh, dm, setup);
    FieldState st = sys.initial_state(
        [](const Vec3& x) { return cavity_mode_111(x, 0.0); });
    int nsteps = (int)std::llround(0.2 / dt);
    for (int step = 0; step < nsteps; ++step) sys.advance(st);
    // E-block coefficient error against the projected exact field
    double err = 0.0;
    for (int e = 0; e < mesh.n_elements(); ++e) {
      Eigen::VectorXd exact = project_volume(mesh, e, 2, [&](const Vec3& x) {
        return cavity_mode_111(x, st.t).E;
      });
      int nv = (int)exact.size();
      err = std::max(err,
                     (st.interior[e].tail(nv) - exact).cwiseAbs().maxCoeff());
    }
    return err;
  };
  double e1 = solve_err(0.02), e2 = solve_err(0.01);
  double rate = std::log2(e1 / e2);
  CHECK(rate > 0.75);
  CHECK(rate < 1.25);
}

}  // TEST_SUITE
