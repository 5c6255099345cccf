#include <doctest.h>

#include <cmath>
#include <random>

#include "hdgem/physics.hpp"

using namespace hdgem;

namespace {

const double kEps111 = std::sqrt(3.0);
const double kH = 1e-6;

Vec3 fd_curl(const std::function<Vec3(const Vec3&)>& f, const Vec3& x) {
  Vec3 c;
  for (int i = 0; i < 3; ++i) {
    int j = (i + 1) % 3, k = (i + 2) % 3;
    Vec3 xp = x, xm = x;
    xp(j) += kH;
    xm(j) -= kH;
    double dj = (f(xp)(k) - f(xm)(k)) / (2 * kH);
    xp = xm = x;
    xp(k) += kH;
    xm(k) -= kH;
    double dk = (f(xp)(j) - f(xm)(j)) / (2 * kH);
    c(i) = dj - dk;
  }
  return c;
}

double fd_div(const std::function<Vec3(const Vec3&)>& f, const Vec3& x) {
  double d = 0;
  for (int i = 0; i < 3; ++i) {
    Vec3 xp = x, xm = x;
    xp(i) += kH;
    xm(i) -= kH;
    d += (f(xp)(i) - f(xm)(i)) / (2 * kH);
  }
  return d;
}

}  // namespace

TEST_SUITE("physics") {

TEST_CASE("cavity mode satisfies the curl equations and is divergence free") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 12; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    double t = u(rng);
    auto efun = [t](const Vec3& p) { return cavity_mode_111(p, t).E; };
    auto hfun = [t](const Vec3& p) { return cavity_mode_111(p, t).H; };
    // time derivatives by centered differences
    Vec3 de = (cavity_mode_111(x, t + kH).E - cavity_mode_111(x, t - kH).E) /
              (2 * kH);
    Vec3 dh = (cavity_mode_111(x, t + kH).H - cavity_mode_111(x, t - kH).H) /
              (2 * kH);
    // eps dE/dt = curl H, mu dH/dt = -curl E with eps = mu = sqrt(3)
    CHECK((kEps111 * de - fd_curl(hfun, x)).norm() < 2e-7);
    CHECK((kEps111 * dh + fd_curl(efun, x)).norm() < 2e-7);
    CHECK(std::abs(fd_div(efun, x)) < 2e-7);
    CHECK(std::abs(fd_div(hfun, x)) < 2e-7);
  }
}

TEST_CASE("cavity mode boundary trace matches its closed form on the walls") {
  // tangential E is generally nonzero on the boundary, but n.E and n x H
  // vanish (the mode is a magnetic-wall mode)
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int wall = 0; wall < 6; ++wall) {
    int axis = wall / 2;
    double val = (wall % 2) ? 1.0 : 0.0;
    Vec3 n = Vec3::Zero();
    n(axis) = (wall % 2) ? 1.0 : -1.0;
    for (int trial = 0; trial < 6; ++trial) {
      Vec3 x(u(rng), u(rng), u(rng));
      x(axis) = val;
      EHField f = cavity_mode_111(x, 0.37);
      CHECK(std::abs(n.dot(f.E)) < 1e-13);
      CHECK(f.H.cross(n).norm() < 1e-13);
    }
  }
}

TEST_CASE("cavity mode has unit period frequency") {
  // f = 1/2 Hz for the (1,1,1) unit-cube mode with eps = mu = sqrt(3)
  CHECK(resonant_frequency(1, 1, 1, 1, 1, 1, kEps111, kEps111) ==
        doctest::Approx(0.5).epsilon(1e-13));
  // a vacuum rectangular cavity cross-check
  double f = resonant_frequency(2, 1, 3, 0.4, 0.3, 0.5, 1.0, 1.0);
  double want = 0.5 * std::sqrt(25.0 + 100.0 / 9.0 + 36.0);
  CHECK(f == doctest::Approx(want).epsilon(1e-13));
  CHECK_THROWS_AS(resonant_frequency(0, 0, 0, 1, 1, 1, 1, 1), ConfigError);
}

TEST_CASE("plane wave satisfies the curl equations") {
  // unit-scale parameters so the shared finite-difference step resolves the
  // wavelength; the closed form is frequency-agnostic
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double f = 0.4, eps = 2.3, mu = 1.7;
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    double t = 1 + u(rng);
    auto efun = [&](const Vec3& p) { return plane_wave(p, t, f, eps, mu).E; };
    auto hfun = [&](const Vec3& p) { return plane_wave(p, t, f, eps, mu).H; };
    double ht = 1e-6;
    Vec3 de = (plane_wave(x, t + ht, f, eps, mu).E -
               plane_wave(x, t - ht, f, eps, mu).E) /
              (2 * ht);
    Vec3 dh = (plane_wave(x, t + ht, f, eps, mu).H -
               plane_wave(x, t - ht, f, eps, mu).H) /
              (2 * ht);
    double scale = 2 * M_PI * f * std::sqrt(eps * mu);
    CHECK((eps * de - fd_curl(hfun, x)).norm() < 1e-4 * scale);
    CHECK((mu * dh + fd_curl(efun, x)).norm() < 1e-4 * scale);
  }
}

TEST_CASE("absorbing-boundary incident datum is tangential") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    EHField f;
    f.E = Vec3(u(rng), u(rng), u(rng));
    f.H = Vec3(u(rng), u(rng), u(rng));
    Vec3 n = Vec3(u(rng), u(rng), u(rng)).normalized();
    Vec3 g = abc_incident_data(f, n, 3.0, 2.0);
    CHECK(std::abs(g.dot(n)) < 1e-13);
    // H x n + sqrt(eps/mu) (E x n) x n expanded by hand
    Vec3 want = f.H.cross(n) +
                std::sqrt(1.5) * (f.E - f.E.dot(n) * n) * -1.0;
    CHECK((g - want).norm() < 1e-12);
  }
}

TEST_CASE("manufactured source cancels the conduction term") {
  Mat3 sigma = 1.429 * Mat3::Identity();
  SourceTerm src = manufactured_cavity_source(sigma);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 10; ++trial) {
    Vec3 x(u(rng), u(rng), u(rng));
    double t = u(rng);
    Vec3 e = cavity_mode_111(x, t).E;
    CHECK((src.value(x, t) + sigma * e).norm() < 1e-13);
    // analytic time derivative vs finite differences
    Vec3 fd = (src.value(x, t + kH) - src.value(x, t - kH)) / (2 * kH);
    CHECK((src.time_derivative(x, t) - fd).norm() < 2e-7);
  }
}

TEST_CASE("material validation") {
  Material m;
  m.epsilon = 0.0;
  CHECK_THROWS_AS(m.check(), ConfigError);
  m.epsilon = 1.0;
  m.mu = -2.0;
  CHECK_THROWS_AS(m.check(), ConfigError);
  m.mu = 1.0;
  m.sigma << 0, 1, 0, -1, 0, 0, 0, 0, 0;  // antisymmetric
  CHECK_THROWS_AS(m.check(), ConfigError);
  m.sigma = -Mat3::Identity();
  CHECK_THROWS_AS(m.check(), ConfigError);
  m.set_sigma_scalar(1.429);
  CHECK_NOTHROW(m.check());
  CHECK(m.impedance_coeff() == doctest::Approx(1.0));
  MaterialMap mats;
  mats[1] = m;
  CHECK_THROWS_AS(material_for(mats, 2), ConfigError);
}

}  // TEST_SUITE
