#include "hdgem/physics.hpp"

#include <cmath>

namespace hdgem {

void Material::check() const {
  if (!(epsilon > 0.0)) throw ConfigError("material: epsilon must be > 0");
  if (!(mu > 0.0)) throw ConfigError("material: mu must be > 0");
  if ((sigma - sigma.transpose()).norm() > 1e-12 * (1.0 + sigma.norm()))
    throw ConfigError("material: sigma must be symmetric");
  Eigen::SelfAdjointEigenSolver<Mat3> es(sigma);
  if (es.eigenvalues()(0) < -1e-12 * (1.0 + sigma.norm()))
    throw ConfigError("material: sigma must be positive semidefinite");
}

const Material& material_for(const MaterialMap& mats, int region) {
  auto it = mats.find(region);
  if (it == mats.end())
    throw ConfigError("no material defined for region " + std::to_string(region));
  return it->second;
}

double resonant_frequency(int m, int n, int p, double a, double b, double d,
                          double epsilon, double mu) {
  if (m == 0 && n == 0 && p == 0)
    throw ConfigError("mode (0,0,0) is not a resonant mode");
  if (!(a > 0 && b > 0 && d > 0))
    throw ConfigError("cavity dimensions must be positive");
  double s = (double(m) / a) * (double(m) / a) +
             (double(n) / b) * (double(n) / b) +
             (double(p) / d) * (double(p) / d);
  return std::sqrt(s) / (2.0 * std::sqrt(mu * epsilon));
}

EHField cavity_mode_111(const Vec3& x, double t) {
  const double pi = M_PI;
  const double cx = std::cos(pi * x.x()), sx = std::sin(pi * x.x());
  const double cy = std::cos(pi * x.y()), sy = std::sin(pi * x.y());
  const double cz = std::cos(pi * x.z()), sz = std::sin(pi * x.z());
  const double ct = std::cos(pi * t), st = std::sin(pi * t);
  const double r3 = std::sqrt(3.0);
  EHField f;
  f.E = Vec3(-sx * cy * cz, 2.0 * cx * sy * cz, -cx * cy * sz) * ct;
  f.H = Vec3(-r3 * cx * sy * sz, 0.0, r3 * sx * sy * cz) * st;
  return f;
}

EHField plane_wave(const Vec3& x, double t, double f, double epsilon, double mu) {
  const double w = 2.0 * M_PI * f;
  const double phase = std::sqrt(epsilon * mu) * w * x.y() - w * t;
  const double c = std::cos(phase);
  EHField out;
  out.E = Vec3(0.0, 0.0, c);
  out.H = Vec3(std::sqrt(epsilon / mu) * c, 0.0, 0.0);
  return out;
}

Vec3 abc_incident_data(const EHField& inc, const Vec3& n, double epsilon,
                       double mu) {
  return inc.H.cross(n) + std::sqrt(epsilon / mu) * (inc.E.cross(n)).cross(n);
}

SourceTerm manufactured_cavity_source(const Mat3& sigma) {
  SourceTerm s;
  s.value = [sigma](const Vec3& x, double t) -> Vec3 {
    return -(sigma * cavity_mode_111(x, t).E);
  };
  s.time_derivative = [sigma](const Vec3& x, double t) -> Vec3 {
    Vec3 spatial = cavity_mode_111(x, 0.0).E;  // cos(pi t) factor split off
    return (sigma * spatial) * (M_PI * std::sin(M_PI * t));
  };
  return s;
}

}  // namespace hdgem
