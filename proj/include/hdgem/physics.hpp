#pragma once

#include <functional>
#include <map>

#include "hdgem/types.hpp"

namespace hdgem {

/// Per-region material data. Conductivity is stored as a full symmetric
/// tensor; scalar input is promoted to sigma*I.
struct Material {
  double epsilon = 1.0;  // F/m
  double mu = 1.0;       // H/m
  Mat3 sigma = Mat3::Zero();

  void set_sigma_scalar(double s) { sigma = s * Mat3::Identity(); }
  /// eps > 0, mu > 0, sigma symmetric positive semidefinite.
  void check() const;
  double impedance_coeff() const { return std::sqrt(epsilon / mu); }
};

using MaterialMap = std::map<int, Material>;  // region id -> material

const Material& material_for(const MaterialMap& mats, int region);

struct EHField {
  Vec3 E = Vec3::Zero();
  Vec3 H = Vec3::Zero();
};

/// Resonant frequency of box mode (m,n,p): f = (1/(2 sqrt(mu eps))) *
/// sqrt((m/a)^2 + (n/b)^2 + (p/d)^2).
double resonant_frequency(int m, int n, int p, double a, double b, double d,
                          double epsilon, double mu);

/// Closed-form (1,1,1) cavity mode of the unit cube with eps = mu = sqrt(3);
/// period 2 s.
EHField cavity_mode_111(const Vec3& x, double t);

/// Plane wave travelling in +y, E polarized along z:
/// E_z = cos(sqrt(eps mu) w y - w t), H_x = sqrt(eps/mu) E_z, w = 2 pi f.
EHField plane_wave(const Vec3& x, double t, double f, double epsilon, double mu);

/// Silver-Mueller incident datum g = H x n + sqrt(eps/mu) (E x n) x n.
Vec3 abc_incident_data(const EHField& inc, const Vec3& n, double epsilon,
                       double mu);

/// Time-dependent volume current source with analytic time derivative.
struct SourceTerm {
  std::function<Vec3(const Vec3&, double)> value;
  std::function<Vec3(const Vec3&, double)> time_derivative;

  bool empty() const { return !value; }
};

/// i_s = -sigma E^a with E^a the cavity mode; makes the cavity mode an exact
/// solution of the conductive mixed system.
SourceTerm manufactured_cavity_source(const Mat3& sigma);

}  // namespace hdgem
