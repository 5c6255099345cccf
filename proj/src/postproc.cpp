#include "hdgem/postproc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "hdgem/basis.hpp"
#include "hdgem/quadrature.hpp"

namespace hdgem {

double relative_l2_error(const Mesh& mesh, int degree,
                         const std::function<Eigen::VectorXd(int)>& coeffs,
                         const std::function<Vec3(const Vec3&)>& exact,
                         ErrorMode mode) {
  double ratio_sum = 0.0, num_sum = 0.0, den_sum = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const ReferenceBasis& basis = make_basis(el.kind, degree);
    const QuadratureRule& rule = make_quadrature(el.kind, 2 * degree + 2);
    auto verts = mesh.element_coords(e);
    Eigen::VectorXd c = coeffs(e);
    double num = 0.0, den = 0.0;
    for (int q = 0; q < rule.size(); ++q) {
      MapResult m = map_physical(el.kind, verts, rule.points[q]);
      double w = rule.weights[q] * m.det;
      Eigen::VectorXd phi = basis.shape(rule.points[q]);
      Vec3 val = Vec3::Zero();
      for (int a = 0; a < basis.size(); ++a)
        for (int d = 0; d < 3; ++d) val(d) += phi(a) * c(3 * a + d);
      Vec3 ref = exact(m.x);
      num += w * (val - ref).squaredNorm();
      den += w * ref.squaredNorm();
    }
    if (mode == ErrorMode::PerElementRatio) {
      if (!(den > 0.0))
        throw SolveError("relative error: reference field vanishes on element " +
                         std::to_string(e));
      ratio_sum += num / den;
    } else {
      num_sum += num;
      den_sum += den;
    }
  }
  if (mode == ErrorMode::PerElementRatio) return std::sqrt(ratio_sum);
  if (!(den_sum > 0.0))
    throw SolveError("relative error: reference field vanishes globally");
  return std::sqrt(num_sum / den_sum);
}

double field_l2(const Mesh& mesh, int degree,
                const std::function<Eigen::VectorXd(int)>& coeffs,
                int region) {
  double acc = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    if (region >= 0 && el.region != region) continue;
    const ReferenceBasis& basis = make_basis(el.kind, degree);
    const QuadratureRule& rule = make_quadrature(el.kind, 2 * degree + 2);
    auto verts = mesh.element_coords(e);
    Eigen::VectorXd c = coeffs(e);
    for (int q = 0; q < rule.size(); ++q) {
      MapResult m = map_physical(el.kind, verts, rule.points[q]);
      double w = rule.weights[q] * m.det;
      Eigen::VectorXd phi = basis.shape(rule.points[q]);
      Vec3 val = Vec3::Zero();
      for (int a = 0; a < basis.size(); ++a)
        for (int d = 0; d < 3; ++d) val(d) += phi(a) * c(3 * a + d);
      acc += w * val.squaredNorm();
    }
  }
  return std::sqrt(acc);
}

ConvergenceReport convergence_order(const std::vector<double>& errors,
                                    const std::vector<double>& resolutions) {
  if (errors.size() != resolutions.size() || errors.size() < 2)
    throw ConfigError("convergence study needs at least two matching rows");
  ConvergenceReport rep;
  for (size_t k = 0; k < errors.size(); ++k) {
    if (k > 0 && !(resolutions[k] > resolutions[k - 1]))
      throw ConfigError("convergence study resolutions must increase");
    ConvergenceRow row;
    row.resolution = resolutions[k];
    row.error = errors[k];
    row.order = (k == 0) ? std::numeric_limits<double>::quiet_NaN()
                         : std::log(errors[k - 1] / errors[k]) /
                               std::log(resolutions[k] / resolutions[k - 1]);
    rep.rows.push_back(row);
  }
  return rep;
}

void write_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << "resolution,error,order\n";
  char buf[96];
  for (const auto& r : report.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", r.resolution, r.error);
    out << buf;
    if (std::isnan(r.order))
      out << "\n";
    else {
      std::snprintf(buf, sizeof buf, "%.17g\n", r.order);
      out << buf;
    }
  }
}

void PointwiseDft::add_sample(double t,
                              const std::vector<Eigen::VectorXd>& sample) {
  if (n_ == 0) {
    t0_ = t;
    acc_.resize(sample.size());
    for (size_t i = 0; i < sample.size(); ++i)
      acc_[i] = Eigen::VectorXcd::Zero(sample[i].size());
  } else if (n_ == 1) {
    spacing_ = t - t0_;
    if (!(spacing_ > 0.0))
      throw ConfigError("transform samples must advance in time");
  } else {
    double d = t - t_prev_;
    if (std::abs(d - spacing_) > 1e-9 * std::max(1.0, std::abs(spacing_)))
      throw ConfigError("transform samples must be uniformly spaced");
  }
  std::complex<double> ph =
      std::exp(std::complex<double>(0.0, -2.0 * M_PI * frequency_ * t));
  for (size_t i = 0; i < sample.size(); ++i) acc_[i] += ph * sample[i];
  t_prev_ = t;
  ++n_;
}

std::vector<Eigen::VectorXcd> PointwiseDft::result() const {
  if (n_ == 0) throw ConfigError("transform has no samples");
  std::vector<Eigen::VectorXcd> out = acc_;
  for (auto& v : out) v /= double(n_);
  return out;
}

namespace {

// VTK vertex order from our tensor (hex) / gmsh (tet) storage order
const int kVtkHex[8] = {0, 1, 3, 2, 4, 5, 7, 6};

void vertex_average(const Mesh& mesh, int degree,
                    const std::function<Eigen::VectorXd(int)>& coeffs,
                    std::vector<Vec3>& out) {
  out.assign(mesh.vertices.size(), Vec3::Zero());
  std::vector<int> count(mesh.vertices.size(), 0);
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const Element& el = mesh.elements[e];
    const ReferenceBasis& basis = make_basis(el.kind, degree);
    const ReferenceBasis& corners = make_basis(el.kind, 1);
    Eigen::VectorXd c = coeffs(e);
    for (size_t v = 0; v < el.verts.size(); ++v) {
      Eigen::VectorXd phi = basis.shape(corners.nodes[v]);
      Vec3 val = Vec3::Zero();
      for (int a = 0; a < basis.size(); ++a)
        for (int d = 0; d < 3; ++d) val(d) += phi(a) * c(3 * a + d);
      out[el.verts[v]] += val;
      ++count[el.verts[v]];
    }
  }
  for (size_t v = 0; v < out.size(); ++v)
    if (count[v] > 0) out[v] /= double(count[v]);
}

void write_vectors(std::ofstream& os, const std::string& name,
                   const std::vector<Vec3>& vals) {
  os << "VECTORS " << name << " double\n";
  char buf[128];
  for (const auto& v : vals) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", v.x(), v.y(),
                  v.z());
    os << buf;
  }
}

}  // namespace

void export_vtk(const Mesh& mesh, int degree, const FieldState& state,
                Formulation form, const std::string& path,
                const std::vector<Eigen::VectorXcd>* dft_e) {
  std::ofstream os(path);
  if (!os) throw ParseError("cannot open for writing: " + path);
  os << "# vtk DataFile Version 3.0\n";
  os << "hdgem fields t=" << state.t << "\n";
  os << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << mesh.vertices.size() << " double\n";
  char buf[128];
  for (const auto& p : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(),
                  p.z());
    os << buf;
  }
  int listlen = 0;
  for (const auto& el : mesh.elements) listlen += 1 + (int)el.verts.size();
  os << "CELLS " << mesh.n_elements() << " " << listlen << "\n";
  for (const auto& el : mesh.elements) {
    os << el.verts.size();
    if (el.kind == CellKind::Hex)
      for (int i = 0; i < 8; ++i) os << " " << el.verts[kVtkHex[i]];
    else
      for (int v : el.verts) os << " " << v;
    os << "\n";
  }
  os << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (const auto& el : mesh.elements)
    os << (el.kind == CellKind::Hex ? 12 : 10) << "\n";

  auto block = [&](int e, int which) {
    const ReferenceBasis& basis = make_basis(mesh.elements[e].kind, degree);
    int nv = 3 * basis.size();
    return Eigen::VectorXd(state.interior[e].segment(which * nv, nv));
  };
  std::vector<Vec3> efield, hfield;
  vertex_average(mesh, degree, [&](int e) { return block(e, 1); }, efield);
  vertex_average(mesh, degree, [&](int e) { return block(e, 0); }, hfield);

  os << "POINT_DATA " << mesh.vertices.size() << "\n";
  write_vectors(os, "E", efield);
  write_vectors(os, form == Formulation::Mixed ? "H" : "U", hfield);
  if (dft_e) {
    std::vector<Vec3> redft;
    vertex_average(
        mesh, degree,
        [&](int e) { return Eigen::VectorXd((*dft_e)[e].real()); }, redft);
    write_vectors(os, "Re_DFT_E", redft);
  }
  if (!os) throw ParseError("write failed: " + path);
}

}  // namespace hdgem
