#include "hdgem/quadrature.hpp"

#include <cmath>

namespace hdgem {

void gauss_legendre(int npts, std::vector<double>& x, std::vector<double>& w) {
  // Golub-Welsch: eigen-decomposition of the symmetric Jacobi matrix.
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(npts, npts);
  for (int k = 1; k < npts; ++k) {
    double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = b;
    jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  x.resize(npts);
  w.resize(npts);
  for (int i = 0; i < npts; ++i) {
    x[i] = es.eigenvalues()(i);
    double v = es.eigenvectors()(0, i);
    w[i] = 2.0 * v * v;
  }
}

double reference_measure(CellKind kind) {
  switch (kind) {
    case CellKind::Hex: return 8.0;
    case CellKind::Quad: return 4.0;
    case CellKind::Tet: return 1.0 / 6.0;
    case CellKind::Tri: return 0.5;
  }
  return 0.0;
}

namespace {

int npts_for(int degree) { return (degree + 2) / 2; }  // 2n-1 >= degree

}  // namespace

QuadratureRule make_quadrature(CellKind kind, int exactness_degree) {
  if (exactness_degree < 0 || exactness_degree > 11)
    throw CapabilityError("quadrature exactness degree " +
                          std::to_string(exactness_degree) + " unavailable");
  QuadratureRule rule;
  rule.kind = kind;
  rule.exactness = exactness_degree;
  const int d = exactness_degree;

  if (kind == CellKind::Hex || kind == CellKind::Quad) {
    std::vector<double> x, w;
    gauss_legendre(npts_for(d), x, w);
    int n = static_cast<int>(x.size());
    if (kind == CellKind::Quad) {
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          rule.points.emplace_back(x[i], x[j], 0.0);
          rule.weights.push_back(w[i] * w[j]);
        }
    } else {
      for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) {
            rule.points.emplace_back(x[i], x[j], x[k]);
            rule.weights.push_back(w[i] * w[j] * w[k]);
          }
    }
    return rule;
  }

  // Collapsed coordinates. The map from the unit cube (u,v,w) to the simplex
  // raises the polynomial degree per direction by the degree of the Jacobian
  // factor, so each direction gets its own point count.
  if (kind == CellKind::Tri) {
    std::vector<double> xu, wu, xv, wv;
    gauss_legendre(npts_for(d + 1), xu, wu);
    gauss_legendre(npts_for(d + 2), xv, wv);
    for (std::size_t j = 0; j < xv.size(); ++j)
      for (std::size_t i = 0; i < xu.size(); ++i) {
        double u = 0.5 * (1.0 + xu[i]);
        double v = 0.5 * (1.0 + xv[j]);
        rule.points.emplace_back(u * (1.0 - v), v, 0.0);
        rule.weights.push_back(0.25 * wu[i] * wv[j] * (1.0 - v));
      }
    return rule;
  }

  // Tet: x = u(1-v)(1-w), y = v(1-w), z = w; det = (1-v)(1-w)^2.
  std::vector<double> xu, wu, xv, wv, xw, ww;
  gauss_legendre(npts_for(d + 1), xu, wu);
  gauss_legendre(npts_for(d + 2), xv, wv);
  gauss_legendre(npts_for(d + 3), xw, ww);
  for (std::size_t k = 0; k < xw.size(); ++k)
    for (std::size_t j = 0; j < xv.size(); ++j)
      for (std::size_t i = 0; i < xu.size(); ++i) {
        double u = 0.5 * (1.0 + xu[i]);
        double v = 0.5 * (1.0 + xv[j]);
        double w = 0.5 * (1.0 + xw[k]);
        rule.points.emplace_back(u * (1.0 - v) * (1.0 - w), v * (1.0 - w), w);
        rule.weights.push_back(0.125 * wu[i] * wv[j] * ww[k] * (1.0 - v) *
                               (1.0 - w) * (1.0 - w));
      }
  return rule;
}

}  // namespace hdgem
