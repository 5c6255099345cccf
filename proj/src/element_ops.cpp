#include "hdgem/element_ops.hpp"

#include <cmath>
#include <cstring>

namespace hdgem {

std::vector<double> compute_face_tau(const Mesh& mesh, const MaterialMap& mats,
                                     bool impedance, double tau_scale) {
  if (!(tau_scale > 0.0))
    throw SolveError("stabilization: tau must be positive");
  std::vector<double> tau(mesh.n_faces());
  for (int f = 0; f < mesh.n_faces(); ++f) {
    if (!impedance) {
      tau[f] = tau_scale;
      continue;
    }
    const Face& fc = mesh.faces[f];
    double zo = material_for(mats, mesh.elements[fc.owner].region).impedance_coeff();
    if (fc.boundary()) {
      tau[f] = tau_scale * zo;
    } else {
      double zn =
          material_for(mats, mesh.elements[fc.neighbor].region).impedance_coeff();
      tau[f] = tau_scale * 2.0 * zo * zn / (zo + zn);  // harmonic mean
    }
  }
  return tau;
}

namespace {

// Levi-Civita symbol
int eps3(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

struct SigBuilder {
  std::string bytes;

  void add_int(long long v) {
    bytes.append(reinterpret_cast<const char*>(&v), sizeof(v));
  }
  void add(double v) {
    // relative quantization to ~1e-12 so 1-ulp coordinate noise still shares
    int ex = 0;
    double mant = std::frexp(v, &ex);
    add_int(static_cast<long long>(std::llround(std::ldexp(mant, 40))));
    add_int(ex);
  }
  void add(const Vec3& v) {
    add(v.x());
    add(v.y());
    add(v.z());
  }
};

std::string kernel_signature(const Mesh& mesh, int e, int degree,
                             Formulation form, const Material& mat,
                             const std::vector<double>& face_tau) {
  SigBuilder sig;
  const Element& el = mesh.elements[e];
  sig.add_int(static_cast<int>(el.kind));
  sig.add_int(degree);
  sig.add_int(static_cast<int>(form));
  sig.add(mat.epsilon);
  sig.add(mat.mu);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) sig.add(mat.sigma(i, j));
  const Vec3 anchor = mesh.vertices[el.verts[0]];
  for (int v : el.verts) sig.add(Vec3(mesh.vertices[v] - anchor));
  for (int f : mesh.element_faces[e]) {
    const Face& fc = mesh.faces[f];
    sig.add(face_tau[f]);
    sig.add_int(fc.tag == BoundaryTag::GammaA ? 1 : 0);
    sig.add_int(fc.owner == e ? 1 : 0);
    sig.add(fc.normal);
    sig.add(fc.t1);
    sig.add(fc.t2);
    for (int v : fc.verts) sig.add(Vec3(mesh.vertices[v] - anchor));
  }
  return sig.bytes;
}

KernelPtr assemble_kernel(const Mesh& mesh, int e, int degree, Formulation form,
                          const Material& mat,
                          const std::vector<double>& face_tau) {
  auto ker = std::make_shared<ElementKernel>();
  const Element& el = mesh.elements[e];
  ker->kind = el.kind;
  ker->degree = degree;
  ker->form = form;
  ker->mat = mat;

  const ReferenceBasis& basis = make_basis(el.kind, degree);
  const int nb = basis.size();
  ker->nb = nb;
  ker->nint = 6 * nb;
  const int nv = 3 * nb;
  auto coords = mesh.element_coords(e);

  // volume quadrature data
  const QuadratureRule& vrule = make_quadrature(el.kind, 2 * degree + 1);
  const int nq = vrule.size();
  ker->phi.resize(nq, nb);
  ker->dphi.assign(3, Eigen::MatrixXd(nq, nb));
  ker->wdet.resize(nq);
  for (int q = 0; q < nq; ++q) {
    MapResult m = map_physical(el.kind, coords, vrule.points[q]);
    ker->wdet(q) = vrule.weights[q] * m.det;
    ker->phi.row(q) = basis.shape(vrule.points[q]).transpose();
    Eigen::MatrixXd gref = basis.shape_grad(vrule.points[q]);  // nb x 3
    Eigen::MatrixXd gphys = gref * m.jacobian.inverse();
    for (int c = 0; c < 3; ++c)
      for (int a = 0; a < nb; ++a) ker->dphi[c](q, a) = gphys(a, c);
  }
  ker->mass = ker->phi.transpose() * ker->wdet.asDiagonal() * ker->phi;

  // Kgrad[m](a,b) = int (d_m phi_a) phi_b
  std::vector<Eigen::MatrixXd> kgrad(3);
  for (int m = 0; m < 3; ++m)
    kgrad[m] = ker->dphi[m].transpose() * ker->wdet.asDiagonal() * ker->phi;

  // curl pairings: C = (curl v, E), F = -(w, curl H)
  Eigen::MatrixXd cmat = Eigen::MatrixXd::Zero(nv, nv);
  Eigen::MatrixXd fmat = Eigen::MatrixXd::Zero(nv, nv);
  for (int c = 0; c < 3; ++c)
    for (int d = 0; d < 3; ++d) {
      for (int m = 0; m < 3; ++m) {
        int s = eps3(c, d, m);
        if (s == 0) continue;
        for (int a = 0; a < nb; ++a)
          for (int b = 0; b < nb; ++b) {
            cmat(3 * a + c, 3 * b + d) += s * kgrad[m](a, b);
            fmat(3 * a + c, 3 * b + d) += s * kgrad[m](b, a);
          }
      }
    }

  // faces
  const auto& efaces = mesh.element_faces[e];
  const int nfaces = static_cast<int>(efaces.size());
  ker->face_offsets.resize(nfaces);
  ker->fdata.resize(nfaces);
  int nl = 0;
  for (int lf = 0; lf < nfaces; ++lf) {
    const Face& fc = mesh.faces[efaces[lf]];
    ker->face_offsets[lf] = nl;
    nl += 2 * make_basis(fc.kind(), degree).size();
  }
  ker->nl = nl;

  Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(nv, nl);   // <v x n, Lambda>
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(nv, nl);   // tau <w_t, Lambda>
  Eigen::MatrixXd gface = Eigen::MatrixXd::Zero(nv, nv);  // tau <w_t, E_t>
  Eigen::MatrixXd tau_mass = Eigen::MatrixXd::Zero(nl, nl);
  Eigen::MatrixXd abc_mass = Eigen::MatrixXd::Zero(nl, nl);

  for (int lf = 0; lf < nfaces; ++lf) {
    const int f = efaces[lf];
    const Face& fc = mesh.faces[f];
    const double tau = face_tau[f];
    if (!(tau > 0.0))
      throw SolveError("stabilization: tau must be positive (face " +
                       std::to_string(f) + ")");
    FaceKernelData& fd = ker->fdata[lf];
    const ReferenceBasis& fbasis = make_basis(fc.kind(), degree);
    fd.face_nb = fbasis.size();
    fd.tau = tau;
    fd.gamma_a = fc.boundary() && fc.tag == BoundaryTag::GammaA;
    const double osign = (fc.owner == e) ? 1.0 : -1.0;
    fd.n = osign * fc.normal;
    fd.t1 = fc.t1;
    fd.t2 = fc.t2;
    if (fd.gamma_a && form == Formulation::EField)
      throw CapabilityError(
          "absorbing boundary is not supported by the e-field formulation");

    auto fcoords = mesh.face_coords(f);
    const QuadratureRule& frule = make_quadrature(fc.kind(), 2 * degree + 1);
    const int nfq = frule.size();
    fd.psi.resize(nfq, fd.face_nb);
    fd.phi_vol.resize(nfq, nb);
    fd.w.resize(nfq);
    for (int q = 0; q < nfq; ++q) {
      FaceMapResult fm = map_face(fc.kind(), fcoords, frule.points[q]);
      fd.w(q) = frule.weights[q] * fm.area_element;
      fd.psi.row(q) = fbasis.shape(frule.points[q]).transpose();
      Vec3 ref = reference_of(el.kind, coords, fm.x);
      fd.phi_vol.row(q) = basis.shape(ref).transpose();
    }

    // scalar face couplings
    Eigen::MatrixXd mphipsi =
        fd.phi_vol.transpose() * fd.w.asDiagonal() * fd.psi;  // nb x face_nb
    Eigen::MatrixXd mphiphi =
        fd.phi_vol.transpose() * fd.w.asDiagonal() * fd.phi_vol;
    Eigen::MatrixXd mpsipsi = fd.psi.transpose() * fd.w.asDiagonal() * fd.psi;

    const int off = ker->face_offsets[lf];
    const Vec3& n = fd.n;
    for (int a = 0; a < nb; ++a)
      for (int k = 0; k < fd.face_nb; ++k) {
        double s = mphipsi(a, k);
        for (int c = 0; c < 3; ++c) {
          Vec3 ec = Vec3::Zero();
          ec(c) = 1.0;
          double d1 = ec.cross(n).dot(fd.t1);
          double d2 = ec.cross(n).dot(fd.t2);
          dmat(3 * a + c, off + 2 * k + 0) += s * d1;
          dmat(3 * a + c, off + 2 * k + 1) += s * d2;
          hmat(3 * a + c, off + 2 * k + 0) += tau * s * fd.t1(c);
          hmat(3 * a + c, off + 2 * k + 1) += tau * s * fd.t2(c);
        }
      }
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b) {
        double s = mphiphi(a, b);
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) {
            double tang = (c == d ? 1.0 : 0.0) - n(c) * n(d);
            gface(3 * a + c, 3 * b + d) += tau * s * tang;
          }
      }
    double labc = fd.gamma_a ? std::sqrt(mat.epsilon / mat.mu) : 0.0;
    for (int k = 0; k < fd.face_nb; ++k)
      for (int k2 = 0; k2 < fd.face_nb; ++k2)
        for (int beta = 0; beta < 2; ++beta) {
          tau_mass(off + 2 * k + beta, off + 2 * k2 + beta) +=
              tau * mpsipsi(k, k2);
          abc_mass(off + 2 * k + beta, off + 2 * k2 + beta) +=
              labc * mpsipsi(k, k2);
        }
  }

  // component-wise mass helpers
  auto mass3 = [&](double scale) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nv, nv);
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b)
        for (int c = 0; c < 3; ++c)
          m(3 * a + c, 3 * b + c) = scale * ker->mass(a, b);
    return m;
  };
  auto sigma_mass = [&]() {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nv, nv);
    for (int a = 0; a < nb; ++a)
      for (int b = 0; b < nb; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d)
            m(3 * a + c, 3 * b + d) = mat.sigma(c, d) * ker->mass(a, b);
    return m;
  };

  ker->att = Eigen::MatrixXd::Zero(ker->nint, ker->nint);
  ker->stiff = Eigen::MatrixXd::Zero(ker->nint, ker->nint);
  ker->coupling = Eigen::MatrixXd::Zero(ker->nint, nl);
  ker->rmat = Eigen::MatrixXd::Zero(nl, ker->nint);

  // The trace penalty signs are fixed by discrete energy dissipation:
  // summing the field equations against (H, E) and the continuity rows
  // against Lambda must yield d/dt(energy) = -(E, sigma E) - tau |E_t -
  // Lambda|^2 (mixed) resp. -mu|u|^2 - tau|E_t - Lambda|^2 (e-field).
  if (form == Formulation::Mixed) {
    // mu M Hdot + C E + D lam = 0
    // eps M Edot + sig M E - (w, curl H) + tau<E_t, w> - tau<lam, w> = -i_s
    // <n x H, eta> - tau<E_t, eta> + tau<lam, eta> (+ abc) = -<g, eta>
    ker->att.topLeftCorner(nv, nv) = mass3(mat.mu);
    ker->att.bottomRightCorner(nv, nv) = mass3(mat.epsilon);
    ker->stiff.topRightCorner(nv, nv) = cmat;
    ker->stiff.bottomLeftCorner(nv, nv) = fmat;  // = -(w, curl H)
    ker->stiff.bottomRightCorner(nv, nv) = sigma_mass() + gface;
    ker->coupling.topRows(nv) = dmat;
    ker->coupling.bottomRows(nv) = -hmat;
    ker->rmat.leftCols(nv) = -dmat.transpose();
    ker->rmat.rightCols(nv) = -hmat.transpose();
    ker->lmat = tau_mass + abc_mass;
  } else {
    // mu M u - C E - D lam = 0
    // sig M Edot + (w, curl u) + tau<E_t, w> - tau<lam, w> = -di_s/dt
    // <n x u, eta> + tau<E_t, eta> - tau<lam, eta> = 0
    Eigen::SelfAdjointEigenSolver<Mat3> es(mat.sigma);
    if (es.eigenvalues()(0) <= 0.0)
      throw SolveError("e-field formulation requires positive-definite sigma "
                       "(element " + std::to_string(e) + ")");
    ker->att.bottomRightCorner(nv, nv) = sigma_mass();
    ker->stiff.topLeftCorner(nv, nv) = mass3(mat.mu);
    ker->stiff.topRightCorner(nv, nv) = -cmat;
    ker->stiff.bottomLeftCorner(nv, nv) = -fmat;  // = +(w, curl u)
    ker->stiff.bottomRightCorner(nv, nv) = gface;
    ker->coupling.topRows(nv) = -dmat;
    ker->coupling.bottomRows(nv) = -hmat;
    ker->rmat.leftCols(nv) = -dmat.transpose();
    ker->rmat.rightCols(nv) = hmat.transpose();
    ker->lmat = -tau_mass;
  }

  return ker;
}

}  // namespace

KernelPtr KernelCache::get(const Mesh& mesh, int e, int degree,
                           Formulation form, const MaterialMap& mats,
                           const std::vector<double>& face_tau) {
  const Material& mat = material_for(mats, mesh.elements[e].region);
  std::string sig = kernel_signature(mesh, e, degree, form, mat, face_tau);
  auto it = cache_.find(sig);
  if (it != cache_.end()) return it->second;
  KernelPtr ker = assemble_kernel(mesh, e, degree, form, mat, face_tau);
  cache_.emplace(std::move(sig), ker);
  return ker;
}

Eigen::VectorXd project_trace(const Mesh& mesh, int f, int degree,
                              const std::function<Vec3(const Vec3&)>& field) {
  const Face& fc = mesh.faces[f];
  const ReferenceBasis& fbasis = make_basis(fc.kind(), degree);
  const int nfb = fbasis.size();
  const QuadratureRule& rule = make_quadrature(fc.kind(), 2 * degree + 2);
  auto coords = mesh.face_coords(f);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nfb, nfb);
  Eigen::VectorXd r1 = Eigen::VectorXd::Zero(nfb);
  Eigen::VectorXd r2 = Eigen::VectorXd::Zero(nfb);
  for (int q = 0; q < rule.size(); ++q) {
    FaceMapResult fm = map_face(fc.kind(), coords, rule.points[q]);
    double w = rule.weights[q] * fm.area_element;
    Eigen::VectorXd psi = fbasis.shape(rule.points[q]);
    Vec3 v = field(fm.x);
    m += w * psi * psi.transpose();
    r1 += w * v.dot(fc.t1) * psi;
    r2 += w * v.dot(fc.t2) * psi;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  Eigen::VectorXd c1 = llt.solve(r1), c2 = llt.solve(r2);
  Eigen::VectorXd out(2 * nfb);
  for (int k = 0; k < nfb; ++k) {
    out(2 * k) = c1(k);
    out(2 * k + 1) = c2(k);
  }
  return out;
}

Eigen::VectorXd project_volume(const Mesh& mesh, int e, int degree,
                               const std::function<Vec3(const Vec3&)>& field) {
  const Element& el = mesh.elements[e];
  const ReferenceBasis& basis = make_basis(el.kind, degree);
  const int nb = basis.size();
  const QuadratureRule& rule = make_quadrature(el.kind, 2 * degree + 2);
  auto coords = mesh.element_coords(e);

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nb, nb);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nb, 3);
  for (int q = 0; q < rule.size(); ++q) {
    MapResult mp = map_physical(el.kind, coords, rule.points[q]);
    double w = rule.weights[q] * mp.det;
    Eigen::VectorXd phi = basis.shape(rule.points[q]);
    Vec3 v = field(mp.x);
    m += w * phi * phi.transpose();
    rhs += w * phi * v.transpose();
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  Eigen::MatrixXd c = llt.solve(rhs);
  Eigen::VectorXd out(3 * nb);
  for (int a = 0; a < nb; ++a)
    for (int comp = 0; comp < 3; ++comp) out(3 * a + comp) = c(a, comp);
  return out;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> volume_quad_points(
    const Mesh& mesh, int e, const ElementKernel& ker) {
  const Element& el = mesh.elements[e];
  auto coords = mesh.element_coords(e);
  const QuadratureRule& rule = make_quadrature(el.kind, 2 * ker.degree + 1);
  Eigen::Matrix<double, Eigen::Dynamic, 3> pts(rule.size(), 3);
  for (int q = 0; q < rule.size(); ++q)
    pts.row(q) =
        map_physical(el.kind, coords, rule.points[q]).x.transpose();
  return pts;
}

Eigen::VectorXd assemble_source(
    const ElementKernel& ker,
    const Eigen::Matrix<double, Eigen::Dynamic, 3>& pts, const SourceTerm& src,
    double t) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(ker.nint);
  if (src.empty()) return out;
  const auto& eval =
      (ker.form == Formulation::Mixed) ? src.value : src.time_derivative;
  if (!eval)
    throw SolveError(
        "e-field formulation needs the source time derivative");
  const int nb = ker.nb;
  for (int q = 0; q < pts.rows(); ++q) {
    Vec3 v = eval(Vec3(pts(q, 0), pts(q, 1), pts(q, 2)), t);
    double w = ker.wdet(q);
    for (int a = 0; a < nb; ++a)
      for (int c = 0; c < 3; ++c)
        out(3 * nb + 3 * a + c) -= w * ker.phi(q, a) * v(c);
  }
  return out;
}

}  // namespace hdgem
