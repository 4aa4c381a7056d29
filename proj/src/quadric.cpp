#include "koenigs/quadric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace koenigs {

QuadricForm::QuadricForm(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() != matrix.cols() || matrix.rows() < 1)
    throw GeometryError(ErrorCode::InvalidInput, "quadric matrix must be square");
  Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());
  const double n = sym.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError(ErrorCode::InvalidInput, "zero or non-finite quadric");
  matrix_ = sym / n;
}

std::string Signature::str() const {
  return std::string(plus, '+') + std::string(minus, '-') + std::string(zero, '0');
}

double evaluate(const QuadricForm& q, const HPoint& x, const HPoint& y) {
  if (x.ambient_dim() != q.ambient_dim() || y.ambient_dim() != q.ambient_dim())
    throw GeometryError(ErrorCode::MixedAmbient, "evaluate");
  return x.coords().dot(q.matrix() * y.coords());
}

ProjSubspace polar(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol) {
  if (a.ambient_dim() != q.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "polar");
  if (a.is_empty()) return ProjSubspace::whole(q.ambient_dim());
  const Eigen::MatrixXd ns = null_space(a.basis().transpose() * q.matrix(), tol);
  if (ns.cols() == 0) return ProjSubspace::empty(q.ambient_dim());
  return ProjSubspace::span(ns, tol);
}

Signature signature(const Eigen::MatrixXd& m, const Tolerance& tol) {
  Signature s;
  if (m.rows() == 0) return s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    if (!(big > 0.0) || std::abs(ev[k]) <= tol.rank_rel * big)
      ++s.zero;
    else if (ev[k] > 0.0)
      ++s.plus;
    else
      ++s.minus;
  }
  if (s.minus > s.plus) std::swap(s.plus, s.minus);
  return s;
}

Signature signature(const QuadricForm& q, const Tolerance& tol) { return signature(q.matrix(), tol); }

bool is_full_dimensional(const Eigen::MatrixXd& m, const Tolerance& tol) {
  const Signature s = signature(m, tol);
  return (s.plus > 0 && s.minus > 0) || s.plus + s.minus == 1;
}

ProjSubspace singular_locus(const QuadricForm& q, const Tolerance& tol) {
  const Eigen::MatrixXd ns = null_space(q.matrix(), tol);
  if (ns.cols() == 0) return ProjSubspace::empty(q.ambient_dim());
  return ProjSubspace::span(ns, tol);
}

Restriction restrict_form(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol) {
  if (a.ambient_dim() != q.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "restrict");
  Restriction r;
  r.matrix = a.basis().transpose() * q.matrix() * a.basis();
  r.matrix = 0.5 * (r.matrix + r.matrix.transpose());
  r.zero = r.matrix.norm() <= tol.residual_abs;
  return r;
}

double isotropy_residual(const QuadricForm& q, const ProjSubspace& a) {
  if (a.ambient_dim() != q.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "isotropy");
  if (a.is_empty()) return 0.0;
  return (a.basis().transpose() * q.matrix() * a.basis()).norm();
}

bool is_isotropic(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol) {
  return isotropy_residual(q, a) <= tol.residual_abs;
}

double tangency_residual(const QuadricForm& q, const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol) {
  if (a.ambient_dim() != q.ambient_dim() || b.ambient_dim() != q.ambient_dim())
    throw GeometryError(ErrorCode::MixedAmbient, "tangent_along");
  if (!a.contains(b, tol)) throw GeometryError(ErrorCode::NotNested, "contact space is not inside the tangent space");
  if (b.is_empty()) return 0.0;
  const Eigen::MatrixXd mb = q.matrix() * b.basis();
  return std::max((b.basis().transpose() * mb).norm(), (a.basis().transpose() * mb).norm());
}

bool tangent_along(const QuadricForm& q, const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol) {
  return tangency_residual(q, a, b, tol) <= tol.residual_abs;
}

// ---------------------------------------------------------------------------

Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd v(n * (n + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index r = 0; r < n; ++r) {
    v[k++] = m(r, r);
    for (Eigen::Index c = r + 1; c < n; ++c) v[k++] = std::sqrt(2.0) * 0.5 * (m(r, c) + m(c, r));
  }
  return v;
}

Eigen::MatrixXd vec_to_sym(const Eigen::VectorXd& v, int size) {
  Eigen::MatrixXd m(size, size);
  Eigen::Index k = 0;
  for (int r = 0; r < size; ++r) {
    m(r, r) = v[k++];
    for (int c = r + 1; c < size; ++c) m(r, c) = m(c, r) = v[k++] / std::sqrt(2.0);
  }
  return m;
}

namespace {

// Row of the linear map M -> x^T M y in symmetric-vector coordinates.
Eigen::RowVectorXd bilinear_row(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::MatrixXd outer = 0.5 * (x * y.transpose() + y * x.transpose());
  return sym_to_vec(outer).transpose();
}

Eigen::MatrixXd normalized(const Eigen::MatrixXd& m) {
  const double n = m.norm();
  return n > 0.0 ? Eigen::MatrixXd(m / n) : m;
}

}  // namespace

double aligned_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw GeometryError(ErrorCode::MixedAmbient, "aligned_distance");
  const Eigen::MatrixXd an = normalized(a);
  Eigen::Index r = 0, c = 0;
  an.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(b(r, c)) < std::numeric_limits<double>::min()) return an.norm() + 1.0;
  const Eigen::MatrixXd bs = b * (an(r, c) / b(r, c));
  return (an - bs).norm();
}

SubspaceQuadric reexpress(const SubspaceQuadric& q, const Eigen::MatrixXd& frame, const Tolerance& tol) {
  const Eigen::MatrixXd& e = q.carrier.basis();
  if (frame.rows() != e.rows()) throw GeometryError(ErrorCode::MixedAmbient, "reexpress");
  const Eigen::MatrixXd ej = frame.transpose() * e;
  Eigen::MatrixXd both(frame.rows(), frame.cols() + e.cols());
  both << frame, e;
  if (numerical_rank(both, tol) != frame.cols())
    throw GeometryError(ErrorCode::NotNested, "carrier is not inside the frame");
  const ProjSubspace carrier = ProjSubspace::span(ej, tol);
  if (carrier.basis().cols() != e.cols()) throw GeometryError(ErrorCode::NotNested, "carrier lost rank in frame");
  const Eigen::MatrixXd rot = carrier.basis().transpose() * ej;
  return {carrier, rot * q.form * rot.transpose()};
}

QuadricForm embed_form(const Eigen::MatrixXd& m, const Eigen::MatrixXd& frame) {
  return QuadricForm(frame * m * frame.transpose());
}

QuadricPencil glue_pencil(const SubspaceQuadric& qe, const SubspaceQuadric& qf, const Tolerance& tol) {
  const ProjSubspace& e = qe.carrier;
  const ProjSubspace& f = qf.carrier;
  if (e.ambient_dim() != f.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "glue_pencil");
  const int n = e.ambient_dim();
  if (e.proj_dim() != n - 1 || f.proj_dim() != n - 1)
    throw GeometryError(ErrorCode::InvalidInput, "gluing needs two hyperplanes");
  if (qe.form.rows() != n || qf.form.rows() != n)
    throw GeometryError(ErrorCode::InvalidInput, "form size does not match its carrier");
  if (e.contains(f, tol)) throw GeometryError(ErrorCode::InvalidInput, "gluing needs distinct hyperplanes");
  if (!is_full_dimensional(qe.form, tol) || !is_full_dimensional(qf.form, tol))
    throw GeometryError(ErrorCode::NotFullDimensional, "hyperplane quadric is not full-dimensional");

  const Eigen::MatrixXd me = normalized(qe.form);
  Eigen::MatrixXd mf = normalized(qf.form);

  // Match the two forms on the common (n-2)-space.
  const ProjSubspace g = meet(e, f, tol);
  const Eigen::MatrixXd ge = e.basis().transpose() * g.basis();
  const Eigen::MatrixXd gf = f.basis().transpose() * g.basis();
  const Eigen::MatrixXd re = ge.transpose() * me * ge;
  const Eigen::MatrixXd rf = gf.transpose() * mf * gf;
  if (!is_full_dimensional(re, tol) || !is_full_dimensional(rf, tol))
    throw GeometryError(ErrorCode::NotFullDimensional, "restriction to the common space is not full-dimensional");
  Eigen::MatrixXd pair(re.size(), 2);
  pair.col(0) = Eigen::Map<const Eigen::VectorXd>(re.data(), re.size());
  pair.col(1) = Eigen::Map<const Eigen::VectorXd>(rf.data(), rf.size());
  if (numerical_rank(pair, tol) != 1)
    throw GeometryError(ErrorCode::RestrictionMismatch, "forms disagree on the common space");
  mf *= pair.col(0).dot(pair.col(1)) / pair.col(1).squaredNorm();

  // Unknowns: symmetric M (ambient) and a scale s. Constraints:
  // B_E^T M B_E = s QE and B_F^T M B_F = s QF.
  const int dim = n + 1;
  const int nsym = dim * (dim + 1) / 2;
  const int ce = n * (n + 1) / 2;
  Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(2 * ce, nsym + 1);
  int row = 0;
  const std::pair<const ProjSubspace*, const Eigen::MatrixXd*> parts[2] = {{&e, &me}, {&f, &mf}};
  for (const auto& [carrier, form] : parts) {
    const Eigen::MatrixXd& b = carrier->basis();
    for (int p = 0; p < n; ++p) {
      for (int q = p; q < n; ++q) {
        sys.block(row, 0, 1, nsym) = bilinear_row(b.col(p), b.col(q));
        sys(row, nsym) = -(*form)(p, q);
        ++row;
      }
    }
  }
  const Eigen::MatrixXd ns = null_space(sys, tol);
  if (ns.cols() != 2)
    throw GeometryError(ErrorCode::UnexpectedSolutionDim,
                        "gluing system has a " + std::to_string(ns.cols()) + "-dimensional solution space");

  // The hyperplane pair E u F always solves the system with s = 0.
  const Eigen::VectorXd ne = e.complement().row(0).transpose();
  const Eigen::VectorXd nf = f.complement().row(0).transpose();
  const Eigen::MatrixXd pair_form = ne * nf.transpose() + nf * ne.transpose();
  Eigen::VectorXd pv = Eigen::VectorXd::Zero(nsym + 1);
  pv.head(nsym) = sym_to_vec(pair_form);
  pv.normalize();
  // Member of the solution space orthogonal to the pair.
  const Eigen::Vector2d c = ns.transpose() * pv;
  const Eigen::VectorXd other = ns * Eigen::Vector2d(-c[1], c[0]);
  return {QuadricForm(vec_to_sym(other.head(nsym), dim)), QuadricForm(pair_form)};
}

PencilMember pencil_member_through(const QuadricPencil& pencil, const HPoint& y, const Tolerance& tol) {
  const double v1 = evaluate(pencil.q1, y, y);
  const double v2 = evaluate(pencil.q2, y, y);
  if (std::abs(v1) <= tol.residual_abs && std::abs(v2) <= tol.residual_abs) return {pencil.q1, true};
  return {QuadricForm(v2 * pencil.q1.matrix() - v1 * pencil.q2.matrix()), false};
}

std::vector<QuadricForm> fit_quadric_oracle(const std::vector<HPoint>& incident,
                                            const std::vector<ProjSubspace>& isotropic, const Tolerance& tol) {
  int n = -1;
  if (!incident.empty())
    n = incident.front().ambient_dim();
  else if (!isotropic.empty())
    n = isotropic.front().ambient_dim();
  if (n < 0) throw GeometryError(ErrorCode::InvalidInput, "oracle needs data");
  const int dim = n + 1;
  std::vector<Eigen::RowVectorXd> rows;
  for (const auto& x : incident) {
    if (x.ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "fit_quadric_oracle");
    rows.push_back(bilinear_row(x.coords(), x.coords()));
  }
  for (const auto& s : isotropic) {
    if (s.ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "fit_quadric_oracle");
    const Eigen::MatrixXd& b = s.basis();
    for (Eigen::Index p = 0; p < b.cols(); ++p)
      for (Eigen::Index q = p; q < b.cols(); ++q) rows.push_back(bilinear_row(b.col(p), b.col(q)));
  }
  const int nsym = dim * (dim + 1) / 2;
  Eigen::MatrixXd sys(static_cast<Eigen::Index>(rows.size()), nsym);
  for (std::size_t k = 0; k < rows.size(); ++k) sys.row(static_cast<Eigen::Index>(k)) = rows[k];
  Eigen::MatrixXd ns;
  if (rows.empty()) {
    ns = Eigen::MatrixXd::Identity(nsym, nsym);
  } else {
    ns = null_space(sys, tol);
  }
  std::vector<QuadricForm> out;
  for (Eigen::Index k = 0; k < ns.cols(); ++k) out.emplace_back(vec_to_sym(ns.col(k), dim));
  return out;
}

}  // namespace koenigs
