#include "koenigs/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace koenigs {

namespace {

// Radical of Q restricted to `space`: the contact space of a tangent
// parameter space.
ProjSubspace contact_space(const QuadricForm& q, const ProjSubspace& space, const Tolerance& tol) {
  const Eigen::MatrixXd& b = space.basis();
  const Eigen::MatrixXd r = b.transpose() * q.matrix() * b;
  const Eigen::MatrixXd k = null_space(r, tol);
  if (k.cols() != b.cols() - 1)
    throw GeometryError(ErrorCode::TangentConstructionFailed,
                        "parameter space is not tangent to the quadric along a hyperplane of it");
  return ProjSubspace::span(b * k, tol);
}

// The point of the conic (plane form c, 3x3) on the polar line of x other
// than `known`.
Eigen::Vector3d second_tangent_point(const Eigen::Matrix3d& c, const Eigen::Vector3d& x, const Eigen::Vector3d& known,
                                     const Tolerance& tol) {
  const Eigen::Vector3d l = c * x;
  if (l.norm() <= tol.rank_rel * c.norm())
    throw GeometryError(ErrorCode::TangentConstructionFailed, "new vertex is a singular point of the conic");
  const Eigen::MatrixXd n = null_space(Eigen::MatrixXd(l.transpose()), tol);
  const Eigen::Matrix2d c2 = n.transpose() * c * n;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(c2);
  const Eigen::Vector2d ev = es.eigenvalues();
  if (ev[0] > tol.rank_rel * c2.norm() || ev[1] < -tol.rank_rel * c2.norm())
    throw GeometryError(ErrorCode::TangentConstructionFailed, "polar line misses the conic");
  const Eigen::Vector2d e0 = es.eigenvectors().col(0), e1 = es.eigenvectors().col(1);
  const double s0 = std::sqrt(std::max(0.0, ev[1])), s1 = std::sqrt(std::max(0.0, -ev[0]));
  const Eigen::Vector3d u1 = n * (s0 * e0 + s1 * e1), u2 = n * (s0 * e0 - s1 * e1);
  const HPoint k{Eigen::VectorXd(known)};
  return point_distance(HPoint(Eigen::VectorXd(u1)), k) >= point_distance(HPoint(Eigen::VectorXd(u2)), k) ? u1 : u2;
}

QNet extend_top(const QNet& net, const HPoint& first, const QuadricForm& q, const Tolerance& tol) {
  const int a = net.a(), b = net.b();
  std::vector<ProjSubspace> tv;
  for (int i = 0; i <= a; ++i) tv.push_back(contact_space(q, parameter_space(net, Direction::Col, i, tol), tol));

  std::vector<HPoint> row{first};
  for (int i = 0; i < a; ++i) {
    const HPoint& x = row.back();
    const HPoint& p0 = net.at(i, b);
    const HPoint& p1 = net.at(i + 1, b);
    const HPoint t0 = meet_point(line_through(p0, x, tol), tv[static_cast<std::size_t>(i)],
                                 ErrorCode::TangentConstructionFailed, tol);
    const ProjSubspace e = ProjSubspace::of_points({p0, x, p1}, tol);
    if (e.proj_dim() != 2) throw GeometryError(ErrorCode::TangentConstructionFailed, "new face is not a plane");
    const HPoint t1 = meet_point(e, tv[static_cast<std::size_t>(i + 1)], ErrorCode::TangentConstructionFailed, tol);

    const Eigen::MatrixXd& eb = e.basis();
    const Eigen::Matrix3d c = eb.transpose() * q.matrix() * eb;
    if (numerical_rank(c, tol) < 3)
      throw GeometryError(ErrorCode::TangentConstructionFailed, "quadric meets the new face in a degenerate conic");
    const Eigen::Vector3d u =
        second_tangent_point(c, eb.transpose() * x.coords(), eb.transpose() * t0.coords(), tol);
    row.push_back(meet_point(line_through(x, HPoint(Eigen::VectorXd(eb * u)), tol), line_through(t1, p1, tol),
                             ErrorCode::TangentConstructionFailed, tol));
  }
  std::vector<HPoint> pts = net.points();
  pts.insert(pts.end(), row.begin(), row.end());
  return QNet(net.cols(), net.rows() + 1, std::move(pts), net.origin_i(), net.origin_j());
}

}  // namespace

DGridReport check_dgrid(const QNet& net, int d, const Tolerance& tol) {
  if (d < 1) throw GeometryError(ErrorCode::InvalidInput, "d must be positive");
  DGridReport r;
  for (int j = 0; j <= net.b(); ++j)
    if (parameter_space(net, Direction::Row, j, tol).proj_dim() != d) r.bad_rows.push_back(j);
  for (int i = 0; i <= net.a(); ++i)
    if (parameter_space(net, Direction::Col, i, tol).proj_dim() != d) r.bad_cols.push_back(i);
  r.valid = r.bad_rows.empty() && r.bad_cols.empty();
  return r;
}

GridGenericityReport is_generic_grid(const QNet& net, int d, const Tolerance& tol, int threads) {
  if (d < 1) throw GeometryError(ErrorCode::InvalidInput, "d must be positive");
  if (net.a() < d || net.b() < d || (net.a() == d && net.b() == d))
    throw GeometryError(ErrorCode::WindowTooSmall, "genericity of order " + std::to_string(d) + " needs Σ_{d,d+1}");
  GridGenericityReport r;
  r.sigma_dd_extensive = is_patch_extensive(net, d, d, tol, threads);
  r.p_d = iterated_laplace(net, d, tol).report;
  r.p_minus_d = iterated_laplace(net, -d, tol).report;
  r.is_generic = r.sigma_dd_extensive && r.p_d.nowhere_degenerate && r.p_minus_d.nowhere_degenerate;
  return r;
}

std::vector<ProjSubspace> diagonal_rows(const QNet& net, const Tolerance& tol) {
  const QNet d = diagonal_net(net, tol);
  std::vector<ProjSubspace> out;
  for (int j = 0; j <= d.b(); ++j) out.push_back(parameter_space(d, Direction::Row, j, tol));
  return out;
}

std::vector<ProjSubspace> diagonal_cols(const QNet& net, const Tolerance& tol) {
  const QNet d = diagonal_net(net, tol);
  std::vector<ProjSubspace> out;
  for (int i = 0; i <= d.a(); ++i) out.push_back(parameter_space(d, Direction::Col, i, tol));
  return out;
}

TouchingInstance special_touching_conics(const QNet& net, int d, const Tolerance& tol) {
  const std::vector<ProjSubspace> dh = diagonal_rows(net, tol);
  const std::vector<ProjSubspace> dv = diagonal_cols(net, tol);
  for (const auto* spaces : {&dh, &dv})
    for (const auto& s : *spaces)
      if (s.proj_dim() != d)
        throw GeometryError(ErrorCode::NotGeneric, "diagonal parameter space of dimension " +
                                                       std::to_string(s.proj_dim()) + ", expected " + std::to_string(d));
  const int a = net.a(), b = net.b();
  std::vector<HPoint> s, t;
  for (int j = 0; j <= b; ++j)
    for (int i = 0; i < a; ++i)
      s.push_back(meet_point(dh[static_cast<std::size_t>(std::min(j, b - 1))],
                             line_through(net.at(i, j), net.at(i + 1, j), tol), ErrorCode::MeetEmpty, tol));
  for (int j = 0; j < b; ++j)
    for (int i = 0; i <= a; ++i)
      t.push_back(meet_point(dv[static_cast<std::size_t>(std::min(i, a - 1))],
                             line_through(net.at(i, j), net.at(i, j + 1), tol), ErrorCode::MeetEmpty, tol));
  const PropagationResult pr =
      instance_from_contacts(net, QNet(a, b + 1, std::move(s)), QNet(a + 1, b, std::move(t)), tol);
  if (!pr.closed || !pr.instance)
    throw GeometryError(ErrorCode::VerifyFailed,
                        "special contacts are not touching conics: residual " + std::to_string(pr.max_residual));
  return *pr.instance;
}

SpecialQuadric special_inscribed_quadric(const QNet& net, int d, const Tolerance& tol, int i0, int j0, int threads) {
  if (net.a() < d + 1 || net.b() < d + 1)
    throw GeometryError(ErrorCode::WindowTooSmall, "special quadric needs Σ_{d+1,d+1}");
  if (net.ambient_dim() != 2 * d) throw GeometryError(ErrorCode::NotGeneric, "a d-grid lives in RP^{2d}");
  if (i0 < 0 || j0 < 0 || i0 + d > net.a() || j0 + d > net.b())
    throw GeometryError(ErrorCode::IndexOutOfRange, "window outside the net");
  SpecialQuadric out;
  out.instance = special_touching_conics(net, d, tol);
  const QNet window = net.sub(i0, j0, d, d);
  if (!is_extensive(window, tol)) throw GeometryError(ErrorCode::NotGeneric, "Σ_{d,d} window is not extensive");
  out.quadric = build_inscribed_quadric(window, restrict_instance(out.instance, i0, j0, d, d), tol).quadric;
  out.verification = verify_inscribed(net, out.instance, out.quadric, tol, threads);
  out.signature = signature(out.quadric, tol);
  return out;
}

SpecialGridReport is_special_grid(const QNet& net, int d, const Tolerance& tol) {
  SpecialGridReport r;
  r.window_too_small = net.a() <= d && net.b() <= d;
  r.special = true;
  for (const auto& s : diagonal_rows(net, tol)) r.special = r.special && s.proj_dim() <= d - 1;
  for (const auto& s : diagonal_cols(net, tol)) r.special = r.special && s.proj_dim() <= d - 1;
  return r;
}

QNet extend_grid(const QNet& net, Side side, const HPoint& first, const QuadricForm& q, const Tolerance& tol) {
  if (q.ambient_dim() != net.ambient_dim() || first.ambient_dim() != net.ambient_dim())
    throw GeometryError(ErrorCode::MixedAmbient, "extend_grid");
  if (side == Side::Right) return extend_grid(net.transposed(), Side::Top, first, q, tol).transposed();
  if (!parameter_space(net, Direction::Col, 0, tol).contains(first, tol))
    throw GeometryError(ErrorCode::NotInParameterSpace, "new vertex is not in the adjacent parameter space");
  return extend_top(net, first, q, tol);
}

IncidenceReport incidence_check(const QNet& net, int d, const Tolerance& tol) {
  if (net.a() != d + 2 || net.b() != d + 2)
    throw GeometryError(ErrorCode::InvalidInput, "incidence check runs on Σ_{d+2,d+2}");
  const KoenigsReport lower = is_koenigs(net.sub(0, 0, d + 2, d + 1), tol);
  const KoenigsReport left = is_koenigs(net.sub(0, 0, d + 1, d + 2), tol);
  if (!lower.closed || !left.closed)
    throw GeometryError(ErrorCode::HypothesisFailed, "restrictions are not Kœnigs: residuals " +
                                                         std::to_string(lower.closure_residual) + ", " +
                                                         std::to_string(left.closure_residual));
  IncidenceReport r;
  const KoenigsReport full = is_koenigs(net, tol);
  r.koenigs = full.closed;
  r.closure_residual = full.closure_residual;

  // Carry the special conics of the lower left window to the last face.
  const SpecialQuadric sq = special_inscribed_quadric(net.sub(0, 0, d + 1, d + 1), d, tol);
  const PropagationResult pr = propagate_from_contact(net, 0, 0, Edge::Bottom, sq.instance.s.at(0, 0).coords(), tol);
  if (!pr.instance) throw GeometryError(ErrorCode::ClosureFailure, "no conics reach the last face");
  const FaceConic& last = pr.instance->face(d + 1, d + 1);
  r.final_conic_residual =
      aligned_distance(last.primal, last.plane.transpose() * sq.quadric.matrix() * last.plane);
  return r;
}

}  // namespace koenigs
