#include "koenigs/conics.hpp"

#include "koenigs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace koenigs {

namespace {

// Vertex slots 00, 10, 01, 11 of each edge, with its A-point and B-point.
struct EdgeVertices {
  int first, second;
  int a_point, b_point;  // on the edge
  int a_other, b_other;  // the remaining A and B vertices
};

EdgeVertices edge_vertices(Edge e) {
  switch (e) {
    case Edge::Bottom: return {0, 1, 1, 0, 2, 3};
    case Edge::Top: return {2, 3, 2, 3, 1, 0};
    case Edge::Left: return {0, 2, 2, 0, 1, 3};
    case Edge::Right: return {1, 3, 1, 3, 2, 0};
  }
  return {0, 1, 1, 0, 2, 3};
}

Edge opposite(Edge e) {
  switch (e) {
    case Edge::Bottom: return Edge::Top;
    case Edge::Top: return Edge::Bottom;
    case Edge::Left: return Edge::Right;
    case Edge::Right: return Edge::Left;
  }
  return Edge::Top;
}

Eigen::Matrix3d adjugate(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d adj;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const int r1 = (c + 1) % 3, r2 = (c + 2) % 3;
      const int c1 = (r + 1) % 3, c2 = (r + 2) % 3;
      adj(r, c) = m(r1, c1) * m(r2, c2) - m(r1, c2) * m(r2, c1);
    }
  }
  return adj;
}

double chordal(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::VectorXd xn = x.normalized(), yn = y.normalized();
  return std::min((xn - yn).norm(), (xn + yn).norm());
}

}  // namespace

InscribedConicFamily InscribedConicFamily::of_face(const Eigen::VectorXd& p00, const Eigen::VectorXd& p10,
                                                   const Eigen::VectorXd& p01, const Eigen::VectorXd& p11,
                                                   const Tolerance& tol) {
  const Eigen::Index dim = p00.size();
  if (p10.size() != dim || p01.size() != dim || p11.size() != dim)
    throw GeometryError(ErrorCode::MixedAmbient, "face vertices");
  Eigen::MatrixXd m(dim, 4);
  m << p00, p10, p01, p11;
  const RankInfo info = rank_info(m, tol);
  if (info.rank != 3) throw GeometryError(ErrorCode::DegenerateFace, "face does not span a plane");
  for (int skip = 0; skip < 4; ++skip) {
    Eigen::MatrixXd t(dim, 3);
    int c = 0;
    for (int k = 0; k < 4; ++k)
      if (k != skip) t.col(c++) = m.col(k);
    if (numerical_rank(t, tol) != 3) throw GeometryError(ErrorCode::DegenerateFace, "three face vertices are collinear");
  }
  InscribedConicFamily f;
  f.plane_ = info.u.leftCols(3);
  for (int k = 0; k < 4; ++k) f.q_[static_cast<std::size_t>(k)] = f.plane_.transpose() * m.col(k);
  f.a_ = f.q_[1] * f.q_[2].transpose() + f.q_[2] * f.q_[1].transpose();
  f.b_ = f.q_[0] * f.q_[3].transpose() + f.q_[3] * f.q_[0].transpose();
  return f;
}

InscribedConicFamily InscribedConicFamily::of_face(const QNet& net, int i, int j, const Tolerance& tol) {
  return of_face(net.at(i, j).coords(), net.at(i + 1, j).coords(), net.at(i, j + 1).coords(),
                 net.at(i + 1, j + 1).coords(), tol);
}

Eigen::Vector3d InscribedConicFamily::edge_line(Edge e) const {
  const EdgeVertices ev = edge_vertices(e);
  return q(ev.first).cross(q(ev.second));
}

Eigen::Matrix3d InscribedConicFamily::primal(double wa, double wb) const { return adjugate(dual(wa, wb)); }

Eigen::VectorXd InscribedConicFamily::contact(Edge e, double wa, double wb) const {
  const Eigen::Vector3d c = dual(wa, wb) * edge_line(e);
  return plane_ * c;
}

Eigen::Vector2d InscribedConicFamily::params_from_contact(Edge e, const Eigen::VectorXd& c, const Tolerance& tol) const {
  if (c.size() != plane_.rows()) throw GeometryError(ErrorCode::MixedAmbient, "contact point");
  const EdgeVertices ev = edge_vertices(e);
  const Eigen::VectorXd cn = c.normalized();
  const Eigen::Vector3d cp = plane_.transpose() * cn;
  Eigen::Matrix<double, 3, 2> basis;
  basis << q(ev.a_point), q(ev.b_point);
  Eigen::MatrixXd with_c(plane_.rows(), 3);
  with_c << plane_ * basis, cn;
  if (numerical_rank(with_c, tol) > 2)
    throw GeometryError(ErrorCode::OffEdge, "contact point is not on the edge line");
  const HPoint ch(cn);
  if (same_point(ch, HPoint(Eigen::VectorXd(plane_ * q(ev.a_point))), tol) ||
      same_point(ch, HPoint(Eigen::VectorXd(plane_ * q(ev.b_point))), tol))
    throw GeometryError(ErrorCode::VertexContact, "contact point coincides with a vertex");
  const Eigen::Vector2d uv = basis.colPivHouseholderQr().solve(cp);
  const Eigen::Vector3d l = edge_line(e);
  const double alpha = l.dot(q(ev.a_other));
  const double beta = l.dot(q(ev.b_other));
  Eigen::Vector2d w(uv[0] * beta, uv[1] * alpha);
  return w / w.norm();
}

double InscribedConicFamily::harmonic_value(double wa, double wb, const Tolerance& tol) const {
  const ContactPoints cp = contact_points(*this, wa, wb);
  auto local = [&](const Eigen::VectorXd& x) { return Eigen::Vector3d(plane_.transpose() * x); };
  const Eigen::Vector3d d1 = q(0).cross(q(3));
  const Eigen::Vector3d d2 = q(1).cross(q(2));
  const Eigen::Vector3d sl = local(cp.bottom).cross(local(cp.top));
  const Eigen::Vector3d tl = local(cp.left).cross(local(cp.right));
  const HPoint hd1{Eigen::VectorXd(d1)}, hd2{Eigen::VectorXd(d2)};
  const HPoint hs{Eigen::VectorXd(sl)}, ht{Eigen::VectorXd(tl)};
  return cross_ratio(hd1, hs, hd2, ht, line_through(hd1, hd2, tol), tol);
}

bool InscribedConicFamily::excluded(double wa, double wb, const Tolerance& tol) {
  const double big = std::max(std::abs(wa), std::abs(wb));
  return !(big > 0.0) || std::abs(wa) <= tol.rank_rel * big || std::abs(wb) <= tol.rank_rel * big;
}

ConicFromContact conic_from_contact(const InscribedConicFamily& family, Edge e, const Eigen::VectorXd& contact,
                                    const Tolerance& tol) {
  const Eigen::Vector2d w = family.params_from_contact(e, contact, tol);
  ConicFromContact out;
  out.wa = w[0];
  out.wb = w[1];
  out.t = w[0] / (w[0] + w[1]);
  out.primal = family.primal(w[0], w[1]);
  return out;
}

ContactPoints contact_points(const InscribedConicFamily& family, double wa, double wb) {
  return {family.contact(Edge::Bottom, wa, wb), family.contact(Edge::Top, wa, wb),
          family.contact(Edge::Left, wa, wb), family.contact(Edge::Right, wa, wb)};
}

// ---------------------------------------------------------------------------

namespace {

struct Slots {
  int a, b;
  std::vector<std::optional<Eigen::VectorXd>> s, t;

  std::optional<Eigen::VectorXd>& slot(int i, int j, Edge e) {
    switch (e) {
      case Edge::Bottom: return s[static_cast<std::size_t>(j * a + i)];
      case Edge::Top: return s[static_cast<std::size_t>((j + 1) * a + i)];
      case Edge::Left: return t[static_cast<std::size_t>(j * (a + 1) + i)];
      case Edge::Right: return t[static_cast<std::size_t>(j * (a + 1) + i + 1)];
    }
    return s.front();
  }
};

std::vector<InscribedConicFamily> families_of(const QNet& net, const Tolerance& tol) {
  const QNetReport rep = check_qnet(net, tol);
  if (!rep.is_qnet || !rep.is_nondegenerate)
    throw GeometryError(ErrorCode::DegenerateNet, "touching conics need a non-degenerate Q-net");
  if (net.a() < 1 || net.b() < 1) throw GeometryError(ErrorCode::InvalidInput, "net has no faces");
  std::vector<InscribedConicFamily> fam;
  fam.reserve(static_cast<std::size_t>(net.a() * net.b()));
  for (int j = 0; j < net.b(); ++j)
    for (int i = 0; i < net.a(); ++i) fam.push_back(InscribedConicFamily::of_face(net, i, j, tol));
  return fam;
}

Eigen::VectorXd checked_contact(const InscribedConicFamily& f, Edge e, const Eigen::Vector2d& w) {
  const Eigen::VectorXd c = f.contact(e, w[0], w[1]);
  if (!(c.norm() > 0.0)) throw GeometryError(ErrorCode::DegenerateFace, "inscribed member has no contact point");
  return c.normalized();
}

TouchingInstance assemble(const QNet& net, const std::vector<InscribedConicFamily>& fam,
                          const std::vector<Eigen::Vector2d>& w, Slots& slots, const Tolerance& tol) {
  const int a = net.a(), b = net.b();
  TouchingInstance inst;
  inst.a = a;
  inst.b = b;
  for (int f = 0; f < a * b; ++f) {
    const auto& fa = fam[static_cast<std::size_t>(f)];
    const Eigen::Vector2d& wf = w[static_cast<std::size_t>(f)];
    FaceConic fc;
    fc.plane = fa.plane();
    fc.w = wf;
    fc.primal = fa.primal(wf[0], wf[1]);
    fc.degenerate = numerical_rank(fa.dual(wf[0], wf[1]), tol) < 3;
    if (fc.degenerate) {
      // Double-line member: its contacts must be the face's Laplace points.
      const Eigen::Vector3d lm = fa.edge_line(Edge::Bottom).cross(fa.edge_line(Edge::Top));
      const Eigen::Vector3d lp = fa.edge_line(Edge::Left).cross(fa.edge_line(Edge::Right));
      const ContactPoints cp = contact_points(fa, wf[0], wf[1]);
      auto at = [&](const Eigen::VectorXd& c, const Eigen::Vector3d& l) {
        return c.norm() > 0.0 && l.norm() > 0.0 && same_point(HPoint(c), HPoint(Eigen::VectorXd(fa.plane() * l)), tol);
      };
      if (!at(cp.bottom, lm) || !at(cp.top, lm) || !at(cp.left, lp) || !at(cp.right, lp))
        throw GeometryError(ErrorCode::DegenerateFace, "double-line member away from the Laplace points");
    }
    inst.faces.push_back(fc);
  }
  std::vector<HPoint> s, t;
  for (auto& x : slots.s) s.emplace_back(*x);
  for (auto& x : slots.t) t.emplace_back(*x);
  inst.s = QNet(a, b + 1, std::move(s), net.origin_i(), net.origin_j());
  inst.t = QNet(a + 1, b, std::move(t), net.origin_i(), net.origin_j());
  return inst;
}

PropagationResult propagate_core(const QNet& net, int si, int sj, const Eigen::Vector2d& w0, const Tolerance& tol) {
  const std::vector<InscribedConicFamily> fam = families_of(net, tol);
  const int a = net.a(), b = net.b();
  if (si < 0 || sj < 0 || si >= a || sj >= b) throw GeometryError(ErrorCode::IndexOutOfRange, "seed face");
  if (InscribedConicFamily::excluded(w0[0], w0[1], tol))
    throw GeometryError(ErrorCode::InvalidInput, "seed selects a diagonal member");
  Slots slots{a, b, std::vector<std::optional<Eigen::VectorXd>>(static_cast<std::size_t>(a * (b + 1))),
              std::vector<std::optional<Eigen::VectorXd>>(static_cast<std::size_t>((a + 1) * b))};
  std::vector<Eigen::Vector2d> w(static_cast<std::size_t>(a * b), Eigen::Vector2d::Zero());
  std::vector<char> seen(w.size(), 0);
  PropagationResult res;

  std::deque<int> queue{sj * a + si};
  w[static_cast<std::size_t>(sj * a + si)] = w0;
  seen[static_cast<std::size_t>(sj * a + si)] = 1;
  constexpr Edge kOrder[4] = {Edge::Bottom, Edge::Left, Edge::Right, Edge::Top};
  while (!queue.empty()) {
    const int f = queue.front();
    queue.pop_front();
    const int i = f % a, j = f / a;
    const auto& fa = fam[static_cast<std::size_t>(f)];
    for (Edge e : kOrder) {
      const Eigen::VectorXd c = checked_contact(fa, e, w[static_cast<std::size_t>(f)]);
      auto& slot = slots.slot(i, j, e);
      if (!slot) {
        slot = c;
      } else {
        const double r = chordal(*slot, c);
        if (r > res.max_residual) {
          res.max_residual = r;
          res.worst_i = i;
          res.worst_j = j;
        }
      }
      int ni = i, nj = j;
      switch (e) {
        case Edge::Bottom: --nj; break;
        case Edge::Top: ++nj; break;
        case Edge::Left: --ni; break;
        case Edge::Right: ++ni; break;
      }
      if (ni < 0 || nj < 0 || ni >= a || nj >= b) continue;
      const int g = nj * a + ni;
      if (seen[static_cast<std::size_t>(g)]) continue;
      w[static_cast<std::size_t>(g)] = fam[static_cast<std::size_t>(g)].params_from_contact(opposite(e), *slot, tol);
      if (InscribedConicFamily::excluded(w[static_cast<std::size_t>(g)][0], w[static_cast<std::size_t>(g)][1], tol))
        throw GeometryError(ErrorCode::VertexContact, "propagation reached a diagonal member");
      seen[static_cast<std::size_t>(g)] = 1;
      queue.push_back(g);
    }
  }
  res.closed = res.max_residual < tol.residual_abs;
  res.instance = assemble(net, fam, w, slots, tol);
  return res;
}

}  // namespace

PropagationResult propagate_instance(const QNet& net, const InstanceSeed& seed, const Tolerance& tol) {
  return propagate_core(net, seed.i, seed.j, Eigen::Vector2d(seed.wa, seed.wb), tol);
}

PropagationResult propagate_from_contact(const QNet& net, int i, int j, Edge e, const Eigen::VectorXd& contact,
                                         const Tolerance& tol) {
  const InscribedConicFamily fam = InscribedConicFamily::of_face(net, i, j, tol);
  return propagate_core(net, i, j, fam.params_from_contact(e, contact, tol), tol);
}

TouchingInstance require_instance(const PropagationResult& r) {
  if (!r.closed || !r.instance)
    throw GeometryError(ErrorCode::ClosureFailure, "touching conics do not close: residual " +
                                                       std::to_string(r.max_residual) + " at face (" +
                                                       std::to_string(r.worst_i) + "," + std::to_string(r.worst_j) + ")");
  return *r.instance;
}

PropagationResult instance_from_contacts(const QNet& net, const QNet& s, const QNet& t, const Tolerance& tol) {
  const std::vector<InscribedConicFamily> fam = families_of(net, tol);
  const int a = net.a(), b = net.b();
  if (s.cols() != a || s.rows() != b + 1 || t.cols() != a + 1 || t.rows() != b)
    throw GeometryError(ErrorCode::InvalidInput, "contact nets do not match the net");
  Slots slots{a, b, {}, {}};
  for (const auto& p : s.points()) slots.s.emplace_back(p.coords());
  for (const auto& p : t.points()) slots.t.emplace_back(p.coords());
  std::vector<Eigen::Vector2d> w(static_cast<std::size_t>(a * b));
  PropagationResult res;
  for (int j = 0; j < b; ++j) {
    for (int i = 0; i < a; ++i) {
      const auto& fa = fam[static_cast<std::size_t>(j * a + i)];
      Eigen::Vector2d wf = fa.params_from_contact(Edge::Bottom, *slots.slot(i, j, Edge::Bottom), tol);
      w[static_cast<std::size_t>(j * a + i)] = wf;
      for (Edge e : {Edge::Top, Edge::Left, Edge::Right}) {
        const double r = chordal(*slots.slot(i, j, e), checked_contact(fa, e, wf));
        if (r > res.max_residual) {
          res.max_residual = r;
          res.worst_i = i;
          res.worst_j = j;
        }
      }
    }
  }
  res.closed = res.max_residual < tol.residual_abs;
  res.instance = assemble(net, fam, w, slots, tol);
  return res;
}

KoenigsReport is_koenigs(const QNet& net, const Tolerance& tol, double seed_t, int threads) {
  KoenigsReport rep;
  try {
    const PropagationResult pr = propagate_instance(net, InstanceSeed::from_t(seed_t), tol);
    rep.closed = pr.closed;
    rep.closure_residual = pr.max_residual;
    rep.worst_i = pr.worst_i;
    rep.worst_j = pr.worst_j;
  } catch (const GeometryError& e) {
    if (e.code() != ErrorCode::VertexContact && e.code() != ErrorCode::DegenerateFace) throw;
    rep.closed = false;
    rep.closure_residual = std::numeric_limits<double>::infinity();
  }
  if (net.ambient_dim() <= 2 || net_join(net, tol).proj_dim() <= 2) return rep;
  const QNet d = diagonal_net(net, tol);
  const QNetReport dr = check_qnet(d, tol, threads);
  rep.coplanarity = dr.is_qnet ? Coplanarity::Holds : Coplanarity::Fails;
  rep.coplanarity_residual = dr.worst_residual;
  rep.agree = rep.closed == dr.is_qnet;
  return rep;
}

TouchingNetsReport check_touching_nets(const TouchingInstance& inst, const Tolerance& tol) {
  return {check_qnet(inst.s, tol), check_qnet(inst.t, tol)};
}

BinetReport binet_check(const TouchingInstance& inst, const Tolerance& tol) {
  const LaplaceInvariants is = laplace_invariants(inst.s, tol);
  const LaplaceInvariants it = laplace_invariants(inst.t, tol);
  BinetReport r;
  // H^S(i,j) = K^T(i,j)
  for (int j = is.h.j_lo; j <= is.h.j_hi; ++j)
    for (int i = is.h.i_lo; i <= is.h.i_hi; ++i)
      if (!it.k.empty() && it.k.has(i, j)) {
        r.max_hs_kt = std::max(r.max_hs_kt, std::abs(is.h.at(i, j) - it.k.at(i, j)));
        ++r.comparisons;
      }
  // H^T(i+1,j) = K^S(i,j+1)
  for (int j = it.h.j_lo; j <= it.h.j_hi; ++j)
    for (int i = it.h.i_lo; i <= it.h.i_hi; ++i)
      if (!is.k.empty() && is.k.has(i - 1, j + 1)) {
        r.max_ht_ks = std::max(r.max_ht_ks, std::abs(it.h.at(i, j) - is.k.at(i - 1, j + 1)));
        ++r.comparisons;
      }
  if (r.comparisons == 0) throw GeometryError(ErrorCode::StencilOutOfRange, "window too small for the binet check");
  return r;
}

BipartiteHyperplanes bipartite_hyperplanes(const QNet& net, const Tolerance& tol) {
  std::vector<Eigen::VectorXd> even, odd;
  for (int j = 0; j <= net.b(); ++j)
    for (int i = 0; i <= net.a(); ++i) ((i + j) % 2 == 0 ? even : odd).push_back(net.at(i, j).coords());
  auto fit = [&](const std::vector<Eigen::VectorXd>& pts) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(pts.size()), net.ambient_dim() + 1);
    for (std::size_t k = 0; k < pts.size(); ++k) m.row(static_cast<Eigen::Index>(k)) = pts[k].transpose();
    const Eigen::MatrixXd ns = null_space(m, tol);
    if (ns.cols() != 1)
      throw GeometryError(ErrorCode::FitFailed, "parity class fits a " + std::to_string(ns.cols()) +
                                                    "-dimensional family of hyperplanes");
    return Eigen::VectorXd(ns.col(0));
  };
  BipartiteHyperplanes out;
  out.n1 = fit(even);
  out.n2 = fit(odd);
  out.u1 = ProjSubspace::hyperplane(out.n1, tol);
  out.u2 = ProjSubspace::hyperplane(out.n2, tol);
  for (const auto& p : even) out.parity_residual = std::max(out.parity_residual, std::abs(out.n1.dot(p)));
  for (const auto& p : odd) out.parity_residual = std::max(out.parity_residual, std::abs(out.n2.dot(p)));
  if (net.a() >= 1 && net.b() >= 1) {
    const QNet d = diagonal_net(net, tol);
    for (const auto& p : d.points())
      out.diagonal_residual =
          std::max({out.diagonal_residual, std::abs(out.n1.dot(p.coords())), std::abs(out.n2.dot(p.coords()))});
  }
  return out;
}

}  // namespace koenigs
