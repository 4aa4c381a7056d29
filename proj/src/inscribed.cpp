#include "koenigs/inscribed.hpp"

#include "koenigs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace koenigs {

TouchingInstance restrict_instance(const TouchingInstance& inst, int i, int j, int a, int b) {
  if (a < 1 || b < 1 || i < 0 || j < 0 || i + a > inst.a || j + b > inst.b)
    throw GeometryError(ErrorCode::IndexOutOfRange, "instance window");
  TouchingInstance out;
  out.a = a;
  out.b = b;
  for (int jj = 0; jj < b; ++jj)
    for (int ii = 0; ii < a; ++ii) out.faces.push_back(inst.face(i + ii, j + jj));
  out.s = inst.s.sub(i, j, a - 1, b);
  out.t = inst.t.sub(i, j, a, b - 1);
  return out;
}

namespace {

ProjSubspace s_row(const TouchingInstance& inst, int j, int i_first, int i_last, const Tolerance& tol) {
  std::vector<HPoint> pts;
  for (int i = i_first; i <= i_last; ++i) pts.push_back(inst.s.at(i, j));
  return ProjSubspace::of_points(pts, tol);
}

ProjSubspace t_col(const TouchingInstance& inst, int i, int j_first, int j_last, const Tolerance& tol) {
  std::vector<HPoint> pts;
  for (int j = j_first; j <= j_last; ++j) pts.push_back(inst.t.at(i, j));
  return ProjSubspace::of_points(pts, tol);
}

bool outside(const ProjSubspace& sub, const Eigen::VectorXd& y, const Tolerance& tol) {
  Eigen::MatrixXd m(y.size(), sub.basis().cols() + 1);
  m << sub.basis(), y;
  return numerical_rank(m, tol) == sub.basis().cols() + 1;
}

// A point of `space` outside both sub-spaces, as far from them as the
// candidates allow.
Eigen::VectorXd choose_y(const ProjSubspace& space, const ProjSubspace& sub1, const ProjSubspace& sub2,
                         std::uint64_t seed, const Tolerance& tol) {
  const Eigen::MatrixXd& basis = space.basis();
  std::vector<Eigen::VectorXd> cands;
  for (Eigen::Index k = 0; k < basis.cols(); ++k) cands.emplace_back(basis.col(k));
  for (Eigen::Index k = 0; k < basis.cols(); ++k)
    for (Eigen::Index l = k + 1; l < basis.cols(); ++l)
      cands.emplace_back((basis.col(k) + basis.col(l)).normalized());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int r = 0; r < 64; ++r) {
    Eigen::VectorXd c(basis.cols());
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = gauss(rng);
    cands.emplace_back((basis * c).normalized());
  }
  double best = -1.0;
  Eigen::VectorXd pick;
  for (const auto& y : cands) {
    if (!outside(sub1, y, tol) || !outside(sub2, y, tol)) continue;
    const HPoint h(y);
    const double score = std::min(sub1.residual(h), sub2.residual(h));
    if (score > best) {
      best = score;
      pick = y;
    }
  }
  if (best < 0.0) throw GeometryError(ErrorCode::YSelectionFailed, "no admissible point in the contact space");
  return pick;
}

struct Built {
  SubspaceQuadric quadric;
  bool base_locus = false;
};

Built build_rec(const QNet& net, const TouchingInstance& inst, const Tolerance& tol, SplitPolicy policy,
                std::uint64_t seed) {
  const int a = net.a(), b = net.b();
  if (a == 1 && b == 1) {
    const FaceConic& f = inst.face(0, 0);
    return {{ProjSubspace::from_orthonormal(f.plane), f.primal}, false};
  }
  const ProjSubspace join = net_join(net, tol);
  if (join.proj_dim() != a + b) throw GeometryError(ErrorCode::NotExtensive, "net is not extensive");

  bool split_j = false;
  switch (policy) {
    case SplitPolicy::Auto: split_j = b >= a; break;
    case SplitPolicy::PreferJ: split_j = b >= 2; break;
    case SplitPolicy::PreferI: split_j = a < 2; break;
  }
  Built lo, hi;
  ProjSubspace yspace, sub1, sub2;
  if (split_j) {
    lo = build_rec(net.sub(0, 0, a, b - 1), restrict_instance(inst, 0, 0, a, b - 1), tol, policy, seed + 1);
    hi = build_rec(net.sub(0, 1, a, b - 1), restrict_instance(inst, 0, 1, a, b - 1), tol, policy, seed + 2);
    yspace = t_col(inst, 0, 0, b - 1, tol);
    sub1 = t_col(inst, 0, 0, b - 2, tol);
    sub2 = t_col(inst, 0, 1, b - 1, tol);
  } else {
    lo = build_rec(net.sub(0, 0, a - 1, b), restrict_instance(inst, 0, 0, a - 1, b), tol, policy, seed + 1);
    hi = build_rec(net.sub(1, 0, a - 1, b), restrict_instance(inst, 1, 0, a - 1, b), tol, policy, seed + 2);
    yspace = s_row(inst, 0, 0, a - 1, tol);
    sub1 = s_row(inst, 0, 0, a - 2, tol);
    sub2 = s_row(inst, 0, 1, a - 1, tol);
  }
  const Eigen::MatrixXd& frame = join.basis();
  const QuadricPencil pencil = glue_pencil(reexpress(lo.quadric, frame, tol), reexpress(hi.quadric, frame, tol), tol);
  const Eigen::VectorXd y = choose_y(yspace, sub1, sub2, seed, tol);
  const PencilMember member = pencil_member_through(pencil, HPoint(Eigen::VectorXd(frame.transpose() * y)), tol);
  return {{join, member.form.matrix()}, member.base_locus || lo.base_locus || hi.base_locus};
}

}  // namespace

InscribedQuadricResult build_inscribed_quadric(const QNet& net, const TouchingInstance& inst, const Tolerance& tol,
                                               SplitPolicy policy, std::uint64_t seed) {
  if (inst.a != net.a() || inst.b != net.b()) throw GeometryError(ErrorCode::InvalidInput, "instance does not match the net");
  if (!is_extensive(net, tol)) throw GeometryError(ErrorCode::NotExtensive, "net is not extensive");
  const Built built = build_rec(net, inst, tol, policy, seed);
  InscribedQuadricResult out;
  out.frame = built.quadric.carrier.basis();
  out.frame_form = built.quadric.form;
  out.quadric = embed_form(out.frame_form, out.frame);
  out.base_locus_warning = built.base_locus;
  return out;
}

InscribedVerification verify_inscribed(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                       const Tolerance& tol, int threads) {
  if (q.ambient_dim() != net.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "verify_inscribed");
  InscribedVerification v;
  const int a = net.a(), b = net.b();
  std::vector<double> conic(static_cast<std::size_t>(a * b));
  parallel_for(a * b, threads, [&](int f) {
    const FaceConic& fc = inst.faces[static_cast<std::size_t>(f)];
    const Eigen::MatrixXd r = fc.plane.transpose() * q.matrix() * fc.plane;
    conic[static_cast<std::size_t>(f)] = aligned_distance(fc.primal, r);
  });
  for (double c : conic) v.conic_residual = std::max(v.conic_residual, c);

  std::vector<std::pair<ProjSubspace, ProjSubspace>> pairs;
  for (int i = 0; i <= a; ++i) pairs.emplace_back(parameter_space(net, Direction::Col, i, tol), t_col(inst, i, 0, b - 1, tol));
  for (int j = 0; j <= b; ++j) pairs.emplace_back(parameter_space(net, Direction::Row, j, tol), s_row(inst, j, 0, a - 1, tol));
  std::vector<double> iso(pairs.size()), tan(pairs.size());
  parallel_for(static_cast<int>(pairs.size()), threads, [&](int k) {
    const auto& [space, contact] = pairs[static_cast<std::size_t>(k)];
    iso[static_cast<std::size_t>(k)] = isotropy_residual(q, contact);
    tan[static_cast<std::size_t>(k)] = tangency_residual(q, space, contact, tol);
  });
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    v.isotropy_residual = std::max(v.isotropy_residual, iso[k]);
    v.tangency_residual = std::max(v.tangency_residual, tan[k]);
    if (tan[k] > tol.residual_abs) v.all_tangent = false;
    ++v.tangency_checks;
  }
  return v;
}

std::vector<HPoint> conic_samples(const TouchingInstance& inst, int i, int j, int count) {
  const FaceConic& fc = inst.face(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(fc.primal);
  const Eigen::Vector3d ev = es.eigenvalues();
  const Eigen::Matrix3d vec = es.eigenvectors();
  const double big = ev.cwiseAbs().maxCoeff();
  const Tolerance tol;
  std::vector<int> pos, neg, zero;
  for (int k = 0; k < 3; ++k) {
    if (std::abs(ev[k]) <= tol.rank_rel * big)
      zero.push_back(k);
    else
      (ev[k] > 0 ? pos : neg).push_back(k);
  }
  if (pos.size() < neg.size()) std::swap(pos, neg);
  std::vector<HPoint> out;
  for (int s = 0; s < count; ++s) {
    const double th = 2.0 * std::numbers::pi * (s + 0.5) / count;
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    if (pos.size() == 2 && neg.size() == 1) {
      x = vec.col(pos[0]) * std::cos(th) / std::sqrt(std::abs(ev[pos[0]])) +
          vec.col(pos[1]) * std::sin(th) / std::sqrt(std::abs(ev[pos[1]])) +
          vec.col(neg[0]) / std::sqrt(std::abs(ev[neg[0]]));
    } else if (pos.size() == 1 && zero.size() == 2) {
      x = vec.col(zero[0]) * std::cos(th) + vec.col(zero[1]) * std::sin(th);
    } else if (pos.size() == 1 && neg.size() == 1) {
      const double sgn = s % 2 == 0 ? 1.0 : -1.0;
      x = vec.col(pos[0]) / std::sqrt(std::abs(ev[pos[0]])) + sgn * vec.col(neg[0]) / std::sqrt(std::abs(ev[neg[0]])) +
          vec.col(zero[0]) * std::tan(0.45 * (th - std::numbers::pi));
    } else {
      break;  // no real points
    }
    out.emplace_back(Eigen::VectorXd(fc.plane * x));
  }
  return out;
}

std::vector<QuadricForm> oracle_inscribed(const QNet& net, const TouchingInstance& inst, const Tolerance& tol) {
  std::vector<HPoint> pts;
  for (int j = 0; j < inst.b; ++j)
    for (int i = 0; i < inst.a; ++i) {
      const auto s = conic_samples(inst, i, j, 12);
      pts.insert(pts.end(), s.begin(), s.end());
    }
  std::vector<ProjSubspace> spaces;
  for (int i = 0; i <= net.a(); ++i) spaces.push_back(t_col(inst, i, 0, net.b() - 1, tol));
  for (int j = 0; j <= net.b(); ++j) spaces.push_back(s_row(inst, j, 0, net.a() - 1, tol));
  return fit_quadric_oracle(pts, spaces, tol);
}

SingularReport singular_analysis(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                 const Tolerance& tol) {
  const int a = net.a(), b = net.b();
  std::vector<ProjSubspace> rows, cols;
  for (int j = 0; j <= b; ++j) rows.push_back(s_row(inst, j, 0, a - 1, tol));
  for (int i = 0; i <= a; ++i) cols.push_back(t_col(inst, i, 0, b - 1, tol));
  SingularReport r;
  r.x = meet(rows, tol);
  r.y = meet(cols, tol);
  r.singular = singular_locus(q, tol);
  r.x_singular = r.x.is_empty() || r.singular.contains(r.x, tol);
  r.y_singular = r.y.is_empty() || r.singular.contains(r.y, tol);
  r.bounds_ok = r.x.proj_dim() >= a - b - 1 && r.y.proj_dim() >= b - a - 1;
  // A singular point outside X (resp. Y) raises the bound by one.
  if (a >= b && r.singular.proj_dim() > r.x.proj_dim() && r.x.proj_dim() < a - b) r.bounds_ok = false;
  if (b >= a && r.singular.proj_dim() > r.y.proj_dim() && r.y.proj_dim() < b - a) r.bounds_ok = false;
  return r;
}

DiagonalCorollaryReport diagonal_corollary_check(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                                 int k_max, const Tolerance& tol) {
  DiagonalCorollaryReport r;
  if (k_max <= 0) return r;
  const QNet d = diagonal_net(net, tol);
  if (d.a() >= 1 && d.b() >= 1) {
    const QNet d1 = laplace_transform(d, 1, tol);
    const QNet dm1 = laplace_transform(d, -1, tol);
    for (int j = 0; j <= d1.b(); ++j)
      for (int i = 0; i <= d1.a(); ++i) {
        const ProjSubspace tv = line_through(inst.t.at(i + 1, j), inst.t.at(i + 1, j + 1), tol);
        const ProjSubspace sh = line_through(inst.s.at(i, j + 1), inst.s.at(i + 1, j + 1), tol);
        r.contact_residual = std::max({r.contact_residual, tv.residual(d1.at(i, j)), sh.residual(dm1.at(i, j))});
      }
  }
  for (int k = 1; k <= k_max; ++k) {
    for (int sign : {1, -1}) {
      const IteratedLaplace it = iterated_laplace(d, sign * k, tol);
      if (!it.net) return r;  // the statement only covers transforms that exist
      const QNet& dk = *it.net;
      if (sign > 0) {
        for (int i = 0; i <= dk.a(); ++i) {
          r.isotropy_residual = std::max(r.isotropy_residual, isotropy_residual(q, parameter_space(dk, Direction::Col, i, tol)));
          ++r.spaces_checked;
        }
      } else {
        for (int j = 0; j <= dk.b(); ++j) {
          r.isotropy_residual = std::max(r.isotropy_residual, isotropy_residual(q, parameter_space(dk, Direction::Row, j, tol)));
          ++r.spaces_checked;
        }
      }
    }
    r.k_checked = k;
  }
  return r;
}

DoliwaReport doliwa_conics(const QNet& net, const QuadricForm& q, const Tolerance& tol) {
  const QNet d = diagonal_net(net, tol);
  if (d.a() < 3 || d.b() < 3)
    throw GeometryError(ErrorCode::StencilOutOfRange, "six Laplace points need a Σ_{4,4} window");
  const QNet d1 = laplace_transform(d, 1, tol);
  const QNet dm1 = laplace_transform(d, -1, tol);
  DoliwaReport rep;
  for (int j = 1; j <= d.b() - 2; ++j) {
    for (int i = 1; i <= d.a() - 2; ++i) {
      if (!d1.has(i + 1, j) || !dm1.has(i, j + 1)) continue;
      DoliwaConic c;
      c.i = i;
      c.j = j;
      c.plane = ProjSubspace::of_points({d.at(i, j), d.at(i + 1, j), d.at(i, j + 1)}, tol).basis();
      c.form = c.plane.transpose() * q.matrix() * c.plane;
      c.rank_deficient = numerical_rank(c.form, tol) < 3;
      for (const HPoint* p : {&d1.at(i - 1, j), &d1.at(i, j), &d1.at(i + 1, j), &dm1.at(i, j - 1), &dm1.at(i, j),
                              &dm1.at(i, j + 1)}) {
        // The point must lie in the plane and on Q.
        const ProjSubspace plane = ProjSubspace::from_orthonormal(c.plane);
        c.max_residual = std::max({c.max_residual, plane.residual(*p), std::abs(evaluate(q, *p, *p))});
      }
      rep.max_residual = std::max(rep.max_residual, c.max_residual);
      rep.conics.push_back(std::move(c));
    }
  }
  if (rep.conics.empty()) throw GeometryError(ErrorCode::StencilOutOfRange, "no vertex with all six Laplace points");
  return rep;
}

}  // namespace koenigs
