#include "koenigs/qnet.hpp"

#include "koenigs/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace koenigs {

QNet::QNet(int cols, int rows, std::vector<HPoint> points, int origin_i, int origin_j)
    : cols_(cols), rows_(rows), origin_i_(origin_i), origin_j_(origin_j), points_(std::move(points)) {
  if (cols < 1 || rows < 1) throw GeometryError(ErrorCode::InvalidInput, "net window must be nonempty");
  if (points_.size() != static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows))
    throw GeometryError(ErrorCode::InvalidInput, "point count does not match the window");
  ambient_dim_ = points_.front().ambient_dim();
  for (const auto& p : points_)
    if (p.ambient_dim() != ambient_dim_) throw GeometryError(ErrorCode::MixedAmbient, "net points");
}

const HPoint& QNet::at(int i, int j) const {
  if (!has(i, j))
    throw GeometryError(ErrorCode::IndexOutOfRange,
                        "vertex (" + std::to_string(i) + "," + std::to_string(j) + ") outside the window");
  return points_[static_cast<std::size_t>(j) * cols_ + i];
}

QNet QNet::sub(int i, int j, int a, int b) const {
  if (a < 0 || b < 0 || !has(i, j) || !has(i + a, j + b))
    throw GeometryError(ErrorCode::IndexOutOfRange, "subwindow outside the net");
  std::vector<HPoint> pts;
  pts.reserve(static_cast<std::size_t>((a + 1) * (b + 1)));
  for (int jj = 0; jj <= b; ++jj)
    for (int ii = 0; ii <= a; ++ii) pts.push_back(at(i + ii, j + jj));
  return QNet(a + 1, b + 1, std::move(pts), origin_i_ + i, origin_j_ + j);
}

QNet QNet::transposed() const {
  std::vector<HPoint> pts;
  pts.reserve(points_.size());
  for (int i = 0; i < cols_; ++i)
    for (int j = 0; j < rows_; ++j) pts.push_back(at(i, j));
  return QNet(rows_, cols_, std::move(pts), origin_j_, origin_i_);
}

QNet QNet::mapped(const Eigen::MatrixXd& m) const {
  if (m.cols() != ambient_dim_ + 1) throw GeometryError(ErrorCode::MixedAmbient, "QNet::mapped");
  std::vector<HPoint> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.emplace_back(Eigen::VectorXd(m * p.coords()));
  return QNet(cols_, rows_, std::move(pts), origin_i_, origin_j_);
}

namespace {

Eigen::MatrixXd stack(std::initializer_list<const HPoint*> pts) {
  Eigen::MatrixXd m((*pts.begin())->coords().size(), static_cast<Eigen::Index>(pts.size()));
  Eigen::Index c = 0;
  for (const HPoint* p : pts) m.col(c++) = p->coords();
  return m;
}

HPoint meet_of_lines(const HPoint& a, const HPoint& b, const HPoint& c, const HPoint& d, const Tolerance& tol) {
  const ProjSubspace l1 = line_through(a, b, tol);
  const ProjSubspace l2 = line_through(c, d, tol);
  if (l1.proj_dim() != 1 || l2.proj_dim() != 1) throw GeometryError(ErrorCode::DegenerateNet, "edge collapses to a point");
  return meet_point(l1, l2, ErrorCode::DegenerateNet, tol);
}

void require_nondegenerate(const QNet& net, const Tolerance& tol) {
  const QNetReport r = check_qnet(net, tol);
  if (!r.is_nondegenerate) throw GeometryError(ErrorCode::DegenerateNet, "net is degenerate");
}

}  // namespace

QNetReport check_qnet(const QNet& net, const Tolerance& tol, int threads) {
  QNetReport report;
  const int a = net.a(), b = net.b();
  // Edges.
  for (int j = 0; j <= b; ++j)
    for (int i = 0; i < a; ++i)
      if (same_point(net.at(i, j), net.at(i + 1, j), tol)) report.is_nondegenerate = false;
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j < b; ++j)
      if (same_point(net.at(i, j), net.at(i, j + 1), tol)) report.is_nondegenerate = false;

  const int faces = a * b;
  std::vector<double> residual(static_cast<std::size_t>(std::max(faces, 0)), 0.0);
  std::vector<char> planar(residual.size(), 1), nondeg(residual.size(), 1);
  parallel_for(faces, threads, [&](int f) {
    const int i = f % a, j = f / a;
    const HPoint& p00 = net.at(i, j);
    const HPoint& p10 = net.at(i + 1, j);
    const HPoint& p01 = net.at(i, j + 1);
    const HPoint& p11 = net.at(i + 1, j + 1);
    const RankInfo info = rank_info(stack({&p00, &p10, &p01, &p11}), tol);
    const auto& s = info.singular_values;
    residual[static_cast<std::size_t>(f)] = s.size() >= 4 && s[0] > 0.0 ? s[3] / s[0] : 0.0;
    planar[static_cast<std::size_t>(f)] = info.rank <= 3;
    const Eigen::MatrixXd triples[4] = {stack({&p10, &p01, &p11}), stack({&p00, &p01, &p11}),
                                        stack({&p00, &p10, &p11}), stack({&p00, &p10, &p01})};
    for (const auto& t : triples)
      if (numerical_rank(t, tol) != 3) nondeg[static_cast<std::size_t>(f)] = 0;
  });
  for (std::size_t f = 0; f < residual.size(); ++f) {
    report.worst_residual = std::max(report.worst_residual, residual[f]);
    if (!planar[f]) report.is_qnet = false;
    if (!nondeg[f]) report.is_nondegenerate = false;
  }
  return report;
}

ProjSubspace parameter_space(const QNet& net, Direction dir, int index, const Tolerance& tol) {
  std::vector<HPoint> pts;
  if (dir == Direction::Row) {
    if (index < 0 || index > net.b()) throw GeometryError(ErrorCode::IndexOutOfRange, "row index");
    for (int i = 0; i <= net.a(); ++i) pts.push_back(net.at(i, index));
  } else {
    if (index < 0 || index > net.a()) throw GeometryError(ErrorCode::IndexOutOfRange, "column index");
    for (int j = 0; j <= net.b(); ++j) pts.push_back(net.at(index, j));
  }
  return ProjSubspace::of_points(pts, tol);
}

ProjSubspace net_join(const QNet& net, const Tolerance& tol) { return ProjSubspace::of_points(net.points(), tol); }

bool is_extensive(const QNet& net, const Tolerance& tol) {
  if (!check_qnet(net, tol).is_nondegenerate) return false;
  return net_join(net, tol).proj_dim() == net.a() + net.b();
}

bool is_patch_extensive(const QNet& net, int c, int d, const Tolerance& tol, int threads) {
  if (c < 0 || d < 0 || c > net.a() || d > net.b()) return false;
  const int ni = net.a() - c + 1, nj = net.b() - d + 1;
  std::vector<char> ok(static_cast<std::size_t>(ni * nj), 0);
  parallel_for(ni * nj, threads, [&](int k) {
    ok[static_cast<std::size_t>(k)] = is_extensive(net.sub(k % ni, k / ni, c, d), tol);
  });
  return std::all_of(ok.begin(), ok.end(), [](char v) { return v != 0; });
}

QNet laplace_transform(const QNet& net, int sign, const Tolerance& tol) {
  if (sign != 1 && sign != -1) throw GeometryError(ErrorCode::InvalidInput, "Laplace sign must be +1 or -1");
  if (net.a() < 1 || net.b() < 1) throw GeometryError(ErrorCode::DegenerateNet, "net has no faces");
  require_nondegenerate(net, tol);
  std::vector<HPoint> pts;
  for (int j = 0; j < net.b(); ++j) {
    for (int i = 0; i < net.a(); ++i) {
      if (sign > 0)
        pts.push_back(meet_of_lines(net.at(i, j), net.at(i, j + 1), net.at(i + 1, j), net.at(i + 1, j + 1), tol));
      else
        pts.push_back(meet_of_lines(net.at(i, j), net.at(i + 1, j), net.at(i, j + 1), net.at(i + 1, j + 1), tol));
    }
  }
  return QNet(net.a(), net.b(), std::move(pts), net.origin_i(), net.origin_j());
}

LaplaceReport laplace_degeneracy(const QNet& transform, int sign, const Tolerance& tol) {
  LaplaceReport r;
  r.exists = true;
  int equal = 0;
  if (sign > 0) {
    for (int j = 0; j <= transform.b(); ++j)
      for (int i = 0; i < transform.a(); ++i) {
        ++r.comparisons;
        if (same_point(transform.at(i, j), transform.at(i + 1, j), tol)) ++equal;
      }
  } else {
    for (int i = 0; i <= transform.a(); ++i)
      for (int j = 0; j < transform.b(); ++j) {
        ++r.comparisons;
        if (same_point(transform.at(i, j), transform.at(i, j + 1), tol)) ++equal;
      }
  }
  r.degenerate = r.comparisons > 0 && equal == r.comparisons;
  r.nowhere_degenerate = r.comparisons > 0 && equal == 0;
  return r;
}

IteratedLaplace iterated_laplace(const QNet& net, int m, const Tolerance& tol, bool check_formula) {
  if (m == 0) throw GeometryError(ErrorCode::InvalidInput, "Laplace order must be nonzero");
  const int sign = m > 0 ? 1 : -1;
  const int order = std::abs(m);
  IteratedLaplace out;
  QNet cur = net;
  for (int k = 1; k <= order; ++k) {
    try {
      cur = laplace_transform(cur, sign, tol);
    } catch (const GeometryError& e) {
      if (e.code() != ErrorCode::DegenerateNet) throw;
      out.report.order_reached = k - 1;
      return out;
    }
    out.report.order_reached = k;
  }
  const int reached = out.report.order_reached;
  out.report = laplace_degeneracy(cur, sign, tol);
  out.report.order_reached = reached;
  if (check_formula) {
    double worst = 0.0;
    for (int j = 0; j <= cur.b(); ++j) {
      for (int i = 0; i <= cur.a(); ++i) {
        std::vector<ProjSubspace> spaces;
        for (int k = 0; k <= order; ++k)
          spaces.push_back(sign > 0 ? parameter_space(net, Direction::Col, i + k, tol)
                                    : parameter_space(net, Direction::Row, j + k, tol));
        const ProjSubspace x = meet(spaces, tol);
        worst = std::max(worst, x.proj_dim() == 0 ? point_distance(x.point(), cur.at(i, j)) : 1.0);
      }
    }
    out.report.formula_residual = worst;
  }
  out.net = std::move(cur);
  return out;
}

QNet diagonal_net(const QNet& net, const Tolerance& tol) {
  if (net.a() < 1 || net.b() < 1) throw GeometryError(ErrorCode::DegenerateNet, "net has no faces");
  require_nondegenerate(net, tol);
  std::vector<HPoint> pts;
  for (int j = 0; j < net.b(); ++j)
    for (int i = 0; i < net.a(); ++i)
      pts.push_back(meet_of_lines(net.at(i, j), net.at(i + 1, j + 1), net.at(i + 1, j), net.at(i, j + 1), tol));
  return QNet(net.a(), net.b(), std::move(pts), net.origin_i(), net.origin_j());
}

double EdgeField::at(int i, int j) const {
  if (!has(i, j)) throw GeometryError(ErrorCode::StencilOutOfRange, "edge value undefined at the boundary");
  return values[static_cast<std::size_t>((j - j_lo) * (i_hi - i_lo + 1) + (i - i_lo))];
}

LaplaceInvariants laplace_invariants(const QNet& net, const Tolerance& tol) {
  const int a = net.a(), b = net.b();
  if (a < 2 && b < 2) throw GeometryError(ErrorCode::StencilOutOfRange, "window too small for Laplace invariants");
  LaplaceInvariants out;
  if (a >= 2 && b >= 1) {
    const QNet p1 = laplace_transform(net, 1, tol);
    out.h = {1, a - 1, 0, b - 1, {}};
    for (int j = 0; j <= b - 1; ++j)
      for (int i = 1; i <= a - 1; ++i) {
        const ProjSubspace carrier = line_through(net.at(i, j), net.at(i, j + 1), tol);
        out.h.values.push_back(cross_ratio(net.at(i, j), p1.at(i, j), net.at(i, j + 1), p1.at(i - 1, j), carrier, tol));
      }
  }
  if (b >= 2 && a >= 1) {
    const QNet m1 = laplace_transform(net, -1, tol);
    out.k = {0, a - 1, 1, b - 1, {}};
    for (int j = 1; j <= b - 1; ++j)
      for (int i = 0; i <= a - 1; ++i) {
        const ProjSubspace carrier = line_through(net.at(i, j), net.at(i + 1, j), tol);
        out.k.values.push_back(cross_ratio(net.at(i, j), m1.at(i, j), net.at(i + 1, j), m1.at(i, j - 1), carrier, tol));
      }
  }
  return out;
}

namespace {

// One lifting step RP^m -> RP^{m+1}; the fiber of P(i,j) is P(i,j) v e_{m+1}.
std::optional<QNet> lift_once(const QNet& net, std::mt19937_64& rng, const Tolerance& tol) {
  const int m = net.ambient_dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<HPoint> out(net.points().size());
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * net.cols() + i; };
  Eigen::VectorXd up = Eigen::VectorXd::Zero(m + 2);
  up[m + 1] = 1.0;
  for (int j = 0; j <= net.b(); ++j) {
    for (int i = 0; i <= net.a(); ++i) {
      Eigen::VectorXd base = Eigen::VectorXd::Zero(m + 2);
      base.head(m + 1) = net.at(i, j).coords();
      if (i == 0 || j == 0) {
        base[m + 1] = gauss(rng);
        out[idx(i, j)] = HPoint(base);
        continue;
      }
      const ProjSubspace plane =
          ProjSubspace::of_points({out[idx(i - 1, j - 1)], out[idx(i, j - 1)], out[idx(i - 1, j)]}, tol);
      Eigen::MatrixXd fb(m + 2, 2);
      fb << base, up;
      const ProjSubspace fiber = ProjSubspace::span(fb, tol);
      const ProjSubspace x = meet(plane, fiber, tol);
      if (x.proj_dim() != 0) return std::nullopt;
      out[idx(i, j)] = x.point();
    }
  }
  return QNet(net.cols(), net.rows(), std::move(out), net.origin_i(), net.origin_j());
}

}  // namespace

Lift lift_extensive(const QNet& net, std::uint64_t seed, const Tolerance& tol) {
  const QNetReport rep = check_qnet(net, tol);
  if (!rep.is_qnet || !rep.is_nondegenerate) throw GeometryError(ErrorCode::DegenerateNet, "lift needs a non-degenerate Q-net");
  const int target = net.a() + net.b();
  const int n = net.ambient_dim();
  const int have = net_join(net, tol).proj_dim();
  if (have == target)
    return {net, ProjMap(Eigen::MatrixXd::Identity(n + 1, n + 1))};

  constexpr int kRetries = 32;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < kRetries; ++attempt) {
    QNet cur = net;
    bool ok = true;
    for (int step = have; step < target && ok; ++step) {
      auto next = lift_once(cur, rng, tol);
      if (!next) {
        ok = false;
        break;
      }
      cur = std::move(*next);
      if (net_join(cur, tol).proj_dim() != step + 1) ok = false;
    }
    if (!ok || !is_extensive(cur, tol)) continue;
    const int big = cur.ambient_dim();
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(n + 1, big + 1);
    proj.leftCols(n + 1).setIdentity();
    Eigen::MatrixXd center = Eigen::MatrixXd::Zero(big + 1, big - n);
    center.bottomRows(big - n).setIdentity();
    return {cur, ProjMap(proj, ProjSubspace::span(center, tol))};
  }
  throw GeometryError(ErrorCode::LiftFailed, "no extensive lift found within the retry budget");
}

double net_distance(const QNet& x, const QNet& y) {
  if (x.cols() != y.cols() || x.rows() != y.rows()) throw GeometryError(ErrorCode::InvalidInput, "net shapes differ");
  double worst = 0.0;
  for (std::size_t k = 0; k < x.points().size(); ++k)
    worst = std::max(worst, point_distance(x.points()[k], y.points()[k]));
  return worst;
}

}  // namespace koenigs
