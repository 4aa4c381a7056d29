#include "koenigs/autoconjugate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace koenigs {

DCurve::DCurve(std::vector<HPoint> points) : points_(std::move(points)) {
  for (const auto& p : points_)
    if (p.ambient_dim() != points_.front().ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "curve");
}

const HPoint& DCurve::at(int k) const {
  if (k < 0 || k >= size()) throw GeometryError(ErrorCode::IndexOutOfRange, "curve index " + std::to_string(k));
  return points_[static_cast<std::size_t>(k)];
}

DCurve DCurve::window(int k0, int count) const {
  if (k0 < 0 || count < 0 || k0 + count > size()) throw GeometryError(ErrorCode::IndexOutOfRange, "curve window");
  return DCurve(std::vector<HPoint>(points_.begin() + k0, points_.begin() + k0 + count));
}

namespace {

Eigen::MatrixXd stacked(const DCurve& c, int j, int k) {
  Eigen::MatrixXd m(c.ambient_dim() + 1, k + 1);
  for (int b = 0; b <= k; ++b) m.col(b) = c.at(j + b).coords();
  return m;
}

// Calls f(S-block, T-block) for every join of the pair genericity test.
template <class F>
void for_each_pair_join(const CurvePair& p, F&& f) {
  const int n = p.sigma.ambient_dim();
  for (int k = -1; k <= n; ++k) {
    const int kt = n - k - 1;
    for (int j = 0; j + k < p.sigma.size(); ++j)
      for (int i = 0; i + kt < p.tau.size(); ++i) {
        Eigen::MatrixXd m(n + 1, n + 1);
        if (k >= 0) m.leftCols(k + 1) = stacked(p.sigma, j, k);
        if (kt >= 0) m.rightCols(kt + 1) = stacked(p.tau, i, kt);
        f(m);
      }
  }
}

void require_pair_windows(const CurvePair& p) {
  const int n = p.sigma.ambient_dim();
  if (p.tau.ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "curve pair");
  if (p.sigma.size() < n + 1 || p.tau.size() < n + 1)
    throw GeometryError(ErrorCode::WindowTooSmall, "pair genericity needs n+1 points on each curve");
}

DCurve grow_curve(int d, int length, const Eigen::MatrixXd& m, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Tolerance tol;
  const int n = 2 * d;
  std::vector<HPoint> pts;
  auto random_vec = [&](int size) {
    Eigen::VectorXd v(size);
    for (int k = 0; k < size; ++k) v[k] = gauss(rng);
    return v;
  };
  for (int k = 0; k < length; ++k) {
    // Conjugate to the previous d-1 points, on the quadric.
    const int back = std::min(k, d - 1);
    Eigen::MatrixXd free = Eigen::MatrixXd::Identity(n + 1, n + 1);
    if (back > 0) {
      Eigen::MatrixXd c(back, n + 1);
      for (int b = 0; b < back; ++b) c.row(b) = (m * pts[static_cast<std::size_t>(k - back + b)].coords()).transpose();
      free = null_space(c, tol);
    }
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const Eigen::VectorXd u = free * random_vec(static_cast<int>(free.cols()));
      const Eigen::VectorXd w = free * random_vec(static_cast<int>(free.cols()));
      const double qa = w.dot(m * w), qb = u.dot(m * w), qc = u.dot(m * u);
      const double disc = qb * qb - qa * qc;
      if (disc < 0.0 || std::abs(qa) < 1e-6) continue;
      const double s = (-qb + (gauss(rng) < 0 ? -1.0 : 1.0) * std::sqrt(disc)) / qa;
      pts.emplace_back(Eigen::VectorXd(u + s * w));
      placed = true;
    }
    if (!placed) throw GeometryError(ErrorCode::GenerationFailed, "no real point on the quadric");
  }
  return DCurve(std::move(pts));
}

QNet laplace_or_throw(const QNet& net, int m, const Tolerance& tol) {
  const IteratedLaplace it = iterated_laplace(net, m, tol);
  if (!it.net) throw GeometryError(ErrorCode::DegenerateNet, "Laplace transform of order " + std::to_string(m));
  return *it.net;
}

// Conjugacy of D_d(k) with P_d(k+1-d .. k+d), and the mirror statement.
void polarity(const QNet& grid, int d, const QuadricForm& q, const Tolerance& tol, RoundtripReport& r) {
  for (const QNet& g : {grid, grid.transposed()}) {
    const QNet pd = laplace_or_throw(g, d, tol);
    const QNet dd = laplace_or_throw(diagonal_net(g, tol), d, tol);
    for (int k = d - 1; k <= dd.a() && k + d <= pd.a(); ++k) {
      std::vector<HPoint> nbrs;
      for (int m = k + 1 - d; m <= k + d; ++m) {
        nbrs.push_back(pd.at(m, 0));
        r.polarity_residual = std::max(r.polarity_residual, std::abs(evaluate(q, dd.at(k, 0), pd.at(m, 0))));
      }
      // The 2d neighbours span the polar hyperplane.
      if (ProjSubspace::of_points(nbrs, tol).proj_dim() != 2 * d - 1) r.polarity_residual = 1.0;
      ++r.polarity_checks;
    }
  }
}

}  // namespace

ProjSubspace osculating_space(const DCurve& curve, int j, int k, const Tolerance& tol) {
  if (k < -1) throw GeometryError(ErrorCode::InvalidInput, "osculating order below -1");
  if (k == -1) return ProjSubspace::empty(curve.ambient_dim());
  if (j < 0 || j + k >= curve.size()) throw GeometryError(ErrorCode::IndexOutOfRange, "osculating window");
  return ProjSubspace::span(stacked(curve, j, k), tol);
}

bool is_generic_curve(const DCurve& curve, const Tolerance& tol) {
  const int n = curve.ambient_dim();
  if (curve.size() < n + 1) throw GeometryError(ErrorCode::WindowTooSmall, "generic curve needs n+1 points");
  // Full rank of every n+1 consecutive points implies all lower orders.
  for (int j = 0; j + n < curve.size(); ++j)
    if (numerical_rank(stacked(curve, j, n), tol) != n + 1) return false;
  return true;
}

bool is_generic_pair(const CurvePair& pair, const Tolerance& tol) {
  require_pair_windows(pair);
  bool ok = true;
  for_each_pair_join(pair, [&](const Eigen::MatrixXd& m) {
    if (ok && numerical_rank(m, tol) != m.cols()) ok = false;
  });
  return ok;
}

double pair_margin(const CurvePair& pair) {
  require_pair_windows(pair);
  double worst = 1.0;
  for_each_pair_join(pair, [&](const Eigen::MatrixXd& m) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
    worst = std::min(worst, sv[sv.size() - 1] / sv[0]);
  });
  return worst;
}

bool is_autoconjugate(const DCurve& curve, const QuadricForm& q, int d, const Tolerance& tol) {
  if (d < 1 || curve.ambient_dim() != 2 * d || q.ambient_dim() != 2 * d) return false;
  for (int j = 0; j + d - 1 < curve.size(); ++j)
    if (!is_isotropic(q, osculating_space(curve, j, d - 1, tol), tol)) return false;
  return true;
}

QuadricForm standard_quadric(int d) {
  if (d < 1) throw GeometryError(ErrorCode::InvalidInput, "d must be positive");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * d + 1, 2 * d + 1);
  for (int k = 0; k < d; ++k) m(2 * k, 2 * k + 1) = m(2 * k + 1, 2 * k) = 0.5;
  m(2 * d, 2 * d) = 1.0;
  return QuadricForm(m);
}

CurvePair generate_pair(int d, int length, std::uint64_t seed, const GeneratorOptions& opts) {
  if (d < 1 || length < 2 * d + 2)
    throw GeometryError(ErrorCode::GenerationFailed, "generate_pair needs d >= 1 and length >= 2d+2");
  const QuadricForm q = standard_quadric(d);
  const Tolerance tol;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < opts.retries; ++attempt) {
    CurvePair p;
    p.d = d;
    p.quadric = q;
    try {
      p.sigma = grow_curve(d, length, q.matrix(), rng);
      p.tau = grow_curve(d, length, q.matrix(), rng);
    } catch (const GeometryError& e) {
      if (e.code() != ErrorCode::GenerationFailed) throw;
      continue;
    }
    if (is_generic_pair(p, tol) && pair_margin(p) >= opts.margin) return p;
  }
  throw GeometryError(ErrorCode::GenerationFailed, "no generic pair within the retry budget");
}

CurvesToGrid curves_to_grid(const CurvePair& pair, const Tolerance& tol) {
  const int d = pair.d;
  if (pair.sigma.ambient_dim() != 2 * d || pair.quadric.ambient_dim() != 2 * d)
    throw GeometryError(ErrorCode::MixedAmbient, "pair must live in RP^{2d}");
  if (!is_full_dimensional(pair.quadric.matrix(), tol) || signature(pair.quadric, tol).zero != 0)
    throw GeometryError(ErrorCode::NotGenericPair, "quadric is degenerate");
  if (pair.sigma.size() < 2 * d + 1 || pair.tau.size() < 2 * d + 1 || !is_generic_pair(pair, tol))
    throw GeometryError(ErrorCode::NotGenericPair, "pair is not generic");
  const QuadricForm& q = pair.quadric;
  auto s_perp = [&](int k, int j) { return polar(q, osculating_space(pair.sigma, j, k, tol), tol); };
  auto t_perp = [&](int k, int i) { return polar(q, osculating_space(pair.tau, i, k, tol), tol); };

  const int cols = pair.tau.size() - d + 1, rows = pair.sigma.size() - d + 1;
  std::vector<HPoint> pts;
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i) pts.push_back(meet_point(s_perp(d - 1, j), t_perp(d - 1, i), ErrorCode::NotGenericPair, tol));
  CurvesToGrid out;
  out.grid = QNet(cols, rows, std::move(pts));

  for (int k = 1; k <= d; ++k) {
    const QNet pk = laplace_or_throw(out.grid, k, tol);
    for (int j = 0; j <= pk.b(); ++j)
      for (int i = 0; i <= pk.a(); ++i) {
        const HPoint x = meet_point(s_perp(d - k - 1, j + k), t_perp(d + k - 1, i), ErrorCode::NotGenericPair, tol);
        out.formula_residual = std::max(out.formula_residual, point_distance(x, pk.at(i, j)));
      }
  }
  return out;
}

GridToCurves grid_to_curves(const QNet& grid, int d, const Tolerance& tol) {
  if (!is_generic_grid(grid, d, tol).is_generic) throw GeometryError(ErrorCode::NotGeneric, "grid is not generic");
  const SpecialQuadric sq = special_inscribed_quadric(grid, d, tol);
  GridToCurves out;
  out.instance = sq.instance;
  const int a = grid.a(), b = grid.b();
  std::vector<HPoint> sigma, tau;
  for (int j = 0; j + d - 1 <= b; ++j) {
    std::vector<ProjSubspace> rows;
    for (int k = 0; k < d; ++k) rows.push_back(parameter_space(sq.instance.s, Direction::Row, j + k, tol));
    const ProjSubspace x = meet(rows, tol);
    if (x.proj_dim() != 0) throw GeometryError(ErrorCode::MeetEmpty, "sigma(" + std::to_string(j) + ")");
    sigma.push_back(x.point());
  }
  for (int i = 0; i + d - 1 <= a; ++i) {
    std::vector<ProjSubspace> cols;
    for (int k = 0; k < d; ++k) cols.push_back(parameter_space(sq.instance.t, Direction::Col, i + k, tol));
    const ProjSubspace x = meet(cols, tol);
    if (x.proj_dim() != 0) throw GeometryError(ErrorCode::MeetEmpty, "tau(" + std::to_string(i) + ")");
    tau.push_back(x.point());
  }
  out.pair = CurvePair{DCurve(std::move(sigma)), DCurve(std::move(tau)), sq.quadric, d};

  const QNet diag = diagonal_net(grid, tol);
  const QNet dp = laplace_or_throw(diag, d, tol);
  for (int j = 0; j <= dp.b(); ++j)
    for (int i = 0; i <= dp.a(); ++i)
      out.d_plus_residual = std::max(out.d_plus_residual, point_distance(dp.at(i, j), out.pair.tau.at(i + 1)));
  const QNet dm = laplace_or_throw(diag, -d, tol);
  for (int j = 0; j <= dm.b(); ++j)
    for (int i = 0; i <= dm.a(); ++i)
      out.d_minus_residual = std::max(out.d_minus_residual, point_distance(dm.at(i, j), out.pair.sigma.at(j + 1)));
  return out;
}

double curve_distance(const DCurve& x, const DCurve& y) {
  double worst = 0.0;
  for (int k = 0; k < std::min(x.size(), y.size()); ++k) worst = std::max(worst, point_distance(x.at(k), y.at(k)));
  return worst;
}

double RoundtripReport::max() const {
  return std::max({curve_deviation, grid_deviation, index_residual, polarity_residual});
}

RoundtripReport roundtrip_check(const CurvePair& pair, const Tolerance& tol) {
  const int d = pair.d;
  RoundtripReport r;
  const QNet grid = curves_to_grid(pair, tol).grid;
  const GridToCurves back = grid_to_curves(grid, d, tol);
  const int ls = back.pair.sigma.size(), lt = back.pair.tau.size();
  r.curve_deviation = std::max(curve_distance(back.pair.sigma, pair.sigma.window(d - 1, ls)),
                               curve_distance(back.pair.tau, pair.tau.window(d - 1, lt)));
  r.index_residual = std::max(back.d_plus_residual, back.d_minus_residual);
  const QNet again = curves_to_grid(back.pair, tol).grid;
  r.grid_deviation = net_distance(again, grid.sub(d - 1, d - 1, again.a(), again.b()));
  polarity(grid, d, back.pair.quadric, tol, r);
  return r;
}

RoundtripReport roundtrip_check(const QNet& grid, int d, const Tolerance& tol) {
  RoundtripReport r;
  const GridToCurves curves = grid_to_curves(grid, d, tol);
  r.index_residual = std::max(curves.d_plus_residual, curves.d_minus_residual);
  const QNet again = curves_to_grid(curves.pair, tol).grid;
  r.grid_deviation = net_distance(again, grid.sub(d - 1, d - 1, again.a(), again.b()));
  if (again.a() >= d + 1 && again.b() >= d + 1) {
    const GridToCurves twice = grid_to_curves(again, d, tol);
    r.curve_deviation =
        std::max(curve_distance(twice.pair.sigma, curves.pair.sigma.window(d - 1, twice.pair.sigma.size())),
                 curve_distance(twice.pair.tau, curves.pair.tau.window(d - 1, twice.pair.tau.size())));
  }
  polarity(grid, d, curves.pair.quadric, tol, r);
  return r;
}

}  // namespace koenigs
