#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace koenigs;

namespace {

DCurve moment_curve(int n, int count, double t0 = 0.0) {
  std::vector<HPoint> pts;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd x(n + 1);
    for (int p = 0; p <= n; ++p) x[p] = std::pow(t0 + k, p);
    pts.emplace_back(x);
  }
  return DCurve(std::move(pts));
}

DCurve circle_curve(const std::vector<double>& angles) {
  std::vector<HPoint> pts;
  for (double a : angles) pts.push_back(circle_point(a));
  return DCurve(std::move(pts));
}

CurvePair circle_pair(const std::vector<double>& a, const std::vector<double>& b) {
  return {circle_curve(a), circle_curve(b), QuadricForm(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()), 1};
}

// Closed-form intersection of the tangents at angles alpha and beta.
HPoint tangent_meet(double alpha, double beta) {
  const double m = 0.5 * (alpha + beta), h = 0.5 * (alpha - beta);
  return HPoint{std::cos(m) / std::cos(h), std::sin(m) / std::cos(h), 1.0};
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const GeometryError& e) {
    return e.code();
  }
  FAIL("expected a GeometryError");
  return ErrorCode::InvalidInput;
}

ProjSubspace polar_osc(const QuadricForm& q, const DCurve& c, int j, int k) {
  return polar(q, osculating_space(c, j, k));
}

}  // namespace

TEST_SUITE("autoconjugate") {

TEST_CASE("osculating spaces") {
  const DCurve m = moment_curve(4, 5);
  CHECK(osculating_space(m, 0, 3).proj_dim() == 3);
  CHECK(osculating_space(m, 0, 4).proj_dim() == 4);
  const auto p = osculating_space(m, 2, 0);
  REQUIRE(p.proj_dim() == 0);
  CHECK(same_point(p.point(), m.at(2)));
  CHECK(osculating_space(m, 1, -1).is_empty());
  CHECK(code_of([&] { osculating_space(m, 2, 3); }) == ErrorCode::IndexOutOfRange);
  CHECK(code_of([&] { m.at(5); }) == ErrorCode::IndexOutOfRange);
}

TEST_CASE("generic curves") {
  CHECK(is_generic_curve(moment_curve(4, 9)));
  std::vector<HPoint> pts = moment_curve(4, 9).points();
  pts[4] = pts[3];
  CHECK_FALSE(is_generic_curve(DCurve(pts)));
  CHECK(is_generic_curve(test::fix_ac_pair().sigma));
  CHECK(is_generic_curve(test::fix_ac_pair().tau));
  CHECK(code_of([] { is_generic_curve(moment_curve(4, 4)); }) == ErrorCode::WindowTooSmall);
}

TEST_CASE("osculating intersection law") {
  std::mt19937_64 rng(23);
  std::vector<HPoint> rnd;
  for (int k = 0; k < 10; ++k) rnd.push_back(test::random_point(6, rng));
  const std::vector<DCurve> curves = {moment_curve(4, 9, -4.0), test::fix_ac_pair().sigma, DCurve(rnd)};
  for (const auto& c : curves) {
    const int n = c.ambient_dim();
    for (int k = 0; k < n; ++k)
      for (int l = 0; l <= k && k + l <= n; ++l)
        for (int j = 0; j + l + k < c.size(); ++j) {
          std::vector<ProjSubspace> spaces;
          for (int b = 0; b <= l; ++b) spaces.push_back(osculating_space(c, j + b, k));
          const ProjSubspace lhs = meet(spaces);
          const ProjSubspace rhs = osculating_space(c, j + l, k - l);
          REQUIRE(lhs.proj_dim() == k - l);
          CHECK(lhs.residual(rhs) < 1e-8);
        }
  }
}

TEST_CASE("autoconjugacy") {
  const auto d1 = circle_pair({0.1, 0.9, 1.7, 2.6}, {3.3, 4.0, 4.9, 5.6});
  CHECK(is_autoconjugate(d1.sigma, d1.quadric, 1));

  const auto& p = test::fix_ac_pair();
  CHECK(is_autoconjugate(p.sigma, standard_quadric(2), 2));
  CHECK(is_autoconjugate(p.tau, p.quadric, 2));

  // points on the quadric without the conjugacy of neighbours
  std::mt19937_64 rng(24);
  const auto q = standard_quadric(2);
  std::vector<HPoint> on_q;
  while (on_q.size() < 6) {
    const Eigen::VectorXd u = test::random_vector(5, rng), w = test::random_vector(5, rng);
    const Eigen::MatrixXd& m = q.matrix();
    const double a = w.dot(m * w), b = 2.0 * u.dot(m * w), c = u.dot(m * u);
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) continue;
    on_q.emplace_back(Eigen::VectorXd(u + (-b + std::sqrt(disc)) / (2.0 * a) * w));
  }
  CHECK_FALSE(is_autoconjugate(DCurve(on_q), q, 2));
  CHECK_FALSE(is_autoconjugate(moment_curve(2, 4), q, 2));  // wrong ambient
}

TEST_CASE("generic pairs") {
  const auto& p = test::fix_ac_pair();
  CHECK(is_generic_pair(p));
  CHECK(pair_margin(p) >= 1e-3);

  CurvePair shifted = p;
  shifted.tau = p.sigma.window(1, p.sigma.size() - 1);
  CHECK_FALSE(is_generic_pair(shifted));

  CHECK(is_generic_pair(circle_pair({0.1, 0.9, 1.7, 2.6}, {3.3, 4.0, 4.9, 5.6})));
  CHECK_FALSE(is_generic_pair(circle_pair({0.1, 0.9, 1.7, 2.6}, {3.3, 0.9, 4.9, 5.6})));
}

TEST_CASE("generator") {
  for (int d : {1, 2, 3}) {
    const int len = d < 3 ? 2 * d + 4 : 2 * d + 2;
    const CurvePair p = generate_pair(d, len, 42);
    CHECK(p.d == d);
    CHECK(p.sigma.ambient_dim() == 2 * d);
    CHECK(p.sigma.size() == len);
    CHECK(aligned_distance(p.quadric.matrix(), standard_quadric(d).matrix()) < 1e-12);
    CHECK(is_autoconjugate(p.sigma, p.quadric, d));
    CHECK(is_autoconjugate(p.tau, p.quadric, d));
    CHECK(is_generic_pair(p));
    CHECK(pair_margin(p) >= 1e-3);
    for (const auto& x : p.sigma.points()) CHECK(std::abs(evaluate(p.quadric, x, x)) < 1e-12);
  }
  const CurvePair a = generate_pair(1, 8, 42);
  const CurvePair b = generate_pair(1, 8, 42);
  CHECK(curve_distance(a.sigma, b.sigma) == 0.0);
  CHECK(curve_distance(a.tau, b.tau) == 0.0);
  CHECK(curve_distance(a.sigma, generate_pair(1, 8, 43).sigma) > 1e-3);
  CHECK(code_of([] { generate_pair(2, 5, 1); }) == ErrorCode::GenerationFailed);
  // a looser margin admits longer curves in higher dimension
  CHECK(pair_margin(generate_pair(3, 10, 42, {1e-4, 200})) >= 1e-4);
}

TEST_CASE("curves to grid: tangent lines of a circle") {
  const std::vector<double> a = {0.1, 0.8, 1.5, 2.3, 2.9}, b = {3.4, 4.1, 4.7, 5.5};
  const auto r = curves_to_grid(circle_pair(a, b));
  REQUIRE(r.grid.a() == 3);
  REQUIRE(r.grid.b() == 4);
  for (int j = 0; j <= 4; ++j)
    for (int i = 0; i <= 3; ++i)
      CHECK(point_distance(r.grid.at(i, j), tangent_meet(b[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(j)])) < 1e-12);
  CHECK(r.formula_residual < 1e-9);
  CHECK(code_of([&] { curves_to_grid(circle_pair(a, a)); }) == ErrorCode::NotGenericPair);
}

TEST_CASE("curves to grid: 2-grid") {
  const auto r = curves_to_grid(test::fix_ac_pair());
  CHECK(r.formula_residual < 1e-9);
  CHECK(check_dgrid(r.grid, 2).valid);
  CHECK(is_generic_grid(r.grid, 2).is_generic);
  CHECK(is_koenigs(r.grid).closed);
  CHECK(is_koenigs(r.grid).agree);
}

TEST_CASE("generated maps have the stated dimensions") {
  const auto& p = test::fix_ac_pair();
  const QNet& g = test::fix_ac();
  const int d = 2;
  for (int k = 0; k <= d; ++k) {
    const QNet pk = k == 0 ? g : *iterated_laplace(g, k).net;
    for (int l = 0; l <= d - k; ++l)
      for (int i = 0; i <= pk.a(); ++i)
        for (int j = 0; j + l <= pk.b(); ++j) {
          std::vector<HPoint> pts;
          for (int b = 0; b <= l; ++b) pts.push_back(pk.at(i, j + b));
          const ProjSubspace lhs = ProjSubspace::of_points(pts);
          CHECK(lhs.proj_dim() == l);
          const ProjSubspace rhs =
              meet(polar_osc(p.quadric, p.tau, i, d + k - 1), polar_osc(p.quadric, p.sigma, j + k + l, d - k - l - 1));
          REQUIRE(rhs.proj_dim() == l);
          CHECK(rhs.residual(lhs) < 1e-8);
        }
  }
}

TEST_CASE("transforms of the diagonal net") {
  const auto& p = test::fix_ac_pair();
  const QNet& g = test::fix_ac();
  const int d = 2;
  const QNet dn = diagonal_net(g);
  for (int sign : {1, -1}) {
    for (int k = 1; k <= d; ++k) {
      const auto dk = iterated_laplace(dn, sign * k);
      REQUIRE(dk.net);
      for (const auto& x : dk.net->points()) CHECK(std::abs(evaluate(p.quadric, x, x)) < 1e-8);
    }
    const QNet dd = *iterated_laplace(dn, sign * d).net;
    const QNet pd = *iterated_laplace(g, sign * d).net;
    auto along = [&](const QNet& n, int k) { return sign > 0 ? n.at(k, 0) : n.at(0, k); };
    const int len = sign > 0 ? dd.a() + 1 : dd.b() + 1;
    // d consecutive points span an isotropic space
    for (int k = 0; k + d <= len; ++k) {
      std::vector<HPoint> pts;
      for (int m = 0; m < d; ++m) pts.push_back(along(dd, k + m));
      CHECK(isotropy_residual(p.quadric, ProjSubspace::of_points(pts)) < 1e-8);
    }
    // D_d(k) lies on the line P_d(k) v P_d(k+1)
    for (int k = 0; k < len; ++k)
      CHECK(line_through(along(pd, k), along(pd, k + 1)).residual(along(dd, k)) < 1e-8);
  }
}

TEST_CASE("grid to curves") {
  SUBCASE("tangent grid: contact points of the grid lines") {
    const auto& g = test::fix_tan();
    const auto r = grid_to_curves(g.net, 1);
    REQUIRE(r.pair.sigma.size() == g.net.b() + 1);
    REQUIRE(r.pair.tau.size() == g.net.a() + 1);
    for (int j = 0; j <= g.net.b(); ++j)
      CHECK(point_distance(r.pair.sigma.at(j), circle_point(g.v[static_cast<std::size_t>(j)])) < 1e-9);
    for (int i = 0; i <= g.net.a(); ++i)
      CHECK(point_distance(r.pair.tau.at(i), circle_point(g.u[static_cast<std::size_t>(i)])) < 1e-9);
    CHECK(r.d_plus_residual < 1e-9);
    CHECK(r.d_minus_residual < 1e-9);
  }
  SUBCASE("2-grid: the generating curves, shifted by d - 1") {
    const auto& p = test::fix_ac_pair();
    const auto r = grid_to_curves(test::fix_ac(), 2);
    CHECK(r.d_plus_residual < 1e-8);
    CHECK(r.d_minus_residual < 1e-8);
    CHECK(is_generic_pair(r.pair));
    CHECK(is_autoconjugate(r.pair.sigma, r.pair.quadric, 2));
    CHECK(is_autoconjugate(r.pair.tau, r.pair.quadric, 2));
    const int ls = r.pair.sigma.size(), lt = r.pair.tau.size();
    CHECK(curve_distance(r.pair.sigma, p.sigma.window(1, ls)) < 1e-8);
    CHECK(curve_distance(r.pair.tau, p.tau.window(1, lt)) < 1e-8);
  }
}

TEST_CASE("round trips") {
  const auto tan = roundtrip_check(test::fix_tan().net, 1);
  CHECK(tan.max() < 1e-9);
  CHECK(tan.polarity_checks > 0);

  const auto circle = roundtrip_check(circle_pair({0.1, 0.8, 1.5, 2.3, 2.9, 3.4}, {3.6, 4.1, 4.7, 5.1, 5.5, 6.0}));
  CHECK(circle.max() < 1e-9);

  const auto from_curves = roundtrip_check(test::fix_ac_pair());
  CHECK(from_curves.curve_deviation < 1e-8);
  CHECK(from_curves.grid_deviation < 1e-8);
  CHECK(from_curves.index_residual < 1e-8);
  CHECK(from_curves.polarity_residual < 1e-8);
  CHECK(from_curves.polarity_checks > 0);

  const auto from_grid = roundtrip_check(test::fix_ac(), 2);
  CHECK(from_grid.max() < 1e-8);
  CHECK(from_grid.polarity_checks > 0);

  const auto longer = roundtrip_check(generate_pair(2, 10, 5));
  CHECK(longer.max() < 1e-8);
}

}  // TEST_SUITE
