#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace koenigs;

namespace {

const Eigen::Vector3d kP00(0, 0, 1), kP10(1, 0, 1), kP01(0, 1, 1), kP11(1, 1, 1);

InscribedConicFamily unit_square() { return InscribedConicFamily::of_face(kP00, kP10, kP01, kP11); }

Eigen::Vector2d affine(const Eigen::VectorXd& x) { return Eigen::Vector2d(x[0] / x[2], x[1] / x[2]); }

double projective_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd x = a / a.norm(), y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

QNet random_qnet(int cols, int rows, int n, std::mt19937_64& rng) {
  std::vector<HPoint> pts(static_cast<std::size_t>(cols * rows));
  auto at = [&](int i, int j) -> HPoint& { return pts[static_cast<std::size_t>(j * cols + i)]; };
  std::normal_distribution<double> g(0.0, 1.0);
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      at(i, j) = (i == 0 || j == 0) ? test::random_point(n, rng)
                                    : HPoint(Eigen::VectorXd(g(rng) * at(i - 1, j - 1).coords() +
                                                             g(rng) * at(i, j - 1).coords() +
                                                             g(rng) * at(i - 1, j).coords()));
  return QNet(cols, rows, std::move(pts));
}

}  // namespace

TEST_SUITE("conics") {

TEST_CASE("unit square: contact points are affine in t") {
  const auto f = unit_square();
  for (double t : {0.1, 0.3, 0.5, 0.8}) {
    const Eigen::Vector2d c = affine(f.contact(Edge::Bottom, t, 1.0 - t));
    CHECK(c[0] == doctest::Approx(t));
    CHECK(std::abs(c[1]) < 1e-14);
  }
  // t = 1/2 is the inscribed circle touching at the edge midpoints
  const auto cp = contact_points(f, 0.5, 0.5);
  CHECK((affine(cp.bottom) - Eigen::Vector2d(0.5, 0.0)).norm() < 1e-14);
  CHECK((affine(cp.top) - Eigen::Vector2d(0.5, 1.0)).norm() < 1e-14);
  CHECK((affine(cp.left) - Eigen::Vector2d(0.0, 0.5)).norm() < 1e-14);
  CHECK((affine(cp.right) - Eigen::Vector2d(1.0, 0.5)).norm() < 1e-14);
  Eigen::Matrix3d circle;
  circle << 1, 0, -0.5, 0, 1, -0.5, -0.5, -0.5, 0.25;
  const Eigen::Matrix3d ambient = f.plane() * f.primal(0.5, 0.5) * f.plane().transpose();
  CHECK(projective_distance(ambient, circle) < 1e-12);
}

TEST_CASE("conic from a contact point") {
  const auto f = unit_square();
  const auto c = conic_from_contact(f, Edge::Bottom, Eigen::Vector3d(0.3, 0.0, 1.0));
  CHECK(c.t == doctest::Approx(0.3));
  const auto mid = conic_from_contact(f, Edge::Bottom, Eigen::Vector3d(0.5, 0.0, 1.0));
  CHECK(mid.t == doctest::Approx(0.5));
  Eigen::Matrix3d circle;
  circle << 1, 0, -0.5, 0, 1, -0.5, -0.5, -0.5, 0.25;
  CHECK(projective_distance(f.plane() * mid.primal * f.plane().transpose(), circle) < 1e-12);

  auto code = [&](const Eigen::Vector3d& x) {
    try {
      conic_from_contact(f, Edge::Bottom, x);
    } catch (const GeometryError& e) {
      return e.code();
    }
    return ErrorCode::InvalidInput;
  };
  CHECK(code(kP10) == ErrorCode::VertexContact);
  CHECK(code(Eigen::Vector3d(0.3, 0.2, 1.0)) == ErrorCode::OffEdge);
}

TEST_CASE("diagonal members are excluded") {
  CHECK(InscribedConicFamily::excluded(0.0, 1.0));
  CHECK(InscribedConicFamily::excluded(1.0, 0.0));
  CHECK_FALSE(InscribedConicFamily::excluded(0.4, 0.6));
  // the t = 0 member is the point pair P00, P11: rank 2
  const auto f = unit_square();
  CHECK(test::plain_rank(f.dual(0.0, 1.0)) == 2);
  CHECK_THROWS_AS(propagate_instance(tangent_grid(3, 3, 1).net, {0, 0, 0.0, 1.0}), GeometryError);
}

TEST_CASE("every dual member is tangent to the four edge lines") {
  std::mt19937_64 rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const QNet net = random_qnet(2, 2, 2 + trial % 4, rng);
    const auto f = InscribedConicFamily::of_face(net, 0, 0);
    for (int k = 1; k <= 9; ++k) {
      const double t = 0.1 * k;
      const Eigen::Matrix3d phi = f.dual(t, 1.0 - t);
      for (Edge e : {Edge::Bottom, Edge::Top, Edge::Left, Edge::Right}) {
        const Eigen::Vector3d l = f.edge_line(e).normalized();
        CHECK(std::abs(l.dot(phi * l)) < 1e-10 * phi.norm());
      }
    }
  }
}

TEST_CASE("contact lines harmonically separate the diagonals") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const QNet net = random_qnet(2, 2, 3, rng);
    const auto f = InscribedConicFamily::of_face(net, 0, 0);
    for (double t : {0.2, 0.45, 0.7, 1.6, -0.5}) CHECK(f.harmonic_value(t, 1.0 - t) == doctest::Approx(-1.0).epsilon(1e-9));
  }
}

TEST_CASE("degenerate faces are rejected") {
  CHECK_THROWS_AS(InscribedConicFamily::of_face(kP00, kP10, Eigen::Vector3d(2, 0, 1), kP11), GeometryError);
  const Eigen::Vector4d off(0, 0, 1, 1);
  const Eigen::Vector4d a(0, 0, 0, 1), b(1, 0, 0, 1), c(0, 1, 0, 1);
  CHECK_THROWS_AS(InscribedConicFamily::of_face(a, b, c, off), GeometryError);
}

TEST_CASE("the double-line member touches at the Laplace points") {
  const QNet quad(2, 2, {HPoint{0, 0, 1}, HPoint{1, 0, 1}, HPoint{0, 1, 1}, HPoint{2, 2, 1}});
  const auto f = InscribedConicFamily::of_face(quad, 0, 0);
  // det(wa A + wb B) = wa wb (c1 wa + c2 wb)
  const double d11 = f.dual(1.0, 1.0).determinant();
  const double d12 = f.dual(1.0, 2.0).determinant();
  const double c2 = (d12 / 2.0 - d11) / 1.0;
  const double c1 = d11 - c2;
  const double wa = -c2, wb = c1;
  REQUIRE(std::abs(f.dual(wa, wb).determinant()) < 1e-10 * std::pow(f.dual(wa, wb).norm(), 3));

  const auto r = propagate_instance(quad, {0, 0, wa, wb});
  REQUIRE(r.instance);
  CHECK(r.instance->face(0, 0).degenerate);
  const HPoint lm = laplace_transform(quad, -1).at(0, 0);
  const HPoint lp = laplace_transform(quad, 1).at(0, 0);
  CHECK(point_distance(r.instance->s.at(0, 0), lm) < 1e-9);
  CHECK(point_distance(r.instance->s.at(0, 1), lm) < 1e-9);
  CHECK(point_distance(r.instance->t.at(0, 0), lp) < 1e-9);
  CHECK(point_distance(r.instance->t.at(1, 0), lp) < 1e-9);
  CHECK(check_touching_nets(*r.instance).s.is_qnet);
}

TEST_CASE("propagation on the tangent grid") {
  const auto& g = test::fix_tan();
  for (int k = 1; k <= 10; ++k) {
    const double t = 0.05 + 0.09 * k;
    const auto r = propagate_instance(g.net, InstanceSeed::from_t(t, k % 4, (k / 4) % 4));
    CHECK(r.closed);
    CHECK(r.max_residual < 1e-10);
  }
  // the formula instance: every contact point of row j is the circle point v_j
  const auto r = propagate_from_contact(g.net, 0, 0, Edge::Bottom, circle_point(g.v[0]).coords());
  REQUIRE(r.closed);
  for (int j = 0; j <= g.net.b(); ++j)
    for (int i = 0; i < g.net.a(); ++i)
      CHECK(point_distance(r.instance->s.at(i, j), circle_point(g.v[static_cast<std::size_t>(j)])) < 1e-10);
  for (int j = 0; j < g.net.b(); ++j)
    for (int i = 0; i <= g.net.a(); ++i)
      CHECK(point_distance(r.instance->t.at(i, j), circle_point(g.u[static_cast<std::size_t>(i)])) < 1e-10);
}

TEST_CASE("propagation fails on non-Koenigs nets") {
  std::mt19937_64 rng(13);
  int failures = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const QNet net = random_qnet(3, 3, 3, rng);
    const auto r = propagate_instance(net, InstanceSeed::from_t(0.4));
    if (!r.closed) ++failures;
    CHECK(r.max_residual > 1e-4);
    CHECK(r.worst_i >= 0);
    if (!r.closed) CHECK_THROWS_AS(require_instance(r), GeometryError);
  }
  CHECK(failures == 5);
}

TEST_CASE("strips always admit touching conics") {
  std::mt19937_64 rng(18);
  for (int trial = 0; trial < 5; ++trial) {
    const QNet strip = random_qnet(5, 2, 4, rng);
    for (double t : {0.2, 0.6, 1.7}) CHECK(propagate_instance(strip, InstanceSeed::from_t(t)).closed);
    CHECK(propagate_instance(strip.transposed(), InstanceSeed::from_t(0.3)).closed);
  }
}

TEST_CASE("Koenigs predicate: closure and coplanarity agree") {
  const QNet w = test::fix_ac().sub(0, 0, 3, 3);
  const auto yes = is_koenigs(w);
  CHECK(yes.closed);
  CHECK(yes.coplanarity == Coplanarity::Holds);
  CHECK(yes.agree);

  const QNet bent = perturb_corner_in_plane(w, 1e-3, 3);
  REQUIRE(check_qnet(bent).is_qnet);
  const auto no = is_koenigs(bent);
  CHECK_FALSE(no.closed);
  CHECK(no.coplanarity == Coplanarity::Fails);
  CHECK(no.agree);

  const auto flat = is_koenigs(test::fix_tan().net);
  CHECK(flat.closed);
  CHECK(flat.coplanarity == Coplanarity::Vacuous);
}

TEST_CASE("one closing seed implies a whole family") {
  const std::vector<QNet> nets = {test::fix_ac().sub(0, 0, 4, 4), test::extensive22(), extensive_koenigs(3, 2, 4)};
  for (const auto& net : nets) {
    REQUIRE(propagate_instance(net, InstanceSeed::from_t(0.4)).closed);
    for (int k = 0; k < 9; ++k) {
      const double t = -0.8 + 0.35 * k;
      if (std::abs(t) < 1e-3 || std::abs(t - 1.0) < 1e-3) continue;
      CHECK(propagate_instance(net, InstanceSeed::from_t(t, 1, 1)).closed);
    }
  }
}

TEST_CASE("contact nets") {
  const auto& g = test::fix_tan();
  const auto special = require_instance(propagate_from_contact(g.net, 0, 0, Edge::Bottom, circle_point(g.v[0]).coords()));
  for (int j = 0; j <= g.net.b(); ++j) CHECK(parameter_space(special.s, Direction::Row, j).proj_dim() == 0);

  for (const QNet& net : {test::extensive22(), extensive_koenigs(3, 2, 4)}) {
    const auto inst = require_instance(propagate_instance(net, InstanceSeed::from_t(0.35)));
    const auto rep = check_touching_nets(inst);
    CHECK(rep.s.is_qnet);
    CHECK(rep.t.is_qnet);
    for (int j = 0; j <= net.b(); ++j) CHECK(parameter_space(inst.s, Direction::Row, j).proj_dim() == net.a() - 1);
    for (int i = 0; i <= net.a(); ++i) CHECK(parameter_space(inst.t, Direction::Col, i).proj_dim() == net.b() - 1);
  }
}

TEST_CASE("Binet: H^S = K^T and H^T = K^S") {
  const std::vector<QNet> nets = {test::fix_tan().net, test::fix_ac().sub(0, 0, 4, 4)};
  for (const auto& net : nets) {
    const auto inst = require_instance(propagate_instance(net, InstanceSeed::from_t(0.4)));
    const auto r = binet_check(inst);
    CHECK(r.comparisons > 0);
    CHECK(r.max_hs_kt < 1e-8);
    CHECK(r.max_ht_ks < 1e-8);
    CHECK(r.pass(1e-8));
  }
  // moving one S point along its edge line breaks the identities
  auto inst = require_instance(propagate_instance(test::fix_tan().net, InstanceSeed::from_t(0.4)));
  std::vector<HPoint> s = inst.s.points();
  const auto& net = test::fix_tan().net;
  s[static_cast<std::size_t>(2 * inst.s.cols() + 1)] =
      HPoint(Eigen::VectorXd(inst.s.at(1, 2).coords() + 1e-2 * net.at(2, 2).coords()));
  inst.s = QNet(inst.s.cols(), inst.s.rows(), s);
  const auto bad = binet_check(inst);
  CHECK_FALSE(bad.pass(1e-8));
  CHECK(std::max(bad.max_hs_kt, bad.max_ht_ks) > 1e-4);
}

TEST_CASE("bipartite hyperplanes") {
  const auto bh = bipartite_hyperplanes(test::extensive22());
  CHECK(bh.u1.proj_dim() == 3);
  CHECK(bh.u2.proj_dim() == 3);
  CHECK_FALSE(bh.u1.contains(bh.u2));
  CHECK(bh.parity_residual < 1e-9);
  CHECK(bh.diagonal_residual < 1e-9);

  std::mt19937_64 rng(19);
  const QNet generic = random_qnet(3, 3, 4, rng);
  REQUIRE(is_extensive(generic));
  try {
    bipartite_hyperplanes(generic);
    FAIL("expected FitFailed");
  } catch (const GeometryError& e) {
    CHECK(e.code() == ErrorCode::FitFailed);
  }

  const QNet quad(2, 2, {HPoint{0, 0, 1}, HPoint{1, 0, 1}, HPoint{0, 1, 1}, HPoint{2, 2, 1}});
  const auto diag = bipartite_hyperplanes(quad);
  CHECK(diag.u1.contains(HPoint{0, 0, 1}));
  CHECK(diag.u1.contains(HPoint{2, 2, 1}));
  CHECK(diag.u2.contains(HPoint{1, 0, 1}));
  CHECK(diag.u2.contains(HPoint{0, 1, 1}));
}

}  // TEST_SUITE
