#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace koenigs;

namespace {

QuadricForm diag(std::initializer_list<double> d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index k = 0;
  for (double x : d) v[k++] = x;
  return QuadricForm(Eigen::MatrixXd(v.asDiagonal()));
}

// Scale-free Frobenius distance of two symmetric matrices, minimized over sign.
double projective_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const Eigen::MatrixXd x = a / a.norm(), y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

SubspaceQuadric slice(const QuadricForm& ambient, const ProjSubspace& carrier) {
  return {carrier, restrict_form(ambient, carrier).matrix};
}

QuadricForm random_nondegenerate(int n, std::mt19937_64& rng) {
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int c = 0; c <= n; ++c) m.col(c) = test::random_vector(n + 1, rng);
  return QuadricForm(m + m.transpose());
}

}  // namespace

TEST_SUITE("quadric") {

TEST_CASE("forms are symmetrized and normalized") {
  Eigen::Matrix3d m;
  m << 1, 2, 0, 0, 1, 0, 0, 0, -1;
  const QuadricForm q(m);
  CHECK(q.matrix().norm() == doctest::Approx(1.0));
  CHECK((q.matrix() - q.matrix().transpose()).norm() < 1e-12);
  CHECK_THROWS_AS(QuadricForm(Eigen::Matrix3d::Zero()), GeometryError);
}

TEST_CASE("evaluate on the unit circle") {
  const auto q = diag({1, 1, -1});
  const double s = q.matrix()(0, 0);
  CHECK(std::abs(evaluate(q, HPoint{1, 0, 1}, HPoint{1, 0, 1})) < 1e-15);
  CHECK(std::abs(evaluate(q, HPoint{1, 0, 0}, HPoint{0, 1, 0})) < 1e-15);
  // -1 for the unnormalized form diag(1,1,-1)
  CHECK(evaluate(q, HPoint{0, 0, 1}, HPoint{0, 0, 1}) / s == doctest::Approx(-1.0));
}

TEST_CASE("polar of a circle point is its tangent") {
  const auto q = diag({1, 1, -1});
  const auto p = polar(q, ProjSubspace::of_point(HPoint{1, 0, 1}));
  CHECK(p.proj_dim() == 1);
  CHECK(p.contains(HPoint{1, 0, 1}));
  CHECK(p.contains(HPoint{1, 5, 1}));
  CHECK(polar(q, ProjSubspace::whole(2)).is_empty());
}

TEST_CASE("double polar is the identity for non-degenerate forms") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    const auto q = random_nondegenerate(n, rng);
    for (int k = 0; k < n; ++k) {
      const auto a = test::random_subspace(n, k, rng);
      const auto pa = polar(q, a);
      CHECK(pa.proj_dim() == n - k - 1);
      const auto ppa = polar(q, pa);
      REQUIRE(ppa.proj_dim() == a.proj_dim());
      CHECK(ppa.residual(a) < 1e-9);
    }
  }
}

TEST_CASE("signatures") {
  CHECK(signature(diag({1, 1, -1})) == Signature{2, 1, 0});
  CHECK(signature(diag({-1, -1, 1})) == Signature{2, 1, 0});
  Eigen::Matrix3d dbl = Eigen::Matrix3d::Zero();
  dbl(0, 0) = 1.0;
  CHECK(signature(QuadricForm(dbl)) == Signature{1, 0, 2});
  CHECK(signature(standard_quadric(2)) == Signature{3, 2, 0});
  CHECK(signature(standard_quadric(3)) == Signature{4, 3, 0});
  CHECK(signature(diag({1, 1, -1})).str() == "++-");
}

TEST_CASE("signature is invariant under congruence") {
  std::mt19937_64 rng(8);
  const QuadricForm qs[] = {standard_quadric(2), diag({1, 1, -1, 0}), diag({1, -1, 0, 0, 1})};
  for (const auto& q : qs) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Eigen::MatrixXd m = random_projective_map(q.ambient_dim(), seed + 100).matrix();
      CHECK(signature(QuadricForm(m.transpose() * q.matrix() * m)) == signature(q));
    }
  }
}

TEST_CASE("singular loci") {
  CHECK(singular_locus(diag({1, 1, -1})).is_empty());
  const auto apex = singular_locus(diag({1, 1, -1, 0}));
  REQUIRE(apex.proj_dim() == 0);
  CHECK(same_point(apex.point(), HPoint{0, 0, 0, 1}));

  // planes x0 = 0 and x1 = 0
  Eigen::Matrix4d planes = Eigen::Matrix4d::Zero();
  planes(0, 1) = planes(1, 0) = 1.0;
  const auto axis = singular_locus(QuadricForm(planes));
  REQUIRE(axis.proj_dim() == 1);
  CHECK(axis.contains(HPoint{0, 0, 1, 0}));
  CHECK(axis.contains(HPoint{0, 0, 0, 1}));
}

TEST_CASE("restriction") {
  const auto cone = diag({1, 1, -1, 0});
  const auto plane = ProjSubspace::hyperplane(Eigen::Vector4d(0, 0, 0, 1));
  const auto r = restrict_form(cone, plane);
  CHECK_FALSE(r.zero);
  CHECK(signature(r.matrix) == Signature{2, 1, 0});

  const auto circle = diag({1, 1, -1});
  CHECK(restrict_form(circle, ProjSubspace::of_point(HPoint{0, 1, 1})).zero);

  std::mt19937_64 rng(9);
  const auto q = random_nondegenerate(4, rng);
  const auto a = test::random_subspace(4, 2, rng);
  const auto ra = restrict_form(q, a).matrix;
  for (int k = 0; k < 10; ++k) {
    const HPoint x = test::point_in(a, rng), y = test::point_in(a, rng);
    const Eigen::VectorXd cx = a.basis().transpose() * x.coords();
    const Eigen::VectorXd cy = a.basis().transpose() * y.coords();
    CHECK(std::abs(cx.dot(ra * cy) - evaluate(q, x, y)) < 1e-10);
  }
}

TEST_CASE("isotropic subspaces of the standard quadric") {
  const auto q = standard_quadric(2);
  const auto line = line_through(HPoint{1, 0, 0, 0, 0}, HPoint{0, 0, 1, 0, 0});
  CHECK(is_isotropic(q, line));
  CHECK(is_isotropic(q, ProjSubspace::of_point(HPoint{0, 1, 0, 0, 0})));
  std::mt19937_64 rng(11);
  CHECK_FALSE(is_isotropic(q, test::random_subspace(4, 1, rng)));
}

TEST_CASE("tangency along a subspace") {
  const auto q = diag({1, 1, -1});
  const HPoint c{1, 0, 1};
  const auto tangent = line_through(c, HPoint{1, 1, 1});
  CHECK(tangent_along(q, tangent, ProjSubspace::of_point(c)));
  const auto secant = line_through(c, HPoint{-1, 0, 1});
  CHECK_FALSE(tangent_along(q, secant, ProjSubspace::of_point(c)));
  CHECK_THROWS_AS(tangent_along(q, tangent, ProjSubspace::of_point(HPoint{0, 0, 1})), GeometryError);
}

TEST_CASE("tangent-grid lines touch the circle at their contact points") {
  const auto& g = test::fix_tan();
  const auto circle = diag({1, 1, -1});
  for (int i = 0; i <= g.net.a(); ++i) {
    const auto col = parameter_space(g.net, Direction::Col, i);
    const auto contact = ProjSubspace::of_point(circle_point(g.u[static_cast<std::size_t>(i)]));
    CHECK(tangent_along(circle, col, contact));
    CHECK(is_isotropic(circle, contact));
  }
  for (int j = 0; j <= g.net.b(); ++j) {
    const auto row = parameter_space(g.net, Direction::Row, j);
    CHECK(tangent_along(circle, row, ProjSubspace::of_point(circle_point(g.v[static_cast<std::size_t>(j)]))));
  }
}

TEST_CASE("tangent along implies isotropic contact") {
  std::mt19937_64 rng(12);
  const auto q = standard_quadric(2);
  int hits = 0;
  for (int trial = 0; trial < 30; ++trial) {
    // an isotropic line B and a plane A inside its polar
    const auto b = line_through(HPoint{1, 0, 0, 0, 0}, HPoint{0, 0, 1, 0, 0});
    const auto pb = polar(q, b);
    const auto a = join(b, ProjSubspace::of_point(test::point_in(pb, rng)));
    if (tangent_along(q, a, b)) {
      ++hits;
      CHECK(is_isotropic(q, b));
    }
  }
  CHECK(hits == 30);
}

TEST_CASE("gluing two circles into a sphere pencil") {
  // coordinates x0..x3; sphere x0^2 + x1^2 + x3^2 - x2^2
  const auto sphere = diag({1, 1, -1, 1});
  const auto e = ProjSubspace::hyperplane(Eigen::Vector4d(0, 0, 0, 1));
  const auto f = ProjSubspace::hyperplane(Eigen::Vector4d(1, 0, 0, 0));
  const auto pencil = glue_pencil(slice(sphere, e), slice(sphere, f));

  // the sphere lies in the span of the two generators
  Eigen::MatrixXd span(16, 3);
  span.col(0) = Eigen::Map<const Eigen::VectorXd>(pencil.q1.matrix().data(), 16);
  span.col(1) = Eigen::Map<const Eigen::VectorXd>(pencil.q2.matrix().data(), 16);
  span.col(2) = Eigen::Map<const Eigen::VectorXd>(sphere.matrix().data(), 16);
  CHECK(test::plain_rank(span, 1e-10) == 2);

  // members restrict to the given conics
  for (double s : {-2.0, -0.5, 0.0, 0.3, 4.0}) {
    const QuadricForm m(pencil.q1.matrix() + s * pencil.q2.matrix());
    CHECK(projective_distance(restrict_form(m, e).matrix, restrict_form(sphere, e).matrix) < 1e-10);
    CHECK(projective_distance(restrict_form(m, f).matrix, restrict_form(sphere, f).matrix) < 1e-10);
    CHECK(is_full_dimensional(m.matrix()));
  }
  // the other generator is the plane pair, zero on both planes
  CHECK(restrict_form(pencil.q2, e).zero);
  CHECK(restrict_form(pencil.q2, f).zero);
  CHECK(signature(pencil.q2) == Signature{1, 1, 2});
}

TEST_CASE("gluing errors") {
  const auto sphere = diag({1, 1, -1, 1});
  const auto e = ProjSubspace::hyperplane(Eigen::Vector4d(0, 0, 0, 1));
  const auto f = ProjSubspace::hyperplane(Eigen::Vector4d(1, 0, 0, 0));
  CHECK_THROWS_AS(glue_pencil(slice(sphere, e), slice(sphere, e)), GeometryError);

  // a different conic on F that disagrees on the common line
  const auto other = diag({1, 2, -1, 1});
  try {
    glue_pencil(slice(sphere, e), slice(other, f));
    FAIL("expected RestrictionMismatch");
  } catch (const GeometryError& err) {
    CHECK(err.code() == ErrorCode::RestrictionMismatch);
  }

  // a definite conic has no real points
  try {
    glue_pencil({e, Eigen::Matrix3d::Identity()}, slice(sphere, f));
    FAIL("expected NotFullDimensional");
  } catch (const GeometryError& err) {
    CHECK(err.code() == ErrorCode::NotFullDimensional);
  }
}

TEST_CASE("full-dimensionality") {
  CHECK(is_full_dimensional(Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()));
  CHECK(is_full_dimensional(Eigen::Vector3d(1, 0, 0).asDiagonal().toDenseMatrix()));  // double line
  CHECK_FALSE(is_full_dimensional(Eigen::Vector3d(1, 1, 0).asDiagonal().toDenseMatrix()));  // a point
  CHECK_FALSE(is_full_dimensional(Eigen::Matrix3d::Identity()));
}

TEST_CASE("gluing random compatible data") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 3;
    const auto q = random_nondegenerate(n, rng);
    const auto e = ProjSubspace::hyperplane(test::random_vector(n + 1, rng));
    const auto f = ProjSubspace::hyperplane(test::random_vector(n + 1, rng));
    const auto pencil = glue_pencil(slice(q, e), slice(q, f));
    for (double s : {-1.0, 0.25, 3.0}) {
      const QuadricForm m(pencil.q1.matrix() + s * pencil.q2.matrix());
      CHECK(projective_distance(restrict_form(m, e).matrix, restrict_form(q, e).matrix) < 1e-10);
      CHECK(projective_distance(restrict_form(m, f).matrix, restrict_form(q, f).matrix) < 1e-10);
    }
    const HPoint y = test::random_point(n, rng);
    const auto member = pencil_member_through(pencil, y);
    CHECK(std::abs(evaluate(member.form, y, y)) < 1e-12);
  }
}

TEST_CASE("pencil member through a point") {
  Eigen::Matrix3d xy = Eigen::Matrix3d::Zero();
  xy(0, 1) = xy(1, 0) = 0.5;
  const QuadricPencil pencil{diag({1, 1, -1}), QuadricForm(xy)};
  const HPoint y{1, 1, 1};
  const auto m = pencil_member_through(pencil, y);
  CHECK_FALSE(m.base_locus);
  CHECK(std::abs(evaluate(m.form, y, y)) < 1e-14);
  // 1 * t1 + 1 * t2 = 0 on the unnormalized generators x^2 + y^2 - w^2 and xy
  const Eigen::Matrix3d expected = Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix() - xy;
  CHECK(projective_distance(m.form.matrix(), expected) < 1e-12);

  const auto on_q1 = pencil_member_through(pencil, HPoint{1, 0, 1});
  CHECK(projective_distance(on_q1.form.matrix(), pencil.q1.matrix()) < 1e-12);

  const auto base = pencil_member_through(pencil, HPoint{0, 1, 1});
  CHECK(base.base_locus);
  CHECK(base.form.matrix() == pencil.q1.matrix());
}

TEST_CASE("fitting oracle on conic points") {
  std::vector<HPoint> pts;
  for (int k = 0; k < 5; ++k) pts.push_back(circle_point(0.3 + 1.1 * k));
  const auto five = fit_quadric_oracle(pts, {});
  REQUIRE(five.size() == 1);
  CHECK(projective_distance(five[0].matrix(), Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()) < 1e-10);
  pts.pop_back();
  CHECK(fit_quadric_oracle(pts, {}).size() == 2);
}

TEST_CASE("a full-dimensional quadric is determined by its points") {
  std::mt19937_64 rng(14);
  const QuadricForm forms[] = {standard_quadric(1), standard_quadric(2), diag({1, 1, 1, -1})};
  for (const auto& q : forms) {
    const int n = q.ambient_dim();
    // points on Q: intersect random lines with Q
    std::vector<HPoint> pts;
    while (static_cast<int>(pts.size()) < 4 * (n + 1) * (n + 2)) {
      const Eigen::VectorXd u = test::random_vector(n + 1, rng), w = test::random_vector(n + 1, rng);
      const Eigen::MatrixXd& m = q.matrix();
      const double a = w.dot(m * w), b = 2.0 * u.dot(m * w), c = u.dot(m * u);
      const double disc = b * b - 4.0 * a * c;
      if (disc < 0.0) continue;
      pts.emplace_back(Eigen::VectorXd(u + (-b + std::sqrt(disc)) / (2.0 * a) * w));
    }
    const auto fit = fit_quadric_oracle(pts, {});
    REQUIRE(fit.size() == 1);
    CHECK(projective_distance(fit[0].matrix(), q.matrix()) < 1e-8);
    CHECK(aligned_distance(q.matrix(), fit[0].matrix()) < 1e-8);
  }
}

TEST_CASE("symmetric vectorization is an isometry") {
  std::mt19937_64 rng(15);
  Eigen::MatrixXd m(4, 4);
  for (int c = 0; c < 4; ++c) m.col(c) = test::random_vector(4, rng);
  m = m + m.transpose().eval();
  CHECK(sym_to_vec(m).norm() == doctest::Approx(m.norm()));
  CHECK((vec_to_sym(sym_to_vec(m), 4) - m).norm() < 1e-14);
}

}  // TEST_SUITE
