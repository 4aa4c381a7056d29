#include "koenigs/fixtures.hpp"

#include "koenigs/conics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace koenigs {

HPoint circle_point(double angle) { return HPoint{std::cos(angle), std::sin(angle), 1.0}; }

HPoint tangent_intersection(double alpha, double beta) {
  const double m = 0.5 * (alpha + beta);
  return HPoint{std::cos(m), std::sin(m), std::cos(0.5 * (alpha - beta))};
}

namespace {

std::vector<double> jittered(int count, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = count > 1 ? (hi - lo) / (count - 1) : 0.0;
  for (int k = 0; k < count; ++k) out[static_cast<std::size_t>(k)] = lo + k * step + jitter(rng) * step;
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TangentGrid tangent_grid(int rows, int cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) throw GeometryError(ErrorCode::InvalidInput, "tangent grid needs rows, cols >= 1");
  std::mt19937_64 rng(seed);
  TangentGrid g;
  g.u = jittered(cols, -1.4, -0.3, rng);
  g.v = jittered(rows, 0.3, 1.4, rng);
  std::vector<HPoint> pts;
  for (int j = 0; j < rows; ++j)
    for (int i = 0; i < cols; ++i)
      pts.push_back(tangent_intersection(g.u[static_cast<std::size_t>(i)], g.v[static_cast<std::size_t>(j)]));
  g.net = QNet(cols, rows, std::move(pts));
  return g;
}

QNet perturb_vertex(const QNet& net, int i, int j, double eps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd& p = net.at(i, j).coords();
  Eigen::VectorXd dir(p.size());
  for (Eigen::Index k = 0; k < dir.size(); ++k) dir[k] = gauss(rng);
  dir -= p * p.dot(dir);
  std::vector<HPoint> pts = net.points();
  pts[static_cast<std::size_t>(j) * net.cols() + i] = HPoint(Eigen::VectorXd(p + eps * dir.normalized()));
  return QNet(net.cols(), net.rows(), std::move(pts), net.origin_i(), net.origin_j());
}

QNet perturb_corner_in_plane(const QNet& net, double eps, std::uint64_t seed) {
  const InscribedConicFamily fam = InscribedConicFamily::of_face(net, 0, 0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Eigen::VectorXd& p = net.at(0, 0).coords();
  Eigen::VectorXd dir = fam.plane() * Eigen::Vector3d(gauss(rng), gauss(rng), gauss(rng));
  dir -= p * p.dot(dir);
  std::vector<HPoint> pts = net.points();
  pts[0] = HPoint(Eigen::VectorXd(p + eps * dir.normalized()));
  return QNet(net.cols(), net.rows(), std::move(pts), net.origin_i(), net.origin_j());
}

QNet extensive_koenigs(int a, int b, std::uint64_t seed) {
  const TangentGrid g = tangent_grid(b + 1, a + 1, seed);
  return lift_extensive(g.net, seed ^ 0x9e3779b97f4a7c15ULL).net;
}

QNet special_grid(int d, std::uint64_t seed) {
  if (d < 2) throw GeometryError(ErrorCode::InvalidInput, "special grids need d >= 2");
  const Tolerance tol;
  constexpr int kAttempts = 16;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    const std::uint64_t s = seed + 7919ULL * static_cast<std::uint64_t>(attempt);
    const QNet lifted = extensive_koenigs(d, d + 1, s);
    std::vector<ProjSubspace> cols;
    for (int i = 0; i <= lifted.a(); ++i) cols.push_back(parameter_space(lifted, Direction::Col, i, tol));
    const ProjSubspace line = meet(cols, tol);
    if (line.proj_dim() != 1) continue;
    const BipartiteHyperplanes u = bipartite_hyperplanes(lifted, tol);
    const ProjSubspace center = meet({line, u.u1, u.u2}, tol);
    if (center.proj_dim() != 0) continue;
    const Eigen::VectorXd c = center.point().coords();
    const Eigen::MatrixXd target = null_space(c.transpose(), tol);
    std::vector<HPoint> pts;
    bool ok = true;
    for (const auto& p : lifted.points()) {
      const Eigen::VectorXd x = target.transpose() * p.coords();
      if (!(x.norm() > tol.rank_rel)) {
        ok = false;
        break;
      }
      pts.emplace_back(x);
    }
    if (!ok) continue;
    QNet out(lifted.cols(), lifted.rows(), std::move(pts));
    const QNetReport rep = check_qnet(out, tol);
    if (rep.is_qnet && rep.is_nondegenerate) return out;
  }
  throw GeometryError(ErrorCode::GenerationFailed, "special grid search exhausted its attempts");
}

}  // namespace koenigs
