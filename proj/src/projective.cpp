#include "koenigs/projective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace koenigs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::MixedAmbient: return "MixedAmbient";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateQuadruple: return "DegenerateQuadruple";
    case ErrorCode::NotCollinear: return "NotCollinear";
    case ErrorCode::InCenter: return "InCenter";
    case ErrorCode::NotSupplementary: return "NotSupplementary";
    case ErrorCode::NotNested: return "NotNested";
    case ErrorCode::RestrictionMismatch: return "RestrictionMismatch";
    case ErrorCode::NotFullDimensional: return "NotFullDimensional";
    case ErrorCode::UnexpectedSolutionDim: return "UnexpectedSolutionDim";
    case ErrorCode::DegenerateNet: return "DegenerateNet";
    case ErrorCode::StencilOutOfRange: return "StencilOutOfRange";
    case ErrorCode::LiftFailed: return "LiftFailed";
    case ErrorCode::DegenerateFace: return "DegenerateFace";
    case ErrorCode::VertexContact: return "VertexContact";
    case ErrorCode::OffEdge: return "OffEdge";
    case ErrorCode::ClosureFailure: return "ClosureFailure";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::NotExtensive: return "NotExtensive";
    case ErrorCode::YSelectionFailed: return "YSelectionFailed";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::NotInParameterSpace: return "NotInParameterSpace";
    case ErrorCode::TangentConstructionFailed: return "TangentConstructionFailed";
    case ErrorCode::NotGeneric: return "NotGeneric";
    case ErrorCode::MeetEmpty: return "MeetEmpty";
    case ErrorCode::VerifyFailed: return "VerifyFailed";
    case ErrorCode::HypothesisFailed: return "HypothesisFailed";
    case ErrorCode::NotGenericPair: return "NotGenericPair";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
  }
  return "Unknown";
}

GeometryError::GeometryError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void Tolerance::validate() const {
  if (!(rank_rel > 0.0 && rank_rel < 1.0) || !(residual_abs > 0.0))
    throw GeometryError(ErrorCode::InvalidInput, "tolerances must be positive and rank_rel < 1");
}

RankInfo rank_info(const Eigen::MatrixXd& m, const Tolerance& tol) {
  RankInfo info;
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  if (rows == 0 || cols == 0) {
    info.u = Eigen::MatrixXd::Identity(rows, rows);
    info.v = Eigen::MatrixXd::Identity(cols, cols);
    info.singular_values = Eigen::VectorXd(0);
    return info;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  info.singular_values = svd.singularValues();
  info.u = svd.matrixU();
  info.v = svd.matrixV();
  const double smax = info.singular_values.size() ? info.singular_values[0] : 0.0;
  if (smax > 0.0) {
    for (Eigen::Index k = 0; k < info.singular_values.size(); ++k)
      if (info.singular_values[k] > tol.rank_rel * smax) ++info.rank;
  }
  return info;
}

int numerical_rank(const Eigen::MatrixXd& m, const Tolerance& tol) { return rank_info(m, tol).rank; }

Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, const Tolerance& tol) {
  const RankInfo info = rank_info(m, tol);
  return info.u.leftCols(info.rank);
}

Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, const Tolerance& tol) {
  const RankInfo info = rank_info(m, tol);
  return info.v.rightCols(m.cols() - info.rank);
}

// ---------------------------------------------------------------------------

Eigen::VectorXd HPoint::normalize(const Eigen::VectorXd& x) {
  const double n = x.norm();
  if (!(n > 0.0) || !std::isfinite(n))
    throw GeometryError(ErrorCode::InvalidInput, "homogeneous coordinates must be finite and nonzero");
  // Unit vectors are kept as they are, so normalizing twice is a no-op bitwise.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(x.size()));
  Eigen::VectorXd y = std::abs(n - 1.0) <= slack ? x : Eigen::VectorXd(x / n);
  for (Eigen::Index k = 0; k < y.size(); ++k) {
    if (y[k] != 0.0) {
      if (y[k] < 0.0) y = -y;
      break;
    }
  }
  return y;
}

HPoint::HPoint(const Eigen::VectorXd& coords) : coords_(normalize(coords)) {}

HPoint::HPoint(std::initializer_list<double> coords) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index k = 0;
  for (double c : coords) v[k++] = c;
  coords_ = normalize(v);
}

bool same_point(const HPoint& x, const HPoint& y, const Tolerance& tol) {
  if (x.ambient_dim() != y.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "same_point");
  Eigen::MatrixXd m(x.coords().size(), 2);
  m << x.coords(), y.coords();
  return numerical_rank(m, tol) == 1;
}

double point_distance(const HPoint& x, const HPoint& y) {
  if (x.ambient_dim() != y.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "point_distance");
  return std::min((x.coords() - y.coords()).norm(), (x.coords() + y.coords()).norm());
}

// ---------------------------------------------------------------------------

ProjSubspace::ProjSubspace(Eigen::MatrixXd basis, int ambient_dim)
    : basis_(std::move(basis)), ambient_dim_(ambient_dim) {}

ProjSubspace ProjSubspace::empty(int ambient_dim) {
  return ProjSubspace(Eigen::MatrixXd(ambient_dim + 1, 0), ambient_dim);
}

ProjSubspace ProjSubspace::whole(int ambient_dim) {
  return ProjSubspace(Eigen::MatrixXd::Identity(ambient_dim + 1, ambient_dim + 1), ambient_dim);
}

ProjSubspace ProjSubspace::span(const Eigen::MatrixXd& vectors, const Tolerance& tol) {
  const int n = static_cast<int>(vectors.rows()) - 1;
  if (n < 0) throw GeometryError(ErrorCode::InvalidInput, "span of vectors without coordinates");
  return ProjSubspace(column_space(vectors, tol), n);
}

ProjSubspace ProjSubspace::of_points(const std::vector<HPoint>& pts, const Tolerance& tol) {
  if (pts.empty()) throw GeometryError(ErrorCode::InvalidInput, "of_points needs at least one point");
  const int n = pts.front().ambient_dim();
  Eigen::MatrixXd m(n + 1, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "of_points");
    m.col(static_cast<Eigen::Index>(k)) = pts[k].coords();
  }
  return span(m, tol);
}

ProjSubspace ProjSubspace::of_point(const HPoint& p) {
  return ProjSubspace(Eigen::MatrixXd(p.coords()), p.ambient_dim());
}

ProjSubspace ProjSubspace::from_orthonormal(const Eigen::MatrixXd& basis) {
  const Eigen::MatrixXd gram = basis.transpose() * basis;
  if (basis.rows() == 0 || !gram.isApprox(Eigen::MatrixXd::Identity(basis.cols(), basis.cols()), 1e-10))
    throw GeometryError(ErrorCode::InvalidInput, "basis columns are not orthonormal");
  return ProjSubspace(basis, static_cast<int>(basis.rows()) - 1);
}

ProjSubspace ProjSubspace::hyperplane(const Eigen::VectorXd& normal, const Tolerance& tol) {
  const int n = static_cast<int>(normal.size()) - 1;
  return ProjSubspace(null_space(normal.transpose(), tol), n);
}

double ProjSubspace::residual(const HPoint& x) const {
  if (x.ambient_dim() != ambient_dim_) throw GeometryError(ErrorCode::MixedAmbient, "subspace residual");
  const Eigen::VectorXd& v = x.coords();
  if (basis_.cols() == 0) return v.norm();
  return (v - basis_ * (basis_.transpose() * v)).norm();
}

bool ProjSubspace::contains(const HPoint& x, const Tolerance& tol) const {
  return residual(x) <= tol.residual_abs;
}

double ProjSubspace::residual(const ProjSubspace& other) const {
  if (other.ambient_dim_ != ambient_dim_) throw GeometryError(ErrorCode::MixedAmbient, "subspace residual");
  double worst = 0.0;
  for (Eigen::Index k = 0; k < other.basis_.cols(); ++k) {
    const Eigen::VectorXd v = other.basis_.col(k);
    const Eigen::VectorXd r = basis_.cols() ? Eigen::VectorXd(v - basis_ * (basis_.transpose() * v)) : v;
    worst = std::max(worst, r.norm());
  }
  return worst;
}

bool ProjSubspace::contains(const ProjSubspace& other, const Tolerance& tol) const {
  return residual(other) <= tol.residual_abs;
}

Eigen::MatrixXd ProjSubspace::complement() const {
  const Eigen::Index dim = ambient_dim_ + 1;
  if (basis_.cols() == 0) return Eigen::MatrixXd::Identity(dim, dim);
  // Columns are exactly orthonormal, so the full SVD splits cleanly.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(basis_, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(dim - basis_.cols()).transpose();
}

HPoint ProjSubspace::point() const {
  if (proj_dim() != 0)
    throw GeometryError(ErrorCode::InvalidInput, "subspace of dimension " + std::to_string(proj_dim()) +
                                                     " is not a point");
  return HPoint(Eigen::VectorXd(basis_.col(0)));
}

// ---------------------------------------------------------------------------

ProjSubspace join(const std::vector<ProjSubspace>& spaces, const Tolerance& tol) {
  if (spaces.empty()) throw GeometryError(ErrorCode::InvalidInput, "join of nothing");
  const int n = spaces.front().ambient_dim();
  Eigen::Index cols = 0;
  for (const auto& s : spaces) {
    if (s.ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "join");
    cols += s.basis().cols();
  }
  if (cols == 0) return ProjSubspace::empty(n);
  Eigen::MatrixXd m(n + 1, cols);
  Eigen::Index c = 0;
  for (const auto& s : spaces) {
    m.middleCols(c, s.basis().cols()) = s.basis();
    c += s.basis().cols();
  }
  return ProjSubspace::span(m, tol);
}

ProjSubspace join(const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol) {
  return join(std::vector<ProjSubspace>{a, b}, tol);
}

ProjSubspace line_through(const HPoint& x, const HPoint& y, const Tolerance& tol) {
  return ProjSubspace::of_points({x, y}, tol);
}

ProjSubspace meet(const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol) {
  if (a.ambient_dim() != b.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "meet");
  const int n = a.ambient_dim();
  const Eigen::MatrixXd ca = a.complement();
  const Eigen::MatrixXd cb = b.complement();
  if (ca.rows() + cb.rows() == 0) return ProjSubspace::whole(n);
  Eigen::MatrixXd stacked(ca.rows() + cb.rows(), n + 1);
  stacked << ca, cb;
  const Eigen::MatrixXd ns = null_space(stacked, tol);
  if (ns.cols() == 0) return ProjSubspace::empty(n);
  return ProjSubspace::span(ns, tol);
}

ProjSubspace meet(const std::vector<ProjSubspace>& spaces, const Tolerance& tol) {
  if (spaces.empty()) throw GeometryError(ErrorCode::InvalidInput, "meet of nothing");
  const int n = spaces.front().ambient_dim();
  Eigen::Index rows = 0;
  std::vector<Eigen::MatrixXd> comps;
  comps.reserve(spaces.size());
  for (const auto& s : spaces) {
    if (s.ambient_dim() != n) throw GeometryError(ErrorCode::MixedAmbient, "meet");
    comps.push_back(s.complement());
    rows += comps.back().rows();
  }
  if (rows == 0) return ProjSubspace::whole(n);
  Eigen::MatrixXd stacked(rows, n + 1);
  Eigen::Index r = 0;
  for (const auto& c : comps) {
    stacked.middleRows(r, c.rows()) = c;
    r += c.rows();
  }
  const Eigen::MatrixXd ns = null_space(stacked, tol);
  if (ns.cols() == 0) return ProjSubspace::empty(n);
  return ProjSubspace::span(ns, tol);
}

HPoint meet_point(const ProjSubspace& a, const ProjSubspace& b, ErrorCode failure, const Tolerance& tol) {
  const ProjSubspace m = meet(a, b, tol);
  if (m.proj_dim() != 0)
    throw GeometryError(failure, "expected a point, meet has dimension " + std::to_string(m.proj_dim()));
  return m.point();
}

// ---------------------------------------------------------------------------

double cross_ratio(const HPoint& p1, const HPoint& p2, const HPoint& p3, const HPoint& p4,
                   const ProjSubspace& carrier, const Tolerance& tol) {
  if (carrier.proj_dim() != 1) throw GeometryError(ErrorCode::InvalidInput, "carrier must be a line");
  const HPoint* pts[4] = {&p1, &p2, &p3, &p4};
  Eigen::Vector2d c[4];
  for (int k = 0; k < 4; ++k) {
    if (pts[k]->ambient_dim() != carrier.ambient_dim()) throw GeometryError(ErrorCode::MixedAmbient, "cross_ratio");
    if (!carrier.contains(*pts[k], tol))
      throw GeometryError(ErrorCode::NotCollinear, "point " + std::to_string(k + 1) + " is off the carrier");
    c[k] = carrier.basis().transpose() * pts[k]->coords();
  }
  auto det = [](const Eigen::Vector2d& x, const Eigen::Vector2d& y) { return x[0] * y[1] - x[1] * y[0]; };
  auto coincide = [&](const Eigen::Vector2d& x, const Eigen::Vector2d& y) {
    Eigen::Matrix2d m;
    m << x, y;
    return numerical_rank(m, tol) < 2;
  };
  if (coincide(c[1], c[2]) || coincide(c[3], c[0]))
    throw GeometryError(ErrorCode::DegenerateQuadruple, "cross-ratio takes the value infinity");
  return det(c[0], c[1]) * det(c[2], c[3]) / (det(c[1], c[2]) * det(c[3], c[0]));
}

HPoint central_projection(const HPoint& x, const ProjSubspace& center, const ProjSubspace& target,
                          const Tolerance& tol) {
  const int n = x.ambient_dim();
  if (center.ambient_dim() != n || target.ambient_dim() != n)
    throw GeometryError(ErrorCode::MixedAmbient, "central_projection");
  if (join(center, target, tol).proj_dim() != n || !meet(center, target, tol).is_empty())
    throw GeometryError(ErrorCode::NotSupplementary, "center and target must be supplementary");
  if (!center.is_empty() && center.contains(x, tol))
    throw GeometryError(ErrorCode::InCenter, "point lies in the center of projection");
  return meet_point(join(ProjSubspace::of_point(x), center, tol), target, ErrorCode::NotSupplementary, tol);
}

// ---------------------------------------------------------------------------

ProjMap::ProjMap(Eigen::MatrixXd matrix, std::optional<ProjSubspace> center)
    : matrix_(std::move(matrix)), center_(std::move(center)) {
  if (matrix_.rows() == 0 || matrix_.cols() == 0)
    throw GeometryError(ErrorCode::InvalidInput, "empty projective map");
  const Tolerance tol;
  const int kernel = static_cast<int>(matrix_.cols()) - numerical_rank(matrix_, tol);
  const int expected = center_ ? center_->proj_dim() + 1 : 0;
  if (kernel != expected)
    throw GeometryError(ErrorCode::InvalidInput, "projective map kernel does not match its center");
}

HPoint ProjMap::apply(const HPoint& x) const {
  if (x.ambient_dim() != source_dim()) throw GeometryError(ErrorCode::MixedAmbient, "ProjMap::apply");
  const Eigen::VectorXd y = matrix_ * x.coords();
  if (center_ && center_->contains(x))
    throw GeometryError(ErrorCode::InCenter, "point lies in the center of projection");
  return HPoint(y);
}

ProjSubspace ProjMap::apply(const ProjSubspace& a, const Tolerance& tol) const {
  if (a.ambient_dim() != source_dim()) throw GeometryError(ErrorCode::MixedAmbient, "ProjMap::apply");
  if (a.is_empty()) return ProjSubspace::empty(target_dim());
  return ProjSubspace::span(matrix_ * a.basis(), tol);
}

ProjMap ProjMap::inverse() const {
  if (matrix_.rows() != matrix_.cols() || center_)
    throw GeometryError(ErrorCode::InvalidInput, "only invertible square maps have an inverse");
  return ProjMap(matrix_.inverse());
}

ProjMap ProjMap::compose(const ProjMap& inner) const {
  if (inner.target_dim() != source_dim()) throw GeometryError(ErrorCode::MixedAmbient, "ProjMap::compose");
  if (center_ || inner.center_)
    throw GeometryError(ErrorCode::InvalidInput, "composition is defined for maps without centers");
  return ProjMap(matrix_ * inner.matrix_);
}

ProjMap random_projective_map(int n, std::uint64_t seed) {
  if (n < 1) throw GeometryError(ErrorCode::InvalidInput, "random_projective_map needs n >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    Eigen::MatrixXd m(n + 1, n + 1);
    for (Eigen::Index r = 0; r <= n; ++r)
      for (Eigen::Index c = 0; c <= n; ++c) m(r, c) = gauss(rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s[n] > 0.0 && s[0] / s[n] < 1e6) return ProjMap(m);
  }
}

}  // namespace koenigs
