#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace koenigs {

enum class ErrorCode {
  InvalidInput,
  MixedAmbient,
  IndexOutOfRange,
  DegenerateQuadruple,
  NotCollinear,
  InCenter,
  NotSupplementary,
  NotNested,
  RestrictionMismatch,
  NotFullDimensional,
  UnexpectedSolutionDim,
  DegenerateNet,
  StencilOutOfRange,
  LiftFailed,
  DegenerateFace,
  VertexContact,
  OffEdge,
  ClosureFailure,
  FitFailed,
  NotExtensive,
  YSelectionFailed,
  WindowTooSmall,
  NotInParameterSpace,
  TangentConstructionFailed,
  NotGeneric,
  MeetEmpty,
  VerifyFailed,
  HypothesisFailed,
  NotGenericPair,
  GenerationFailed,
};

const char* to_string(ErrorCode code);

class GeometryError : public std::runtime_error {
 public:
  GeometryError(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Rank and incidence thresholds shared by every predicate in the library.
struct Tolerance {
  double rank_rel = 1e-8;
  double residual_abs = 1e-9;

  void validate() const;
};

// The single rank routine: singular values at or below rank_rel * sigma_max
// count as zero.
struct RankInfo {
  int rank = 0;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd u;  // full left singular vectors
  Eigen::MatrixXd v;  // full right singular vectors
};

RankInfo rank_info(const Eigen::MatrixXd& m, const Tolerance& tol);
int numerical_rank(const Eigen::MatrixXd& m, const Tolerance& tol);
Eigen::MatrixXd column_space(const Eigen::MatrixXd& m, const Tolerance& tol);
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, const Tolerance& tol);

class HPoint {
 public:
  HPoint() = default;
  explicit HPoint(const Eigen::VectorXd& coords);
  HPoint(std::initializer_list<double> coords);

  const Eigen::VectorXd& coords() const { return coords_; }
  int ambient_dim() const { return static_cast<int>(coords_.size()) - 1; }
  double operator[](int k) const { return coords_[k]; }

  // Canonical representative: unit norm, first nonzero entry positive.
  static Eigen::VectorXd normalize(const Eigen::VectorXd& x);

 private:
  Eigen::VectorXd coords_;
};

bool same_point(const HPoint& x, const HPoint& y, const Tolerance& tol = {});
// Chordal distance between unit representatives, minimized over the sign.
double point_distance(const HPoint& x, const HPoint& y);

class ProjSubspace {
 public:
  ProjSubspace() = default;

  static ProjSubspace empty(int ambient_dim);
  static ProjSubspace whole(int ambient_dim);
  // Orthonormalizes the column span of `vectors` with the shared rank routine.
  static ProjSubspace span(const Eigen::MatrixXd& vectors, const Tolerance& tol = {});
  static ProjSubspace of_points(const std::vector<HPoint>& pts, const Tolerance& tol = {});
  static ProjSubspace of_point(const HPoint& p);
  // Keeps the given columns as the basis; they must already be orthonormal.
  static ProjSubspace from_orthonormal(const Eigen::MatrixXd& basis);
  // Hyperplane {x : normal . x = 0}.
  static ProjSubspace hyperplane(const Eigen::VectorXd& normal, const Tolerance& tol = {});

  const Eigen::MatrixXd& basis() const { return basis_; }
  int ambient_dim() const { return ambient_dim_; }
  int proj_dim() const { return static_cast<int>(basis_.cols()) - 1; }
  bool is_empty() const { return basis_.cols() == 0; }

  // Norm of the component of the unit representative orthogonal to the span.
  double residual(const HPoint& x) const;
  bool contains(const HPoint& x, const Tolerance& tol = {}) const;
  // Largest residual over the basis of `other`.
  double residual(const ProjSubspace& other) const;
  bool contains(const ProjSubspace& other, const Tolerance& tol = {}) const;
  // Orthogonal complement as a coefficient matrix (rows are normals).
  Eigen::MatrixXd complement() const;
  // The single point of a 0-dimensional subspace.
  HPoint point() const;

 private:
  ProjSubspace(Eigen::MatrixXd basis, int ambient_dim);
  Eigen::MatrixXd basis_;
  int ambient_dim_ = -1;
};

ProjSubspace join(const std::vector<ProjSubspace>& spaces, const Tolerance& tol = {});
ProjSubspace join(const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol = {});
ProjSubspace line_through(const HPoint& x, const HPoint& y, const Tolerance& tol = {});
ProjSubspace meet(const ProjSubspace& a, const ProjSubspace& b, const Tolerance& tol = {});
ProjSubspace meet(const std::vector<ProjSubspace>& spaces, const Tolerance& tol = {});

// Meet that must be a single point; throws `failure` otherwise.
HPoint meet_point(const ProjSubspace& a, const ProjSubspace& b, ErrorCode failure,
                  const Tolerance& tol = {});

double cross_ratio(const HPoint& p1, const HPoint& p2, const HPoint& p3, const HPoint& p4,
                   const ProjSubspace& carrier, const Tolerance& tol = {});

HPoint central_projection(const HPoint& x, const ProjSubspace& center, const ProjSubspace& target,
                          const Tolerance& tol = {});

class ProjMap {
 public:
  ProjMap() = default;
  explicit ProjMap(Eigen::MatrixXd matrix, std::optional<ProjSubspace> center = std::nullopt);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  const std::optional<ProjSubspace>& center() const { return center_; }
  int source_dim() const { return static_cast<int>(matrix_.cols()) - 1; }
  int target_dim() const { return static_cast<int>(matrix_.rows()) - 1; }

  HPoint apply(const HPoint& x) const;
  ProjSubspace apply(const ProjSubspace& a, const Tolerance& tol = {}) const;
  ProjMap inverse() const;
  ProjMap compose(const ProjMap& inner) const;

 private:
  Eigen::MatrixXd matrix_;
  std::optional<ProjSubspace> center_;
};

ProjMap random_projective_map(int n, std::uint64_t seed);

}  // namespace koenigs
