#pragma once

#include "koenigs/projective.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace koenigs {

// Map from the window Σ_{a,b} (local indices 0..a, 0..b) to RP^n. The origin
// records where the window sits in a larger lattice; all predicates use local
// indices.
class QNet {
 public:
  QNet() = default;
  // `points` is row-major: index j * cols + i.
  QNet(int cols, int rows, std::vector<HPoint> points, int origin_i = 0, int origin_j = 0);

  int cols() const { return cols_; }
  int rows() const { return rows_; }
  int a() const { return cols_ - 1; }
  int b() const { return rows_ - 1; }
  int origin_i() const { return origin_i_; }
  int origin_j() const { return origin_j_; }
  int ambient_dim() const { return ambient_dim_; }
  const std::vector<HPoint>& points() const { return points_; }

  bool has(int i, int j) const { return i >= 0 && j >= 0 && i < cols_ && j < rows_; }
  const HPoint& at(int i, int j) const;

  // Window Σ_{a,b} whose local (0,0) is (i,j) of this net.
  QNet sub(int i, int j, int a, int b) const;
  QNet transposed() const;
  QNet mapped(const Eigen::MatrixXd& m) const;

 private:
  int cols_ = 0;
  int rows_ = 0;
  int origin_i_ = 0;
  int origin_j_ = 0;
  int ambient_dim_ = -1;
  std::vector<HPoint> points_;
};

struct QNetReport {
  bool is_qnet = true;
  bool is_nondegenerate = true;
  double worst_residual = 0.0;  // largest sigma_4 / sigma_1 over faces
};

QNetReport check_qnet(const QNet& net, const Tolerance& tol = {}, int threads = 1);

enum class Direction { Row, Col };

// P^h(j) for Direction::Row, P^v(i) for Direction::Col.
ProjSubspace parameter_space(const QNet& net, Direction dir, int index, const Tolerance& tol = {});
ProjSubspace net_join(const QNet& net, const Tolerance& tol = {});

bool is_extensive(const QNet& net, const Tolerance& tol = {});
bool is_patch_extensive(const QNet& net, int c, int d, const Tolerance& tol = {}, int threads = 1);

// sign = +1: L+ (meet of vertical edge lines); sign = -1: L- (horizontal).
QNet laplace_transform(const QNet& net, int sign, const Tolerance& tol = {});

struct LaplaceReport {
  bool exists = false;
  int order_reached = 0;
  bool degenerate = false;
  bool nowhere_degenerate = false;
  int comparisons = 0;
  // Max distance between P_m(i,j) and the meet of m+1 consecutive parameter
  // spaces; negative when the formula was not checked.
  double formula_residual = -1.0;
};

struct IteratedLaplace {
  std::optional<QNet> net;
  LaplaceReport report;
};

// P_m for m > 0, P_{-m} for m < 0. Stops at the first degenerate level.
IteratedLaplace iterated_laplace(const QNet& net, int m, const Tolerance& tol = {}, bool check_formula = false);

// Degeneracy flags of an already computed transform of the given sign.
LaplaceReport laplace_degeneracy(const QNet& transform, int sign, const Tolerance& tol = {});

QNet diagonal_net(const QNet& net, const Tolerance& tol = {});

// Real values on the index box [i_lo, i_hi] x [j_lo, j_hi].
struct EdgeField {
  int i_lo = 0, i_hi = -1, j_lo = 0, j_hi = -1;
  std::vector<double> values;

  bool has(int i, int j) const { return i >= i_lo && i <= i_hi && j >= j_lo && j <= j_hi; }
  double at(int i, int j) const;
  bool empty() const { return values.empty(); }
};

struct LaplaceInvariants {
  EdgeField h;  // vertical edges (i,j)-(i,j+1), 1 <= i <= a-1
  EdgeField k;  // horizontal edges (i,j)-(i+1,j), 1 <= j <= b-1
};

LaplaceInvariants laplace_invariants(const QNet& net, const Tolerance& tol = {});

struct Lift {
  QNet net;
  ProjMap projection;  // lifted ambient -> original ambient
};

// Extensive lift: raises the ambient dimension one step at a time until the
// net joins a+b dimensions.
Lift lift_extensive(const QNet& net, std::uint64_t seed, const Tolerance& tol = {});

// Chordal distance between nets of equal shape (max over vertices).
double net_distance(const QNet& x, const QNet& y);

}  // namespace koenigs
