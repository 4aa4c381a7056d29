#pragma once

#include "koenigs/grid.hpp"

#include <cstdint>
#include <vector>

namespace koenigs {

class DCurve {
 public:
  DCurve() = default;
  explicit DCurve(std::vector<HPoint> points);
  int size() const { return static_cast<int>(points_.size()); }
  int ambient_dim() const { return points_.empty() ? -1 : points_.front().ambient_dim(); }
  const std::vector<HPoint>& points() const { return points_; }
  const HPoint& at(int k) const;
  // Points k0 .. k0 + count - 1.
  DCurve window(int k0, int count) const;

 private:
  std::vector<HPoint> points_;
};

// C_(k)(j): join of points j .. j+k; k = -1 gives the empty subspace.
ProjSubspace osculating_space(const DCurve& curve, int j, int k, const Tolerance& tol = {});

// Throws WindowTooSmall below n+1 points.
bool is_generic_curve(const DCurve& curve, const Tolerance& tol = {});

struct CurvePair {
  DCurve sigma, tau;
  QuadricForm quadric;
  int d = 1;
};

// dim S_(k)(j) v T_(n-k-1)(i) = n for -1 <= k <= n over the windows.
bool is_generic_pair(const CurvePair& pair, const Tolerance& tol = {});

// Smallest sigma_min / sigma_max over the joins of the genericity test.
double pair_margin(const CurvePair& pair);

bool is_autoconjugate(const DCurve& curve, const QuadricForm& q, int d, const Tolerance& tol = {});

// x0 x1 + x2 x3 + ... + x_{2d}^2, signature (d+1, d).
QuadricForm standard_quadric(int d);

struct GeneratorOptions {
  double margin = 1e-3;  // lower bound for pair_margin
  int retries = 200;
};

CurvePair generate_pair(int d, int length, std::uint64_t seed, const GeneratorOptions& opts = {});

struct CurvesToGrid {
  QNet grid;                     // Σ_{|tau|-d, |sigma|-d}
  double formula_residual = 0.0; // Laplace transforms vs the polar formulas, k = 0..d
};

CurvesToGrid curves_to_grid(const CurvePair& pair, const Tolerance& tol = {});

struct GridToCurves {
  CurvePair pair;  // quadric is the special inscribed quadric
  TouchingInstance instance;
  double d_plus_residual = 0.0;   // D_d(i) against tau(i+1)
  double d_minus_residual = 0.0;  // D_-d(j) against sigma(j+1)
};

// Throws NotGeneric unless the grid is generic.
GridToCurves grid_to_curves(const QNet& grid, int d, const Tolerance& tol = {});

// Max pointwise chordal distance over the common length.
double curve_distance(const DCurve& x, const DCurve& y);

struct RoundtripReport {
  double curve_deviation = 0.0;  // curves -> grid -> curves, sigma'(j) = sigma(j+d-1)
  double grid_deviation = 0.0;   // grid -> curves -> grid, P'(i,j) = P(i+d-1, j+d-1)
  double index_residual = 0.0;   // D_{±d} against the recovered curves
  double polarity_residual = 0.0;  // D_{±d}(k) conjugate to P_{±d}(k+1-d .. k+d)
  int polarity_checks = 0;
  double max() const;
};

// Start from curves: curves -> grid -> curves -> grid.
RoundtripReport roundtrip_check(const CurvePair& pair, const Tolerance& tol = {});
// Start from a grid: grid -> curves -> grid -> curves.
RoundtripReport roundtrip_check(const QNet& grid, int d, const Tolerance& tol = {});

}  // namespace koenigs
