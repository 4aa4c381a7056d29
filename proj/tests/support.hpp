#pragma once

#include "koenigs/autoconjugate.hpp"
#include "koenigs/fixtures.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace koenigs::test {

inline Eigen::VectorXd random_vector(int size, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(size);
  for (int k = 0; k < size; ++k) v[k] = g(rng);
  return v;
}

inline HPoint random_point(int n, std::mt19937_64& rng) { return HPoint(random_vector(n + 1, rng)); }

inline ProjSubspace random_subspace(int n, int k, std::mt19937_64& rng) {
  Eigen::MatrixXd m(n + 1, k + 1);
  for (int c = 0; c <= k; ++c) m.col(c) = random_vector(n + 1, rng);
  return ProjSubspace::span(m);
}

// Random point of a subspace.
inline HPoint point_in(const ProjSubspace& s, std::mt19937_64& rng) {
  return HPoint(Eigen::VectorXd(s.basis() * random_vector(static_cast<int>(s.basis().cols()), rng)));
}

inline Eigen::MatrixXd stack(const std::vector<HPoint>& pts) {
  Eigen::MatrixXd m(pts.front().coords().size(), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t k = 0; k < pts.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = pts[k].coords();
  return m;
}

// Rank with a fixed relative cutoff, computed without the library routine.
inline int plain_rank(const Eigen::MatrixXd& m, double rel = 1e-8) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > rel * s[0]) ++r;
  return r;
}

// Shared fixtures. Each is built once per process.
inline const TangentGrid& fix_tan() {
  static const TangentGrid g = tangent_grid(5, 5, 42);
  return g;
}

inline const CurvePair& fix_ac_pair() {
  static const CurvePair p = generate_pair(2, 8, 42);
  return p;
}

inline const QNet& fix_ac() {
  static const QNet g = curves_to_grid(fix_ac_pair()).grid;
  return g;
}

inline const QNet& extensive22() {
  static const QNet n = extensive_koenigs(2, 2, 7);
  return n;
}

}  // namespace koenigs::test
