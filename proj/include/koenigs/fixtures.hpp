#pragma once

#include "koenigs/qnet.hpp"

#include <cstdint>
#include <vector>

namespace koenigs {

// Kœnigs 1-grid of tangent lines to the unit circle x^2 + y^2 = w^2.
// Column i is tangent at angle u[i], row j at angle v[j].
struct TangentGrid {
  QNet net;
  std::vector<double> u, v;
};

TangentGrid tangent_grid(int rows, int cols, std::uint64_t seed);
HPoint circle_point(double angle);
HPoint tangent_intersection(double alpha, double beta);

// Moves vertex (i,j) by `eps` in a random direction orthogonal to its
// representative.
QNet perturb_vertex(const QNet& net, int i, int j, double eps, std::uint64_t seed);
// Moves the corner (0,0) inside the plane of face (0,0), so the result stays a
// Q-net in any ambient dimension.
QNet perturb_corner_in_plane(const QNet& net, double eps, std::uint64_t seed);

// Extensive Kœnigs net on Σ_{a,b} in RP^{a+b}: a lifted tangent grid.
QNet extensive_koenigs(int a, int b, std::uint64_t seed);

// Special Kœnigs d-grid on Σ_{d,d+1} in RP^{2d} (d >= 2): an extensive lift of
// a tangent grid projected from the point where the common line of the column
// spaces meets both bipartite hyperplanes.
QNet special_grid(int d, std::uint64_t seed);

}  // namespace koenigs
