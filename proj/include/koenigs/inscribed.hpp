#pragma once

#include "koenigs/conics.hpp"
#include "koenigs/quadric.hpp"

#include <cstdint>
#include <vector>

namespace koenigs {

// Which side the induction splits first. Auto splits along the longer side and
// along j on ties.
enum class SplitPolicy { Auto, PreferJ, PreferI };

struct InscribedQuadricResult {
  QuadricForm quadric;         // ambient form
  Eigen::MatrixXd frame;       // orthonormal basis of the join of the net
  Eigen::MatrixXd frame_form;  // the form in frame coordinates
  bool base_locus_warning = false;
};

// Instance restricted to the window Σ_{a,b} at local (i,j).
TouchingInstance restrict_instance(const TouchingInstance& inst, int i, int j, int a, int b);

InscribedQuadricResult build_inscribed_quadric(const QNet& net, const TouchingInstance& inst,
                                               const Tolerance& tol = {}, SplitPolicy policy = SplitPolicy::Auto,
                                               std::uint64_t seed = 0);

struct InscribedVerification {
  double conic_residual = 0.0;     // max aligned distance Q|plane vs C(i,j)
  double isotropy_residual = 0.0;  // max over S^h(j), T^v(i)
  double tangency_residual = 0.0;  // max over P^v(i) along T^v(i), P^h(j) along S^h(j)
  int tangency_checks = 0;
  bool all_tangent = true;
  bool pass(double threshold) const {
    return all_tangent && conic_residual < threshold && isotropy_residual < threshold && tangency_residual < threshold;
  }
};

InscribedVerification verify_inscribed(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                       const Tolerance& tol = {}, int threads = 1);

// Points sampled on the conic of face (i,j), in ambient coordinates.
std::vector<HPoint> conic_samples(const TouchingInstance& inst, int i, int j, int count);

// Independent fit: all conic samples plus the contact parameter spaces.
std::vector<QuadricForm> oracle_inscribed(const QNet& net, const TouchingInstance& inst, const Tolerance& tol = {});

struct SingularReport {
  ProjSubspace x;  // meet of all S^h(j)
  ProjSubspace y;  // meet of all T^v(i)
  ProjSubspace singular;
  bool x_singular = true;
  bool y_singular = true;
  bool bounds_ok = true;
};

SingularReport singular_analysis(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                 const Tolerance& tol = {});

struct DiagonalCorollaryReport {
  double contact_residual = 0.0;   // D_1(i,j) in T^v(i+1), D_-1(i,j) in S^h(j+1)
  double isotropy_residual = 0.0;  // (D_k)^v(i), (D_-k)^h(j) inside Q
  int k_checked = 0;
  int spaces_checked = 0;
};

// Stops at the first k for which D_k or D_-k does not exist; k_checked says how far it got.
DiagonalCorollaryReport diagonal_corollary_check(const QNet& net, const TouchingInstance& inst, const QuadricForm& q,
                                                 int k_max, const Tolerance& tol = {});

struct DoliwaConic {
  int i = 0, j = 0;             // vertex of the diagonal net
  Eigen::MatrixXd plane;        // D(i,j) v D(i+1,j) v D(i,j+1)
  Eigen::Matrix3d form;         // Q restricted to the plane
  double max_residual = 0.0;    // over the six Laplace points
  bool rank_deficient = false;
};

struct DoliwaReport {
  std::vector<DoliwaConic> conics;
  double max_residual = 0.0;
};

DoliwaReport doliwa_conics(const QNet& net, const QuadricForm& q, const Tolerance& tol = {});

}  // namespace koenigs
