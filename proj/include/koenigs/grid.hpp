#pragma once

#include "koenigs/inscribed.hpp"

#include <vector>

namespace koenigs {

struct DGridReport {
  bool valid = true;
  std::vector<int> bad_rows, bad_cols;  // parameter spaces not of dimension d
};

DGridReport check_dgrid(const QNet& net, int d, const Tolerance& tol = {});

struct GridGenericityReport {
  bool sigma_dd_extensive = false;
  LaplaceReport p_d;
  LaplaceReport p_minus_d;
  bool is_generic = false;
};

// Throws WindowTooSmall when no Laplace comparison of order d is possible.
GridGenericityReport is_generic_grid(const QNet& net, int d, const Tolerance& tol = {}, int threads = 1);

// D^h(j) and D^v(i) of the diagonal net.
std::vector<ProjSubspace> diagonal_rows(const QNet& net, const Tolerance& tol = {});
std::vector<ProjSubspace> diagonal_cols(const QNet& net, const Tolerance& tol = {});

// Contact points by the meet formulas, with the shifted formula on the last
// row and column; the conics follow from the contacts.
TouchingInstance special_touching_conics(const QNet& net, int d, const Tolerance& tol = {});

struct SpecialQuadric {
  QuadricForm quadric;
  TouchingInstance instance;
  InscribedVerification verification;  // against the whole net
  Signature signature;
};

// Built on the Σ_{d,d} window at (i0, j0) and verified on the whole net.
SpecialQuadric special_inscribed_quadric(const QNet& net, int d, const Tolerance& tol = {}, int i0 = 0, int j0 = 0,
                                         int threads = 1);

struct SpecialGridReport {
  bool special = false;
  bool window_too_small = false;
};

SpecialGridReport is_special_grid(const QNet& net, int d, const Tolerance& tol = {});

enum class Side { Top, Right };

// Adds one row (Top) or column (Right). `first` is the new vertex P(0,b+1)
// for Top, P(a+1,0) for Right; it must lie in the adjacent parameter space.
QNet extend_grid(const QNet& net, Side side, const HPoint& first, const QuadricForm& q, const Tolerance& tol = {});

struct IncidenceReport {
  bool koenigs = false;
  double closure_residual = 0.0;
  double final_conic_residual = 0.0;
};

// The net must be Σ_{d+2,d+2}; throws HypothesisFailed when one of the two
// restrictions Σ_{d+2,d+1}, Σ_{d+1,d+2} is not Kœnigs.
IncidenceReport incidence_check(const QNet& net, int d, const Tolerance& tol = {});

}  // namespace koenigs
