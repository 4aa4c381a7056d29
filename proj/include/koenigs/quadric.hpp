#pragma once

#include "koenigs/projective.hpp"

#include <vector>

namespace koenigs {

// Symmetric bilinear form on R^{n+1}, stored symmetrized and with unit
// Frobenius norm.
class QuadricForm {
 public:
  QuadricForm() = default;
  explicit QuadricForm(const Eigen::MatrixXd& matrix);

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  int ambient_dim() const { return static_cast<int>(matrix_.rows()) - 1; }

 private:
  Eigen::MatrixXd matrix_;
};

struct Signature {
  int plus = 0;
  int minus = 0;
  int zero = 0;

  bool operator==(const Signature&) const = default;
  std::string str() const;
};

// A quadric living in a subspace, given by its matrix in the orthonormal
// basis of the carrier.
struct SubspaceQuadric {
  ProjSubspace carrier;
  Eigen::MatrixXd form;
};

struct Restriction {
  Eigen::MatrixXd matrix;  // B^T M B in the basis B of the subspace
  bool zero = false;       // the subspace is isotropic
};

struct QuadricPencil {
  QuadricForm q1;
  QuadricForm q2;
};

struct PencilMember {
  QuadricForm form;
  bool base_locus = false;  // Y is on every member; q1 returned
};

double evaluate(const QuadricForm& q, const HPoint& x, const HPoint& y);
ProjSubspace polar(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol = {});

// Eigenvalue sign counts, canonicalized so that plus >= minus.
Signature signature(const Eigen::MatrixXd& m, const Tolerance& tol = {});
Signature signature(const QuadricForm& q, const Tolerance& tol = {});
bool is_full_dimensional(const Eigen::MatrixXd& m, const Tolerance& tol = {});

ProjSubspace singular_locus(const QuadricForm& q, const Tolerance& tol = {});

Restriction restrict_form(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol = {});
double isotropy_residual(const QuadricForm& q, const ProjSubspace& a);
bool is_isotropic(const QuadricForm& q, const ProjSubspace& a, const Tolerance& tol = {});

// max(|B^T M B|, |B^T M A|): zero iff B is isotropic and A lies in polar(B).
double tangency_residual(const QuadricForm& q, const ProjSubspace& a, const ProjSubspace& b,
                         const Tolerance& tol = {});
bool tangent_along(const QuadricForm& q, const ProjSubspace& a, const ProjSubspace& b,
                   const Tolerance& tol = {});

// The unique pencil of ambient forms restricting to qe on E and to a multiple
// of qf on F. E and F must be distinct hyperplanes of a common ambient space.
QuadricPencil glue_pencil(const SubspaceQuadric& qe, const SubspaceQuadric& qf, const Tolerance& tol = {});

PencilMember pencil_member_through(const QuadricPencil& pencil, const HPoint& y, const Tolerance& tol = {});

// Basis of all forms vanishing on the given points and isotropic on the given
// subspaces. Independent of the gluing construction.
std::vector<QuadricForm> fit_quadric_oracle(const std::vector<HPoint>& incident,
                                            const std::vector<ProjSubspace>& isotropic,
                                            const Tolerance& tol = {});

// Frobenius distance after rescaling b so that the entries of largest
// magnitude in a agree.
double aligned_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Express a subspace quadric relative to the orthonormal frame `frame`
// (columns spanning a space that contains the carrier).
SubspaceQuadric reexpress(const SubspaceQuadric& q, const Eigen::MatrixXd& frame, const Tolerance& tol = {});

// Lift a form given in the coordinates of an orthonormal frame back to ambient
// coordinates: frame * m * frame^T.
QuadricForm embed_form(const Eigen::MatrixXd& m, const Eigen::MatrixXd& frame);

// Symmetric matrices <-> upper-triangle coordinates scaled so the map is an
// isometry for the Frobenius norm.
Eigen::VectorXd sym_to_vec(const Eigen::MatrixXd& m);
Eigen::MatrixXd vec_to_sym(const Eigen::VectorXd& v, int size);

}  // namespace koenigs
