#pragma once

#include "koenigs/qnet.hpp"

#include <array>
#include <optional>
#include <vector>

namespace koenigs {

enum class Edge { Bottom, Top, Left, Right };

// Dual pencil of conics inscribed in a planar quad p00, p10, p01, p11.
// Members are Phi = wa * A + wb * B with A = q10 q01^T + q01 q10^T and
// B = q00 q11^T + q11 q00^T in an orthonormal basis of the face plane. The
// scalar t = wa / (wa + wb) depends on the representatives given.
class InscribedConicFamily {
 public:
  static InscribedConicFamily of_face(const Eigen::VectorXd& p00, const Eigen::VectorXd& p10,
                                      const Eigen::VectorXd& p01, const Eigen::VectorXd& p11,
                                      const Tolerance& tol = {});
  static InscribedConicFamily of_face(const QNet& net, int i, int j, const Tolerance& tol = {});

  const Eigen::MatrixXd& plane() const { return plane_; }
  const Eigen::Matrix3d& a() const { return a_; }
  const Eigen::Matrix3d& b() const { return b_; }
  // Plane coordinates of vertex k in the order 00, 10, 01, 11.
  const Eigen::Vector3d& q(int k) const { return q_[static_cast<std::size_t>(k)]; }
  Eigen::Vector3d edge_line(Edge e) const;

  Eigen::Matrix3d dual(double wa, double wb) const { return wa * a_ + wb * b_; }
  // Adjugate of the dual member, in plane coordinates.
  Eigen::Matrix3d primal(double wa, double wb) const;
  Eigen::VectorXd contact(Edge e, double wa, double wb) const;

  // Pencil parameters of the member touching edge e at `c`.
  Eigen::Vector2d params_from_contact(Edge e, const Eigen::VectorXd& c, const Tolerance& tol = {}) const;

  // Cross-ratio of (diagonal, S-line, diagonal, T-line) at their common point.
  double harmonic_value(double wa, double wb, const Tolerance& tol = {}) const;

  static bool excluded(double wa, double wb, const Tolerance& tol = {});

 private:
  Eigen::MatrixXd plane_;
  std::array<Eigen::Vector3d, 4> q_;
  Eigen::Matrix3d a_, b_;
};

struct ConicFromContact {
  double wa = 0.0, wb = 0.0;
  double t = 0.0;
  Eigen::Matrix3d primal;
};

ConicFromContact conic_from_contact(const InscribedConicFamily& family, Edge e, const Eigen::VectorXd& contact,
                                    const Tolerance& tol = {});

struct ContactPoints {
  Eigen::VectorXd bottom, top, left, right;
};
ContactPoints contact_points(const InscribedConicFamily& family, double wa, double wb);

struct FaceConic {
  Eigen::MatrixXd plane;  // orthonormal basis, (n+1) x 3
  Eigen::Vector2d w;      // dual pencil parameters
  Eigen::Matrix3d primal; // primal form in plane coordinates
  bool degenerate = false;
};

// One inscribed conic per face plus the contact nets. S(i,j) lies on the
// edge (i,j)-(i+1,j), T(i,j) on (i,j)-(i,j+1).
struct TouchingInstance {
  int a = 0, b = 0;
  std::vector<FaceConic> faces;  // index j * a + i
  QNet s;                        // Σ_{a-1,b}
  QNet t;                        // Σ_{a,b-1}

  const FaceConic& face(int i, int j) const { return faces[static_cast<std::size_t>(j * a + i)]; }
};

struct InstanceSeed {
  int i = 0, j = 0;
  double wa = 0.4, wb = 0.6;

  static InstanceSeed from_t(double t, int i = 0, int j = 0) { return {i, j, t, 1.0 - t}; }
};

struct PropagationResult {
  std::optional<TouchingInstance> instance;
  bool closed = false;
  double max_residual = 0.0;
  int worst_i = -1, worst_j = -1;
};

// Breadth-first propagation of contact points from the seed face.
PropagationResult propagate_instance(const QNet& net, const InstanceSeed& seed, const Tolerance& tol = {});
// Same, seeded by the contact point on one edge of the seed face.
PropagationResult propagate_from_contact(const QNet& net, int i, int j, Edge e, const Eigen::VectorXd& contact,
                                         const Tolerance& tol = {});
// Throws ClosureFailure when propagation does not close.
TouchingInstance require_instance(const PropagationResult& r);

// Instance determined by prescribed contact points on every edge. Per face the
// conic is fixed by the bottom (or left) contact, the rest are checked.
PropagationResult instance_from_contacts(const QNet& net, const QNet& s, const QNet& t, const Tolerance& tol = {});

enum class Coplanarity { Vacuous, Holds, Fails };

struct KoenigsReport {
  bool closed = false;
  double closure_residual = 0.0;
  int worst_i = -1, worst_j = -1;
  Coplanarity coplanarity = Coplanarity::Vacuous;
  double coplanarity_residual = 0.0;  // largest sigma_4 / sigma_1
  bool agree = true;
  bool is_koenigs() const { return closed; }
};

KoenigsReport is_koenigs(const QNet& net, const Tolerance& tol = {}, double seed_t = 0.4, int threads = 1);

struct TouchingNetsReport {
  QNetReport s, t;
};
TouchingNetsReport check_touching_nets(const TouchingInstance& inst, const Tolerance& tol = {});

struct BinetReport {
  double max_hs_kt = 0.0;
  double max_ht_ks = 0.0;
  int comparisons = 0;
  bool pass(double threshold) const { return comparisons > 0 && max_hs_kt < threshold && max_ht_ks < threshold; }
};

BinetReport binet_check(const TouchingInstance& inst, const Tolerance& tol = {});

struct BipartiteHyperplanes {
  ProjSubspace u1, u2;           // even / odd parity
  Eigen::VectorXd n1, n2;        // normals
  double parity_residual = 0.0;  // max |n . p| over the vertices of each class
  double diagonal_residual = 0.0;
};

BipartiteHyperplanes bipartite_hyperplanes(const QNet& net, const Tolerance& tol = {});

}  // namespace koenigs
