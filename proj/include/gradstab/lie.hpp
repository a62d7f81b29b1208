#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "gradstab/types.hpp"

namespace gradstab {

/// Catalog of matrix groups G = K exp(p) inside U^C = GL(n,C).
enum class GroupKind { GL_C, SL_C, GL_R, SL_R, DiagTorusR, DiagTorusC };

const char* group_kind_name(GroupKind kind);
GroupKind group_kind_from_name(const std::string& name);

/// Cartan data for one group of the catalog: orthonormal bases of k, p and of
/// a fixed maximal abelian a (diagonal matrices), all with respect to the
/// inner product <xi,eta> = Re tr(xi eta^*).  Immutable after construction.
class ReductiveSetup {
 public:
  static std::shared_ptr<const ReductiveSetup> make(GroupKind kind, int n);

  GroupKind kind() const { return kind_; }
  int n() const { return n_; }
  bool real_entries() const;
  bool trace_free() const;

  const std::vector<Mat>& k_basis() const { return k_basis_; }
  const std::vector<Mat>& p_basis() const { return p_basis_; }
  const std::vector<Mat>& a_basis() const { return a_basis_; }

  int dim_k() const { return static_cast<int>(k_basis_.size()); }
  int dim_p() const { return static_cast<int>(p_basis_.size()); }
  int dim_a() const { return static_cast<int>(a_basis_.size()); }

  /// Orthogonal projection of an arbitrary matrix onto span(p_basis).
  Mat project_p(const Mat& xi) const;
  /// Orthogonal projection onto span(k_basis).
  Mat project_k(const Mat& xi) const;

  /// True when the matrix satisfies the kind constraints of a group element
  /// (invertible, real entries / unit determinant / diagonal as appropriate).
  bool is_member(const Mat& g, double tol = 1e-10) const;

 private:
  ReductiveSetup(GroupKind kind, int n);

  GroupKind kind_;
  int n_;
  std::vector<Mat> k_basis_;
  std::vector<Mat> p_basis_;
  std::vector<Mat> a_basis_;
};

using SetupPtr = std::shared_ptr<const ReductiveSetup>;

/// Element g of the group, validated against the owning setup.
struct GroupElement {
  SetupPtr setup;
  Mat matrix;
};

GroupElement make_group_element(SetupPtr setup, Mat g);
GroupElement identity_element(SetupPtr setup);

/// Direction beta in p with cached eigendata.  Eigenvalues are sorted in
/// descending order; bases of repeated eigenvalues are fixed deterministically
/// by lexicographic pivoting so block structures are reproducible.
class Direction {
 public:
  Direction(SetupPtr setup, const Mat& beta);

  const SetupPtr& setup() const { return setup_; }
  const Mat& matrix() const { return matrix_; }
  const RealVec& eigenvalues() const { return eigenvalues_; }
  const Mat& eigenvectors() const { return eigenvectors_; }
  double norm() const { return norm_; }

  /// exp(t * beta) in closed form through the eigendecomposition.
  Mat exp(double t) const;

 private:
  SetupPtr setup_;
  Mat matrix_;
  RealVec eigenvalues_;
  Mat eigenvectors_;
  double norm_;
};

/// Inner product Re tr(a b^*) on u + iu.
double inner(const Mat& a, const Mat& b);

/// The nondegenerate Ad(U^C)-invariant form: negative of the inner product on
/// the anti-Hermitian part, plus the inner product on the Hermitian part.
double bform(const Mat& x, const Mat& y);

/// theta on the algebra: xi -> -xi^*.
Mat theta_algebra(const Mat& xi);
/// theta on the group: g -> (g^*)^{-1}.
Mat theta_group(const Mat& g);

/// Ad(g) xi = g xi g^{-1}.
Mat ad_group(const Mat& g, const Mat& xi);
/// ad(x) y = [x, y].
Mat bracket(const Mat& x, const Mat& y);

/// Matrix exponential of a p-element (Hermitian), via eigendecomposition.
Mat exp_p(const Mat& xi);
/// Matrix exponential of a k-element (anti-Hermitian).
Mat exp_k(const Mat& xi);

/// Cartan (polar) decomposition g = k exp(xi) with k in K and xi in p.
/// Throws NonMemberError when g fails the kind constraints and
/// NumericFailureError when the polar factorization degenerates.
std::pair<GroupElement, Mat> cartan_decompose(const GroupElement& g);

/// The p-factor of the polar decomposition, without membership validation.
/// Iterative algorithms use this on products whose determinant has drifted
/// at roundoff level.
Mat polar_p_factor(const ReductiveSetup& setup, const Mat& g);

/// Snaps an almost-member back onto the group: realifies entries for real
/// kinds and rescales the determinant for the unit-determinant kinds.
Mat snap_to_group(const ReductiveSetup& setup, Mat g);

/// Bases of the centralizers p^beta and k^beta (kernel of ad(beta)).
struct CentralizerBasis {
  std::vector<Mat> p_part;
  std::vector<Mat> k_part;
};
CentralizerBasis centralizer_basis(const Direction& beta);

/// Block data of the parabolic pair G^{beta+-} determined by beta's
/// descending eigenvalue flag.
struct ParabolicData {
  Direction direction;
  std::vector<std::pair<double, int>> block_order;  // eigenvalue, multiplicity
  std::vector<Mat> flag;            // nested column spans, cumulative
  Eigen::MatrixXi levi_mask;        // 1 where blocks coincide
  Eigen::MatrixXi upper_mask;       // 1 on r^{beta+} positions (eigenbasis coords)
  Eigen::MatrixXi lower_mask;       // 1 on r^{beta-} positions
};
ParabolicData parabolic_data(const Direction& beta);

/// Splits g = k h with k in K and h in G^{beta-} (block lower triangular for
/// the descending flag of beta).
std::pair<GroupElement, GroupElement> parabolic_split(const GroupElement& g,
                                                      const Direction& beta);

/// Levi projection pi^{beta+-}: the block diagonal part of g, which equals
/// the limit of exp(t beta) g exp(-t beta) as t -> -inf (sign +1) or
/// t -> +inf (sign -1).  Throws NotInParabolicError when the conjugation
/// trajectory diverges (entry growth beyond 1e8 at t = -+20).
GroupElement pi_beta(const GroupElement& g, const Direction& beta, int sign);

}  // namespace gradstab
