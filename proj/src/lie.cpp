#include "gradstab/lie.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>

namespace gradstab {

namespace {

constexpr Complex kI{0.0, 1.0};

Mat unit_matrix(int n, int r, int c, Complex v) {
  Mat m = Mat::Zero(n, n);
  m(r, c) = v;
  return m;
}

// Orthonormal basis of the traceless real diagonal matrices.
std::vector<Mat> traceless_diag_basis(int n) {
  std::vector<Mat> basis;
  for (int k = 1; k < n; ++k) {
    Mat m = Mat::Zero(n, n);
    for (int j = 0; j < k; ++j) m(j, j) = 1.0;
    m(k, k) = -static_cast<double>(k);
    basis.push_back(m / std::sqrt(static_cast<double>(k * (k + 1))));
  }
  return basis;
}

std::vector<Mat> full_diag_basis(int n) {
  std::vector<Mat> basis;
  for (int j = 0; j < n; ++j) basis.push_back(unit_matrix(n, j, j, 1.0));
  return basis;
}

const double kSqrtHalf = std::sqrt(0.5);

}  // namespace

const char* group_kind_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::GL_C: return "GL_C";
    case GroupKind::SL_C: return "SL_C";
    case GroupKind::GL_R: return "GL_R";
    case GroupKind::SL_R: return "SL_R";
    case GroupKind::DiagTorusR: return "DIAG_TORUS_R";
    case GroupKind::DiagTorusC: return "DIAG_TORUS_C";
  }
  return "?";
}

GroupKind group_kind_from_name(const std::string& name) {
  if (name == "GL_C") return GroupKind::GL_C;
  if (name == "SL_C") return GroupKind::SL_C;
  if (name == "GL_R") return GroupKind::GL_R;
  if (name == "SL_R") return GroupKind::SL_R;
  if (name == "DIAG_TORUS_R") return GroupKind::DiagTorusR;
  if (name == "DIAG_TORUS_C") return GroupKind::DiagTorusC;
  throw ParseError("unknown group kind: " + name);
}

bool ReductiveSetup::real_entries() const {
  return kind_ == GroupKind::GL_R || kind_ == GroupKind::SL_R ||
         kind_ == GroupKind::DiagTorusR;
}

bool ReductiveSetup::trace_free() const {
  return kind_ == GroupKind::SL_C || kind_ == GroupKind::SL_R ||
         kind_ == GroupKind::DiagTorusR || kind_ == GroupKind::DiagTorusC;
}

ReductiveSetup::ReductiveSetup(GroupKind kind, int n) : kind_(kind), n_(n) {
  if (n < 1) throw Error("matrix size must be positive");
  switch (kind) {
    case GroupKind::GL_R:
    case GroupKind::SL_R: {
      // k: antisymmetric, p: symmetric (traceless for SL).
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
          k_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, 1.0) -
                                          unit_matrix(n, c, r, 1.0)));
          p_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, 1.0) +
                                          unit_matrix(n, c, r, 1.0)));
        }
      if (kind == GroupKind::GL_R) {
        for (auto& m : full_diag_basis(n)) p_basis_.push_back(m);
        a_basis_ = full_diag_basis(n);
      } else {
        for (auto& m : traceless_diag_basis(n)) p_basis_.push_back(m);
        a_basis_ = traceless_diag_basis(n);
      }
      break;
    }
    case GroupKind::GL_C:
    case GroupKind::SL_C: {
      for (int r = 0; r < n; ++r)
        for (int c = r + 1; c < n; ++c) {
          k_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, 1.0) -
                                          unit_matrix(n, c, r, 1.0)));
          k_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, kI) +
                                          unit_matrix(n, c, r, kI)));
          p_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, 1.0) +
                                          unit_matrix(n, c, r, 1.0)));
          p_basis_.push_back(kSqrtHalf * (unit_matrix(n, r, c, kI) -
                                          unit_matrix(n, c, r, kI)));
        }
      if (kind == GroupKind::GL_C) {
        for (auto& m : full_diag_basis(n)) {
          k_basis_.push_back(kI * m);
          p_basis_.push_back(m);
        }
        a_basis_ = full_diag_basis(n);
      } else {
        for (auto& m : traceless_diag_basis(n)) {
          k_basis_.push_back(kI * m);
          p_basis_.push_back(m);
        }
        a_basis_ = traceless_diag_basis(n);
      }
      break;
    }
    case GroupKind::DiagTorusR: {
      p_basis_ = traceless_diag_basis(n);
      a_basis_ = p_basis_;
      break;
    }
    case GroupKind::DiagTorusC: {
      p_basis_ = traceless_diag_basis(n);
      for (auto& m : p_basis_) k_basis_.push_back(kI * m);
      a_basis_ = p_basis_;
      break;
    }
  }
}

std::shared_ptr<const ReductiveSetup> ReductiveSetup::make(GroupKind kind, int n) {
  return std::shared_ptr<const ReductiveSetup>(new ReductiveSetup(kind, n));
}

Mat ReductiveSetup::project_p(const Mat& xi) const {
  Mat out = Mat::Zero(n_, n_);
  for (const Mat& b : p_basis_) out += inner(xi, b) * b;
  return out;
}

Mat ReductiveSetup::project_k(const Mat& xi) const {
  Mat out = Mat::Zero(n_, n_);
  for (const Mat& b : k_basis_) out += inner(xi, b) * b;
  return out;
}

bool ReductiveSetup::is_member(const Mat& g, double tol) const {
  if (g.rows() != n_ || g.cols() != n_) return false;
  if (!g.allFinite()) return false;
  if (real_entries() && g.imag().cwiseAbs().maxCoeff() > tol) return false;
  Eigen::FullPivLU<Mat> lu(g);
  if (!lu.isInvertible()) return false;
  if (kind_ == GroupKind::DiagTorusR || kind_ == GroupKind::DiagTorusC) {
    Mat off = g;
    off.diagonal().setZero();
    if (off.cwiseAbs().maxCoeff() > tol) return false;
  }
  if (trace_free() && std::abs(g.determinant() - 1.0) > tol) return false;
  return true;
}

GroupElement make_group_element(SetupPtr setup, Mat g) {
  if (!setup->is_member(g)) {
    throw NonMemberError("matrix is not a member of " +
                         std::string(group_kind_name(setup->kind())));
  }
  return GroupElement{std::move(setup), std::move(g)};
}

GroupElement identity_element(SetupPtr setup) {
  int n = setup->n();
  return GroupElement{std::move(setup), Mat::Identity(n, n)};
}

Direction::Direction(SetupPtr setup, const Mat& beta) : setup_(std::move(setup)) {
  const int n = setup_->n();
  if (beta.rows() != n || beta.cols() != n)
    throw NonMemberError("direction has wrong shape");
  if ((beta - beta.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
    throw NonMemberError("direction is not Hermitian");
  matrix_ = setup_->project_p(beta);
  if ((matrix_ - beta).cwiseAbs().maxCoeff() > 1e-10)
    throw NonMemberError("direction does not lie in p");
  matrix_ = 0.5 * (matrix_ + matrix_.adjoint().eval());
  norm_ = std::sqrt(std::max(0.0, inner(matrix_, matrix_)));

  Eigen::SelfAdjointEigenSolver<Mat> es(matrix_);
  if (es.info() != Eigen::Success)
    throw NumericFailureError("eigendecomposition failed");
  // Descending order.
  RealVec vals(n);
  Mat vecs(n, n);
  for (int i = 0; i < n; ++i) {
    vals(i) = es.eigenvalues()(n - 1 - i);
    vecs.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  // Deterministic bases inside repeated eigenvalues: project the standard
  // basis vectors into each eigenspace and orthonormalize in order.
  const double tie_tol = 1e-9 * std::max(1.0, vals.cwiseAbs().maxCoeff());
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && std::abs(vals(stop) - vals(start)) < tie_tol) ++stop;
    int dim = stop - start;
    if (dim > 1) {
      Mat block = vecs.middleCols(start, dim);
      Mat proj = block * block.adjoint();  // projector onto the eigenspace
      Mat fixed(n, dim);
      int got = 0;
      for (int j = 0; j < n && got < dim; ++j) {
        Vec cand = proj.col(j);
        for (int q = 0; q < got; ++q)
          cand -= fixed.col(q).dot(cand) * fixed.col(q);
        double len = cand.norm();
        if (len > 1e-7) fixed.col(got++) = cand / len;
      }
      if (got == dim) vecs.middleCols(start, dim) = fixed;
    } else {
      // Fix the phase: make the largest-modulus component real positive.
      int arg = 0;
      vecs.col(start).cwiseAbs().maxCoeff(&arg);
      Complex z = vecs(arg, start);
      if (std::abs(z) > 0) vecs.col(start) *= std::conj(z) / std::abs(z);
    }
    start = stop;
  }
  eigenvalues_ = vals;
  eigenvectors_ = vecs;
  Mat recon = vecs * vals.asDiagonal() * vecs.adjoint();
  if ((recon - matrix_).cwiseAbs().maxCoeff() > 1e-10)
    throw NumericFailureError("eigendata does not reconstruct the direction");
}

Mat Direction::exp(double t) const {
  RealVec ev = (t * eigenvalues_).array().exp();
  return eigenvectors_ * ev.asDiagonal() * eigenvectors_.adjoint();
}

double inner(const Mat& a, const Mat& b) {
  return (a.cwiseProduct(b.conjugate())).sum().real();
}

double bform(const Mat& x, const Mat& y) {
  Mat xu = 0.5 * (x - x.adjoint().eval());
  Mat xh = 0.5 * (x + x.adjoint().eval());
  Mat yu = 0.5 * (y - y.adjoint().eval());
  Mat yh = 0.5 * (y + y.adjoint().eval());
  return inner(xh, yh) - inner(xu, yu);
}

Mat theta_algebra(const Mat& xi) { return -xi.adjoint(); }

Mat theta_group(const Mat& g) {
  return g.adjoint().inverse();
}

Mat ad_group(const Mat& g, const Mat& xi) {
  return g * xi * g.inverse();
}

Mat bracket(const Mat& x, const Mat& y) { return x * y - y * x; }

Mat exp_p(const Mat& xi) {
  Eigen::SelfAdjointEigenSolver<Mat> es(xi);
  RealVec ev = es.eigenvalues().array().exp();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Mat exp_k(const Mat& xi) {
  // i*xi is Hermitian; exp(xi) = exp(-i * (i xi)).
  Eigen::SelfAdjointEigenSolver<Mat> es((kI * xi).eval());
  Vec ev(xi.rows());
  for (int j = 0; j < xi.rows(); ++j)
    ev(j) = std::exp(-kI * es.eigenvalues()(j));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

Mat polar_p_factor(const ReductiveSetup& setup, const Mat& g) {
  Mat h = g.adjoint() * g;  // Hermitian positive definite
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw NumericFailureError("polar factorization did not converge");
  RealVec logs = es.eigenvalues().array().log() * 0.5;
  Mat xi = es.eigenvectors() * logs.asDiagonal() * es.eigenvectors().adjoint();
  return setup.project_p(xi);
}

Mat snap_to_group(const ReductiveSetup& setup, Mat g) {
  if (setup.real_entries()) g = g.real().cast<Complex>();
  if (setup.trace_free()) {
    Complex det = g.determinant();
    if (std::abs(det) > 1e-300)
      g /= std::pow(det, 1.0 / static_cast<double>(setup.n()));
  }
  return g;
}

std::pair<GroupElement, Mat> cartan_decompose(const GroupElement& g) {
  const auto& setup = *g.setup;
  if (!setup.is_member(g.matrix))
    throw NonMemberError("cartan_decompose: not a group member");
  Mat xi = polar_p_factor(setup, g.matrix);
  Mat k = g.matrix * exp_p(-xi);
  Mat residual = k * exp_p(xi) - g.matrix;
  if (residual.cwiseAbs().maxCoeff() > 1e-9)
    throw NumericFailureError("cartan_decompose residual too large");
  return {GroupElement{g.setup, std::move(k)}, std::move(xi)};
}

namespace {

// Orthonormal kernel basis of the linear map xi -> [beta, xi] restricted to
// the span of `domain`, expressed back as matrices.
std::vector<Mat> ad_kernel(const Mat& beta, const std::vector<Mat>& domain) {
  const int m = static_cast<int>(domain.size());
  if (m == 0) return {};
  const int n = static_cast<int>(beta.rows());
  // Columns: bracket images flattened to real coordinates.
  RealMat a(2 * n * n, m);
  for (int j = 0; j < m; ++j) {
    Mat br = bracket(beta, domain[j]);
    for (int c = 0; c < n; ++c)
      for (int r = 0; r < n; ++r) {
        a(c * n + r, j) = br(r, c).real();
        a(n * n + c * n + r, j) = br(r, c).imag();
      }
  }
  Eigen::JacobiSVD<RealMat> svd(a, Eigen::ComputeFullV);
  double thresh = 1e-10 * std::max(1.0, svd.singularValues().size() > 0
                                            ? svd.singularValues()(0)
                                            : 0.0);
  std::vector<Mat> kernel;
  for (int j = 0; j < m; ++j) {
    double sv = j < svd.singularValues().size() ? svd.singularValues()(j) : 0.0;
    if (sv <= thresh) {
      Mat elem = Mat::Zero(n, n);
      for (int q = 0; q < m; ++q) elem += svd.matrixV()(q, j) * domain[q];
      kernel.push_back(elem);
    }
  }
  return kernel;
}

}  // namespace

CentralizerBasis centralizer_basis(const Direction& beta) {
  const auto& setup = *beta.setup();
  CentralizerBasis out;
  out.p_part = ad_kernel(beta.matrix(), setup.p_basis());
  out.k_part = ad_kernel(beta.matrix(), setup.k_basis());
  return out;
}

ParabolicData parabolic_data(const Direction& beta) {
  const int n = beta.setup()->n();
  const RealVec& ev = beta.eigenvalues();
  const double tie_tol = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());

  ParabolicData out{beta,
                    {},
                    {},
                    Eigen::MatrixXi::Zero(n, n),
                    Eigen::MatrixXi::Zero(n, n),
                    Eigen::MatrixXi::Zero(n, n)};
  std::vector<int> block_of(n);
  int start = 0, block = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && std::abs(ev(stop) - ev(start)) < tie_tol) ++stop;
    out.block_order.emplace_back(ev(start), stop - start);
    for (int j = start; j < stop; ++j) block_of[j] = block;
    out.flag.push_back(beta.eigenvectors().leftCols(stop));
    ++block;
    start = stop;
  }
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if (block_of[r] == block_of[c]) out.levi_mask(r, c) = 1;
      else if (block_of[r] < block_of[c]) out.upper_mask(r, c) = 1;
      else out.lower_mask(r, c) = 1;
    }
  return out;
}

std::pair<GroupElement, GroupElement> parabolic_split(const GroupElement& g,
                                                      const Direction& beta) {
  const auto& setup = *g.setup;
  const int n = setup.n();
  const Mat& q = beta.eigenvectors();
  Mat m = q.adjoint() * g.matrix * q;

  // Want m = k * L with L lower triangular: QR of the column/row reversed
  // matrix.  J m J = (J k J)(J L J) and J L J is upper triangular.
  Mat rev(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) rev(r, c) = m(n - 1 - r, n - 1 - c);
  Eigen::HouseholderQR<Mat> qr(rev);
  Mat qu = qr.householderQ();
  Mat ru = qu.adjoint() * rev;
  // Normalize the diagonal of R to be real positive.
  for (int j = 0; j < n; ++j) {
    Complex d = ru(j, j);
    double ad = std::abs(d);
    if (ad < 1e-14) throw NumericFailureError("parabolic_split: degenerate flag");
    Complex phase = d / ad;
    ru.row(j) *= std::conj(phase);
    qu.col(j) *= phase;
  }
  Mat k(n, n), h(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      k(r, c) = qu(n - 1 - r, n - 1 - c);
      h(r, c) = ru(n - 1 - r, n - 1 - c);
    }
  k = q * k * q.adjoint();
  h = q * h * q.adjoint();
  if (setup.real_entries()) {
    k = k.real().cast<Complex>();
    h = h.real().cast<Complex>();
  }
  if ((k * h - g.matrix).cwiseAbs().maxCoeff() > 1e-9)
    throw NumericFailureError("parabolic_split residual too large");
  return {GroupElement{g.setup, std::move(k)}, GroupElement{g.setup, std::move(h)}};
}

GroupElement pi_beta(const GroupElement& g, const Direction& beta, int sign) {
  if (sign != 1 && sign != -1) throw Error("pi_beta: sign must be +-1");
  const auto& setup = *g.setup;
  const int n = setup.n();
  const Mat& q = beta.eigenvectors();
  const RealVec& ev = beta.eigenvalues();
  Mat m = q.adjoint() * g.matrix * q;
  const double t = sign > 0 ? -20.0 : 20.0;

  ParabolicData data = parabolic_data(beta);
  Mat limit = Mat::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      double factor = std::exp(t * (ev(r) - ev(c)));
      double grown = std::abs(m(r, c)) * factor;
      if (grown > 1e8)
        throw NotInParabolicError("conjugation trajectory diverges");
      if (data.levi_mask(r, c)) limit(r, c) = m(r, c);
    }
  Mat out = q * limit * q.adjoint();
  if (setup.real_entries()) out = out.real().cast<Complex>();
  return GroupElement{g.setup, std::move(out)};
}

}  // namespace gradstab
