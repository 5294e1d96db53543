#pragma once

// Dense complex linear-algebra substrate: tensor products, PSD square
// roots, orthonormal range bases, and subspace arithmetic (intersection,
// complement, distance).  Everything downstream is built on these.
//
// Conventions fixed here and relied on everywhere else:
//   * (A (x) B)(x (x) y) = Ax (x) By with index(x (x) y) = index(x)*dim_y + index(y),
//     i.e. the first factor is the major index (row-major Kronecker).
//   * Subspaces are stored as isometries whose columns are an orthonormal
//     basis; the projection onto the subspace is basis * basis^*.
//   * Orthonormal bases produced by range_isometry are deterministic:
//     singular vectors ordered by decreasing singular value, each column
//     phased so its largest-modulus entry is real positive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "subfock/errors.hpp"

namespace subfock {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Relative singular-value cutoff used for all rank decisions.
inline constexpr double kRankCutoff = 1e-10;

// Inputs whose largest singular value falls below this are floating-point
// zero: products that vanish exactly in exact arithmetic land here, and a
// relative cutoff must not resurrect their rounding noise as rank.
inline constexpr double kAbsoluteFloor = 1e-12;

// ---------------------------------------------------------------------------
// Norms
// ---------------------------------------------------------------------------

// Operator (spectral) norm.  Computed from the Gram matrix on the smaller
// side, so wide/tall matrices cost only min(r,c)^3.
inline double op_norm(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  const ComplexMatrix gram = (m.rows() <= m.cols())
                                 ? ComplexMatrix(m * m.adjoint())
                                 : ComplexMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues().cwiseMax(0.0).maxCoeff();
  return std::sqrt(top);
}

// Deviation from Hermitian symmetry, ||A - A^*||.
inline double hermitian_defect(const ComplexMatrix& a) {
  if (a.rows() != a.cols())
    throw ShapeMismatch("hermitian_defect: matrix is not square");
  return op_norm(a - a.adjoint());
}

// ---------------------------------------------------------------------------
// Tensor products
// ---------------------------------------------------------------------------

// Kronecker product with the first factor as major index.
inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// (I_k (x) M) * X without materializing the Kronecker factor.
inline ComplexMatrix id_kron_apply(Index k, const ComplexMatrix& m,
                                   const ComplexMatrix& x) {
  if (x.rows() != k * m.cols())
    throw ShapeMismatch("id_kron_apply: row count mismatch");
  ComplexMatrix out(k * m.rows(), x.cols());
  for (Index i = 0; i < k; ++i)
    out.middleRows(i * m.rows(), m.rows()).noalias() =
        m * x.middleRows(i * m.cols(), m.cols());
  return out;
}

// (A (x) I_k) * X without materializing the Kronecker factor.
inline ComplexMatrix kron_id_apply(const ComplexMatrix& a, Index k,
                                   const ComplexMatrix& x) {
  if (x.rows() != a.cols() * k)
    throw ShapeMismatch("kron_id_apply: row count mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(a.rows() * k, x.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) {
      if (a(i, j) == Complex(0, 0)) continue;
      out.middleRows(i * k, k).noalias() += a(i, j) * x.middleRows(j * k, k);
    }
  return out;
}

// ---------------------------------------------------------------------------
// PSD square root
// ---------------------------------------------------------------------------

// Hermitian PSD square root.  Eigenvalues in [-tol, 0) are clamped to zero;
// an eigenvalue below -tol means the input was not PSD.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& a, double tol = 1e-10) {
  if (a.rows() != a.cols())
    throw ShapeMismatch("psd_sqrt: matrix is not square");
  if (a.rows() == 0) return a;
  const double herm = op_norm(a - a.adjoint());
  if (herm > tol)
    throw NotHermitian("psd_sqrt: ||A - A*|| = " + std::to_string(herm));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (a + a.adjoint())));
  RealVector lam = es.eigenvalues();
  for (Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -tol)
      throw NotPSD("psd_sqrt: eigenvalue " + std::to_string(lam[i]) +
                   " below -tol");
    lam[i] = std::sqrt(std::max(lam[i], 0.0));
  }
  return es.eigenvectors() * lam.asDiagonal() *
         es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------
// Subspaces
// ---------------------------------------------------------------------------

// A subspace of a coordinate space, stored as an isometry whose columns
// form an orthonormal basis.  The projection is basis() * basis().adjoint().
class Subspace {
public:
  Subspace() : basis_(0, 0) {}

  // An empty subspace of the given ambient dimension.
  explicit Subspace(Index ambient_dim)
      : basis_(ComplexMatrix::Zero(ambient_dim, 0)) {}

  // Wraps a matrix whose columns are already orthonormal (checked).
  explicit Subspace(ComplexMatrix orthonormal_basis)
      : basis_(std::move(orthonormal_basis)) {
    const Index r = basis_.cols();
    if (r > basis_.rows())
      throw ShapeMismatch("Subspace: more basis vectors than ambient dim");
    if (r > 0) {
      const double defect =
          (basis_.adjoint() * basis_ - ComplexMatrix::Identity(r, r)).norm();
      if (defect > 1e-12 * std::sqrt(static_cast<double>(r)) + 1e-12)
        throw ShapeMismatch(
            "Subspace: basis columns not orthonormal (defect " +
            std::to_string(defect) + ")");
    }
  }

  Index ambient_dim() const { return basis_.rows(); }
  Index rank() const { return basis_.cols(); }
  const ComplexMatrix& basis() const { return basis_; }

  ComplexMatrix projector() const { return basis_ * basis_.adjoint(); }

private:
  ComplexMatrix basis_;
};

namespace detail {

// Phase-fix a column so its largest-modulus entry is real positive.
// Ties break toward the smallest index.
inline void fix_column_phase(Eigen::Ref<ComplexVector> col) {
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < col.size(); ++i) {
    const double m = std::abs(col[i]);
    if (m > best + 1e-15) {
      best = m;
      arg = i;
    }
  }
  if (best <= 0.0) return;
  const Complex phase = std::conj(col[arg]) / best;
  col *= phase;
}

} // namespace detail

// Orthonormal basis of the column space of `a`.  Rank is decided by
// singular values above tol * sigma_max; the basis is deterministic for a
// fixed input (descending singular values, positive-phase convention).
inline Subspace range_isometry(const ComplexMatrix& a,
                               double tol = kRankCutoff) {
  if (a.cols() == 0 || a.rows() == 0) return Subspace(a.rows());
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeThinU);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (smax <= kAbsoluteFloor) return Subspace(a.rows());
  Index r = 0;
  while (r < sv.size() && sv[r] > tol * smax && sv[r] > 0.0) ++r;
  ComplexMatrix basis = svd.matrixU().leftCols(r);
  for (Index j = 0; j < r; ++j) detail::fix_column_phase(basis.col(j));
  return Subspace(std::move(basis));
}

// Orthonormal basis of the orthogonal complement, via a Householder
// factorization of the subspace basis.
inline Subspace orthogonal_complement(const Subspace& s) {
  const Index n = s.ambient_dim();
  const Index r = s.rank();
  if (r == 0) return Subspace(ComplexMatrix::Identity(n, n));
  if (r == n) return Subspace(n);
  Eigen::HouseholderQR<ComplexMatrix> qr(s.basis());
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix tail = q.rightCols(n - r);
  for (Index j = 0; j < tail.cols(); ++j)
    detail::fix_column_phase(tail.col(j));
  return Subspace(std::move(tail));
}

// Intersection of subspaces, computed as the kernel of the stacked
// complementary projections: x lies in the intersection iff every
// (I - P_i) x = 0.
inline Subspace subspace_intersection(const std::vector<Subspace>& parts) {
  if (parts.empty())
    throw AmbientMismatch("subspace_intersection: empty input list");
  const Index n = parts.front().ambient_dim();
  for (const auto& s : parts)
    if (s.ambient_dim() != n)
      throw AmbientMismatch("subspace_intersection: ambient dims differ");

  ComplexMatrix stacked(n * static_cast<Index>(parts.size()), n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (Index i = 0; i < static_cast<Index>(parts.size()); ++i)
    stacked.middleRows(i * n, n) = id - parts[static_cast<size_t>(i)].projector();

  // Kernel vectors are the right singular vectors with relatively tiny
  // singular value.  If every projection is the identity the stack is
  // zero and the kernel is everything.
  Eigen::BDCSVD<ComplexMatrix> svd(stacked, Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (smax <= kAbsoluteFloor) return Subspace(ComplexMatrix::Identity(n, n));
  Index r = 0;
  while (r < sv.size() && sv[r] > kRankCutoff * smax) ++r;
  ComplexMatrix basis = svd.matrixV().rightCols(n - r);
  for (Index j = 0; j < basis.cols(); ++j)
    detail::fix_column_phase(basis.col(j));
  return Subspace(std::move(basis));
}

inline Subspace subspace_intersection(const Subspace& a, const Subspace& b) {
  return subspace_intersection(std::vector<Subspace>{a, b});
}

// ||P_A - P_B||.  Zero iff the subspaces coincide; at most one when the
// ranks agree.
inline double subspace_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim())
    throw AmbientMismatch("subspace_distance: ambient dims differ");
  if (a.ambient_dim() == 0) return 0.0;
  return op_norm(a.projector() - b.projector());
}

} // namespace subfock
