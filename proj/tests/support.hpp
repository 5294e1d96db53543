#pragma once

// Shared test utilities: seeded random generators for matrices, unitaries
// and representation tuples, plus independent brute-force oracles
// (a naive Kronecker product and the permutation-sum symmetrizer) used to
// cross-check the library implementations.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "subfock/subfock.hpp"

namespace subfock::testing {

using Rng = std::mt19937_64;

inline ComplexMatrix random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
  return m;
}

inline ComplexMatrix random_unitary(Rng& rng, Index n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
  ComplexMatrix q = qr.householderQ();
  // Fix the phase so the factorization is unique for a fixed seed.
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < n; ++j) {
    const Complex diag = r(j, j);
    if (std::abs(diag) > 0) q.col(j) *= diag / std::abs(diag);
  }
  return q;
}

inline ComplexMatrix random_psd(Rng& rng, Index n) {
  const ComplexMatrix g = random_matrix(rng, n, n);
  return g * g.adjoint() / static_cast<double>(n);
}

// A representation tuple conjugated from a triangular frame, so invariant
// subspaces come for free: U * span(e_0..e_{k-1}) is invariant for every
// member of the tuple.
struct FramedTuple {
  std::vector<ComplexMatrix> ops;
  ComplexMatrix frame; // unitary U
  Subspace invariant_subspace(Index k) const {
    return Subspace(ComplexMatrix(frame.leftCols(k)));
  }
};

inline void scale_row_to(std::vector<ComplexMatrix>& ops, double rho) {
  const Index h = ops.front().rows();
  ComplexMatrix row(h, static_cast<Index>(ops.size()) * h);
  for (size_t i = 0; i < ops.size(); ++i)
    row.middleCols(static_cast<Index>(i) * h, h) = ops[i];
  const double norm = op_norm(row);
  if (norm > 0)
    for (auto& t : ops) t *= rho / norm;
}

// d independent upper-triangular coefficients (strictly upper when
// nilpotent), conjugated by a random unitary and scaled to row norm rho.
// Valid on full systems only (no commutation relations imposed).
inline FramedTuple random_free_tuple(Rng& rng, Index d, Index h, double rho,
                                     bool nilpotent) {
  FramedTuple out;
  out.frame = random_unitary(rng, h);
  for (Index i = 0; i < d; ++i) {
    ComplexMatrix r = random_matrix(rng, h, h);
    for (Index a = 0; a < h; ++a)
      for (Index b = 0; b <= a - (nilpotent ? 0 : 1) && b < h; ++b)
        r(a, b) = Complex(0, 0);
    if (nilpotent) r.diagonal().setZero();
    out.ops.push_back(out.frame * r * out.frame.adjoint());
  }
  scale_row_to(out.ops, rho);
  return out;
}

// Commuting tuple: polynomials in one upper-triangular matrix (no constant
// term when nilpotent, strictly upper generator), same frame trick.
inline FramedTuple random_commuting_tuple(Rng& rng, Index d, Index h,
                                          double rho, bool nilpotent) {
  FramedTuple out;
  out.frame = random_unitary(rng, h);
  ComplexMatrix m = random_matrix(rng, h, h);
  for (Index a = 0; a < h; ++a)
    for (Index b = 0; b <= a - (nilpotent ? 0 : 1) && b < h; ++b)
      m(a, b) = Complex(0, 0);
  if (nilpotent) m.diagonal().setZero();
  m /= std::max(op_norm(m), 1.0);
  const ComplexMatrix m2 = m * m;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Index i = 0; i < d; ++i) {
    ComplexMatrix p = Complex(gauss(rng), gauss(rng)) * m +
                      Complex(gauss(rng), gauss(rng)) * m2;
    if (!nilpotent)
      p += Complex(gauss(rng), gauss(rng)) *
           ComplexMatrix::Identity(h, h) * 0.3;
    out.ops.push_back(out.frame * p * out.frame.adjoint());
  }
  scale_row_to(out.ops, rho);
  return out;
}

// A tuple valid on the given system: free for full tensor powers,
// commuting otherwise.
inline FramedTuple random_tuple_for(const SubproductSystem& sys, Rng& rng,
                                    Index h, double rho, bool nilpotent) {
  const bool full = sys.kind() == SubproductSystem::Kind::full;
  return full ? random_free_tuple(rng, sys.generator_dim(), h, rho, nilpotent)
              : random_commuting_tuple(rng, sys.generator_dim(), h, rho,
                                       nilpotent);
}

// Smallest invariant subspace containing the given vectors: grow the span
// by the coefficient images until the rank stabilizes.
inline Subspace orbit_subspace(const CovariantRep& rep,
                               const ComplexMatrix& seed) {
  Subspace s = range_isometry(seed);
  for (Index round = 0; round < rep.h_dim(); ++round) {
    ComplexMatrix grown(rep.h_dim(),
                        s.rank() * (rep.generator_dim() + 1));
    grown.leftCols(s.rank()) = s.basis();
    for (Index i = 0; i < rep.generator_dim(); ++i)
      grown.middleCols((i + 1) * s.rank(), s.rank()) =
          rep.coeff(i) * s.basis();
    Subspace next = range_isometry(grown);
    if (next.rank() == s.rank()) return next;
    s = std::move(next);
  }
  return s;
}

// Scaled CAR annihilation pair on the exterior algebra of C^2, in the
// basis {1, f_1, f_2, f_1 ^ f_2}: anticommuting square-zero operators, the
// canonical representation of the antisymmetric degree-2 system.
inline std::vector<ComplexMatrix> car_pair(double scale) {
  ComplexMatrix c1 = ComplexMatrix::Zero(4, 4);
  ComplexMatrix c2 = ComplexMatrix::Zero(4, 4);
  c1(0, 1) = 1.0;  // f_1 -> 1
  c1(2, 3) = 1.0;  // f_1 ^ f_2 -> f_2
  c2(0, 2) = 1.0;  // f_2 -> 1
  c2(1, 3) = -1.0; // f_1 ^ f_2 -> -f_1
  return {scale * c1, scale * c2};
}

// The Fock-space subspace of all degrees >= cut, for a shift (x) I_r.
inline Subspace degrees_from(const FockBasis& fock, Index cut, Index r = 1) {
  const Index total = fock.total_dim() * r;
  const Index off = fock.degree_offset(cut) * r;
  ComplexMatrix basis = ComplexMatrix::Zero(total, total - off);
  basis.bottomRows(total - off) =
      ComplexMatrix::Identity(total - off, total - off);
  return Subspace(std::move(basis));
}

// ---------------------------------------------------------------------------
// Independent oracles
// ---------------------------------------------------------------------------

// Entry-by-entry Kronecker product, written without the library helper.
inline ComplexMatrix naive_kron(const ComplexMatrix& a,
                                const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < out.rows(); ++i)
    for (Index j = 0; j < out.cols(); ++j)
      out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
  return out;
}

// The symmetrizer (1/n!) Sum_sigma P_sigma on (C^d)^{(x)n} by explicit
// enumeration of all n! position permutations.
inline ComplexMatrix naive_symmetrizer(Index d, Index n) {
  const Index amb = [&] {
    Index v = 1;
    for (Index i = 0; i < n; ++i) v *= d;
    return v;
  }();
  std::vector<Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  ComplexMatrix p = ComplexMatrix::Zero(amb, amb);
  double count = 0;
  do {
    for (Index w = 0; w < amb; ++w) {
      // digits of w, most significant = first tensor factor
      std::vector<Index> digits(static_cast<size_t>(n));
      Index tmp = w;
      for (Index k = n - 1; k >= 0; --k) {
        digits[static_cast<size_t>(k)] = tmp % d;
        tmp /= d;
      }
      Index target = 0;
      for (Index k = 0; k < n; ++k)
        target = target * d + digits[static_cast<size_t>(perm[static_cast<size_t>(k)])];
      p(target, w) += 1.0;
    }
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return p / count;
}

inline std::int64_t binom(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

} // namespace subfock::testing
