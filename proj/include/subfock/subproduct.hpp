#pragma once

// Truncated standard subproduct systems over scalar coefficients.
//
// A system is the data (d, N, V_0..V_N) where V_n is a d^n x dim X(n)
// isometry whose range is the degree-n fiber X(n) inside the tensor power
// E^{(x)n}, E = C^d.  The projections p_n = V_n V_n^* must satisfy the
// compatibility identities
//
//     p_{n+m} (p_n (x) I) = p_{n+m} = p_{n+m} (I (x) p_m),
//
// which make every degree an orthogonally complementable piece of any
// tensor-power factorization.  Degrees are stored compressed (through the
// V_n) so the Fock space carries Sum dim X(n) coordinates rather than
// Sum d^n.

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "subfock/linalg.hpp"

namespace subfock {

namespace detail {

inline Index int_pow(Index base, Index exp) {
  Index out = 1;
  for (Index i = 0; i < exp; ++i) out *= base;
  return out;
}

inline std::int64_t binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::int64_t out = 1;
  for (std::int64_t i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

} // namespace detail

// ---------------------------------------------------------------------------
// SubproductSystem
// ---------------------------------------------------------------------------

class SubproductSystem {
public:
  enum class Kind { full, symmetric, custom };

  SubproductSystem(Kind kind, Index d, Index truncation,
                   std::vector<ComplexMatrix> isometries)
      : kind_(kind), d_(d), n_(truncation), v_(std::move(isometries)) {
    if (d_ < 1) throw ShapeMismatch("SubproductSystem: d must be >= 1");
    if (n_ < 1) throw ShapeMismatch("SubproductSystem: N must be >= 1");
    if (static_cast<Index>(v_.size()) != n_ + 1)
      throw ShapeMismatch("SubproductSystem: need isometries V_0..V_N");
    for (Index n = 0; n <= n_; ++n) {
      if (v_[static_cast<size_t>(n)].rows() != detail::int_pow(d_, n))
        throw ShapeMismatch("SubproductSystem: V_" + std::to_string(n) +
                            " has wrong ambient dimension");
    }
  }

  Kind kind() const { return kind_; }
  Index generator_dim() const { return d_; }
  Index truncation() const { return n_; }

  // dim X(n)
  Index dim(Index n) const {
    check_degree(n);
    return v_[static_cast<size_t>(n)].cols();
  }

  // The isometry V_n : X(n) -> E^{(x)n}.
  const ComplexMatrix& isometry(Index n) const {
    check_degree(n);
    return v_[static_cast<size_t>(n)];
  }

  // p_n = V_n V_n^* on E^{(x)n}.
  ComplexMatrix projector(Index n) const {
    const ComplexMatrix& v = isometry(n);
    return v * v.adjoint();
  }

  // dim X(j) continued past the truncation degree, where the construction
  // determines it (full and symmetric systems).  Returns -1 when unknown.
  Index dim_extended(Index j) const {
    if (j <= n_) return dim(j);
    switch (kind_) {
      case Kind::full:
        return detail::int_pow(d_, j);
      case Kind::symmetric:
        return static_cast<Index>(detail::binomial(j + d_ - 1, j));
      case Kind::custom:
        return -1;
    }
    return -1;
  }

private:
  void check_degree(Index n) const {
    if (n < 0 || n > n_)
      throw DegreeOutOfRange("degree " + std::to_string(n) +
                             " outside truncation " + std::to_string(n_));
  }

  Kind kind_;
  Index d_;
  Index n_;
  std::vector<ComplexMatrix> v_;
};

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

// The full tensor-power system: X(n) = E^{(x)n}, every V_n an identity.
inline SubproductSystem full_system(Index d, Index truncation) {
  std::vector<ComplexMatrix> v;
  v.reserve(static_cast<size_t>(truncation) + 1);
  for (Index n = 0; n <= truncation; ++n)
    v.push_back(ComplexMatrix::Identity(detail::int_pow(d, n),
                                        detail::int_pow(d, n)));
  return SubproductSystem(SubproductSystem::Kind::full, d, truncation,
                          std::move(v));
}

// The symmetric system: X(n) is the n-fold symmetric tensor power of C^d.
//
// The basis of X(n) is the occupation-number basis: one column per
// multiset of n letters from {0..d-1}, equal to the normalized sum of the
// distinct words realizing that multiset.  These columns are exactly
// orthonormal and span the range of the symmetrizer (1/n!) Sum_sigma P_sigma.
// Truncation is capped (desk scale) since the ambient spaces grow as d^n.
inline SubproductSystem symmetric_system(Index d, Index truncation,
                                         Index cap = 8) {
  if (truncation > cap)
    throw DegreeOutOfRange("symmetric_system: truncation " +
                           std::to_string(truncation) + " above the cap " +
                           std::to_string(cap));
  std::vector<ComplexMatrix> v;
  v.reserve(static_cast<size_t>(truncation) + 1);
  v.push_back(ComplexMatrix::Ones(1, 1));
  for (Index n = 1; n <= truncation; ++n) {
    const Index amb = detail::int_pow(d, n);
    // Group words by their letter multiset, in order of first appearance.
    std::vector<std::vector<Index>> multiset_words;
    std::vector<std::vector<Index>> seen_signatures;
    for (Index w = 0; w < amb; ++w) {
      std::vector<Index> counts(static_cast<size_t>(d), 0);
      Index tmp = w;
      for (Index pos = 0; pos < n; ++pos) {
        counts[static_cast<size_t>(tmp % d)]++;
        tmp /= d;
      }
      Index col = -1;
      for (size_t s = 0; s < seen_signatures.size(); ++s)
        if (seen_signatures[s] == counts) {
          col = static_cast<Index>(s);
          break;
        }
      if (col < 0) {
        col = static_cast<Index>(seen_signatures.size());
        seen_signatures.push_back(counts);
        multiset_words.emplace_back();
      }
      multiset_words[static_cast<size_t>(col)].push_back(w);
    }
    const Index r = static_cast<Index>(multiset_words.size());
    ComplexMatrix basis = ComplexMatrix::Zero(amb, r);
    for (Index c = 0; c < r; ++c) {
      const auto& words = multiset_words[static_cast<size_t>(c)];
      const double coeff = 1.0 / std::sqrt(static_cast<double>(words.size()));
      for (Index w : words) basis(w, c) = coeff;
    }
    v.push_back(std::move(basis));
  }
  return SubproductSystem(SubproductSystem::Kind::symmetric, d, truncation,
                          std::move(v));
}

// A system generated in degree two: X(2) is given, and for n >= 3
//
//     X(n) = Intersection over i of  E^{(x)i} (x) X(2) (x) E^{(x)(n-2-i)}.
//
// Compatibility holds by construction since every constraint defining
// X(n+m) already constrains X(n) (x) E^{(x)m} and E^{(x)n} (x) X(m).
inline SubproductSystem degree2_system(Index d, Index truncation,
                                       const Subspace& x2) {
  if (x2.ambient_dim() != d * d)
    throw AmbientMismatch("degree2_system: X(2) must live in E (x) E");
  if (truncation < 2)
    throw ShapeMismatch("degree2_system: truncation must be >= 2");
  std::vector<ComplexMatrix> v;
  v.reserve(static_cast<size_t>(truncation) + 1);
  v.push_back(ComplexMatrix::Ones(1, 1));
  v.push_back(ComplexMatrix::Identity(d, d));
  v.push_back(x2.basis());
  for (Index n = 3; n <= truncation; ++n) {
    std::vector<Subspace> terms;
    terms.reserve(static_cast<size_t>(n - 1));
    for (Index i = 0; i + 2 <= n; ++i) {
      const Index left = detail::int_pow(d, i);
      const Index right = detail::int_pow(d, n - 2 - i);
      ComplexMatrix b = tensor_product(
          tensor_product(ComplexMatrix::Identity(left, left), x2.basis()),
          ComplexMatrix::Identity(right, right));
      terms.emplace_back(std::move(b));
    }
    v.push_back(subspace_intersection(terms).basis());
  }
  return SubproductSystem(SubproductSystem::Kind::custom, d, truncation,
                          std::move(v));
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct SystemValidation {
  double isometry_residual = 0.0;    // max_n ||V_n^* V_n - I||_F
  double compat_residual = 0.0;      // max over both families, Frobenius
  bool dims_ok = false;              // dim X(0) = 1, dim X(1) = d
  double max_residual = 0.0;
  bool passed = false;
};

// Checks orthonormality of every V_n and both compatibility families
//     p_{n+m}(p_n (x) I) = p_{n+m} = p_{n+m}(I (x) p_m)
// for all n, m >= 1 with n + m <= N.  Residuals are Frobenius norms
// (upper bounds on the operator norms).
inline SystemValidation validate_system(const SubproductSystem& sys,
                                        double tol = 1e-9) {
  SystemValidation out;
  const Index cap = sys.truncation();
  for (Index n = 0; n <= cap; ++n) {
    const ComplexMatrix& v = sys.isometry(n);
    const Index r = v.cols();
    if (r == 0) continue;
    const double res =
        (v.adjoint() * v - ComplexMatrix::Identity(r, r)).norm();
    out.isometry_residual = std::max(out.isometry_residual, res);
  }
  out.dims_ok = sys.dim(0) == 1 && sys.dim(1) == sys.generator_dim();

  const Index d = sys.generator_dim();
  std::vector<ComplexMatrix> proj;
  proj.reserve(static_cast<size_t>(cap) + 1);
  for (Index n = 0; n <= cap; ++n) proj.push_back(sys.projector(n));
  for (Index n = 1; n < cap; ++n) {
    for (Index m = 1; n + m <= cap; ++m) {
      const ComplexMatrix& p = proj[static_cast<size_t>(n + m)];
      // p (p_n (x) I) = ((p_n (x) I) p)^* since both factors are Hermitian.
      const ComplexMatrix left =
          kron_id_apply(proj[static_cast<size_t>(n)], detail::int_pow(d, m), p)
              .adjoint();
      const ComplexMatrix right =
          id_kron_apply(detail::int_pow(d, n), proj[static_cast<size_t>(m)], p)
              .adjoint();
      out.compat_residual = std::max(out.compat_residual, (left - p).norm());
      out.compat_residual = std::max(out.compat_residual, (right - p).norm());
    }
  }
  out.max_residual = std::max(out.isometry_residual, out.compat_residual);
  if (!out.dims_ok) out.max_residual = std::max(out.max_residual, 1.0);
  out.passed = out.max_residual <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// Fock space
// ---------------------------------------------------------------------------

// Coordinates for F_X = X(0) + X(1) + ... + X(N), one contiguous block per
// degree in the compressed (V_n) coordinates.
class FockBasis {
public:
  explicit FockBasis(SubproductSystem system) : system_(std::move(system)) {
    offsets_.resize(static_cast<size_t>(system_.truncation()) + 2, 0);
    for (Index n = 0; n <= system_.truncation(); ++n)
      offsets_[static_cast<size_t>(n) + 1] =
          offsets_[static_cast<size_t>(n)] + system_.dim(n);
  }

  const SubproductSystem& system() const { return system_; }
  Index total_dim() const { return offsets_.back(); }
  Index degree_offset(Index n) const {
    if (n < 0 || n > system_.truncation() + 1)
      throw DegreeOutOfRange("degree_offset: degree out of range");
    return offsets_[static_cast<size_t>(n)];
  }
  Index degree_dim(Index n) const { return system_.dim(n); }

private:
  SubproductSystem system_;
  std::vector<Index> offsets_;
};

inline FockBasis fock_basis(const SubproductSystem& sys) {
  return FockBasis(sys);
}

// ---------------------------------------------------------------------------
// Creation operators
// ---------------------------------------------------------------------------

// The d creation operators S_i on the truncated Fock space: the block from
// degree m to m+1 is V_{m+1}^* (e_i (x) V_m .), and degree N maps to zero.
inline std::vector<ComplexMatrix> shift_matrices(const FockBasis& fock) {
  const SubproductSystem& sys = fock.system();
  const Index d = sys.generator_dim();
  const Index total = fock.total_dim();
  std::vector<ComplexMatrix> out(static_cast<size_t>(d),
                                 ComplexMatrix::Zero(total, total));
  for (Index m = 0; m + 1 <= sys.truncation(); ++m) {
    const Index dm = detail::int_pow(d, m);
    const ComplexMatrix& vm = sys.isometry(m);
    const ComplexMatrix& vnext = sys.isometry(m + 1);
    for (Index i = 0; i < d; ++i) {
      // V_{m+1}^* restricted to the i-th row block realizes e_i (x) . .
      out[static_cast<size_t>(i)].block(fock.degree_offset(m + 1),
                                        fock.degree_offset(m),
                                        sys.dim(m + 1), sys.dim(m)) =
          vnext.middleRows(i * dm, dm).adjoint() * vm;
    }
  }
  return out;
}

// The degree-n creation operator S_n(zeta) for zeta in X(n) (compressed
// coordinates), as a matrix on the truncated Fock space.
inline ComplexMatrix shift_n(const FockBasis& fock, Index n,
                             const ComplexVector& zeta) {
  const SubproductSystem& sys = fock.system();
  if (n < 0 || n > sys.truncation())
    throw DegreeOutOfRange("shift_n: degree out of range");
  if (zeta.size() != sys.dim(n))
    throw ShapeMismatch("shift_n: zeta has wrong dimension");
  const Index total = fock.total_dim();
  if (n == 0) return zeta[0] * ComplexMatrix::Identity(total, total);

  const ComplexVector full = sys.isometry(n) * zeta; // in E^{(x)n}
  ComplexMatrix out = ComplexMatrix::Zero(total, total);
  const Index d = sys.generator_dim();
  for (Index m = 0; n + m <= sys.truncation(); ++m) {
    const Index dm = detail::int_pow(d, m);
    // zeta (x) V_m, then compress through V_{n+m}.
    const ComplexMatrix lifted =
        kron_id_apply(full, dm, sys.isometry(m));
    out.block(fock.degree_offset(n + m), fock.degree_offset(m),
              sys.dim(n + m), sys.dim(m)) =
        sys.isometry(n + m).adjoint() * lifted;
  }
  return out;
}

} // namespace subfock
