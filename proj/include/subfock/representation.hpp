#pragma once

// Covariant representations of a truncated standard subproduct system as
// matrix tuples.
//
// A representation on H = C^h is the tuple (T_1..T_d) packed into the row
// operator rt = [T_1 ... T_d] : E (x) H -> H.  Degree-n actions are the
// compressions
//
//     tt_n = mu_n (V_n (x) I_H),   mu_n = rt (I_E (x) rt) ... (I (x) rt),
//
// and a tuple is a representation of the system precisely when mu_n kills
// (I - p_n) (x) I_H at every degree.  The completely positive map
// theta(a) = Sum_i T_i a T_i^* and its iterates drive purity, the defect
// operator, the Poisson kernel and all curvature computations.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subfock/linalg.hpp"
#include "subfock/subproduct.hpp"

namespace subfock {

// ---------------------------------------------------------------------------
// CovariantRep
// ---------------------------------------------------------------------------

class CovariantRep {
public:
  CovariantRep(SubproductSystem system, std::vector<ComplexMatrix> coeffs)
      : system_(std::move(system)), coeffs_(std::move(coeffs)) {
    if (static_cast<Index>(coeffs_.size()) != system_.generator_dim())
      throw ShapeMismatch("CovariantRep: need exactly d coefficient matrices");
    if (coeffs_.empty() || coeffs_.front().rows() == 0)
      throw ShapeMismatch("CovariantRep: zero-dimensional H is rejected");
    h_ = coeffs_.front().rows();
    for (const auto& t : coeffs_)
      if (t.rows() != h_ || t.cols() != h_)
        throw ShapeMismatch("CovariantRep: coefficients must be square and "
                            "of equal size");
  }

  const SubproductSystem& system() const { return system_; }
  Index h_dim() const { return h_; }
  Index generator_dim() const { return system_.generator_dim(); }
  const ComplexMatrix& coeff(Index i) const {
    return coeffs_[static_cast<size_t>(i)];
  }
  const std::vector<ComplexMatrix>& coeffs() const { return coeffs_; }

  // Nonzero r marks this as the induced shift S (x) I_r, enabling
  // structured degree actions; zero means a general tuple.
  Index shift_multiplicity() const { return shift_multiplicity_; }
  void mark_as_induced_shift(Index r) { shift_multiplicity_ = r; }

  // rt = [T_1 ... T_d] : E (x) H -> H.
  ComplexMatrix row_matrix() const {
    const Index d = generator_dim();
    ComplexMatrix row(h_, d * h_);
    for (Index i = 0; i < d; ++i)
      row.middleCols(i * h_, h_) = coeffs_[static_cast<size_t>(i)];
    return row;
  }

  double row_norm() const { return op_norm(row_matrix()); }

private:
  SubproductSystem system_;
  std::vector<ComplexMatrix> coeffs_;
  Index h_;
  Index shift_multiplicity_ = 0;
};

// ---------------------------------------------------------------------------
// Degree actions
// ---------------------------------------------------------------------------

// mu_n : E^{(x)n} (x) H -> H, the n-fold composition of the row operator,
// mapping e_{i_1} (x) ... (x) e_{i_n} (x) h to T_{i_1} ... T_{i_n} h.
inline ComplexMatrix mu_n(const CovariantRep& rep, Index n) {
  const Index h = rep.h_dim();
  if (n == 0) return ComplexMatrix::Identity(h, h);
  const ComplexMatrix row_adj = rep.row_matrix().adjoint();
  ComplexMatrix acc = row_adj; // mu_1^*
  Index block = 1;
  for (Index k = 2; k <= n; ++k) {
    block *= rep.generator_dim();
    acc = id_kron_apply(block, row_adj, acc); // (I (x) rt^*) mu_{k-1}^*
  }
  return acc.adjoint();
}

// tt_n = mu_n (V_n (x) I_H) : X(n) (x) H -> H in compressed coordinates.
//
// Computed degree by degree through the embeddings
// W_k = (V_{k-1}^* (x) I_E) V_k of X(k) into X(k-1) (x) E, so intermediates
// stay at the compressed dimensions; for relation-compliant tuples this
// agrees with mu_n (V_n (x) I_H) exactly.
inline ComplexMatrix t_tilde_n(const CovariantRep& rep, Index n) {
  const SubproductSystem& sys = rep.system();
  if (n < 0 || n > sys.truncation())
    throw DegreeOutOfRange("t_tilde_n: degree " + std::to_string(n) +
                           " beyond truncation");
  const Index h = rep.h_dim();
  if (n == 0) return ComplexMatrix::Identity(h, h);
  const ComplexMatrix row_adj = rep.row_matrix().adjoint();
  ComplexMatrix acc = row_adj; // tt_1^* (V_1 = I)
  for (Index k = 2; k <= n; ++k) {
    const ComplexMatrix w =
        kron_id_apply(sys.isometry(k - 1).adjoint(), rep.generator_dim(),
                      sys.isometry(k));
    acc = id_kron_apply(sys.dim(k - 1), row_adj, acc);
    acc = kron_id_apply(w.adjoint(), h, acc);
  }
  return acc.adjoint();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct RepValidation {
  double row_norm = 0.0;
  // ||mu_n ((I - p_n) (x) I_H)|| for n = 2..N, indexed from degree 2.
  std::vector<double> relation_residuals;
  bool valid = false;

  double relation_residual(Index degree) const {
    return relation_residuals[static_cast<size_t>(degree - 2)];
  }
};

// Row-contractivity plus relation compliance at every degree 2..N.
inline RepValidation validate_rep(const SubproductSystem& sys,
                                  const std::vector<ComplexMatrix>& coeffs,
                                  double tol = 1e-9) {
  CovariantRep rep(sys, coeffs); // shape checks
  RepValidation out;
  out.row_norm = rep.row_norm();
  const Index h = rep.h_dim();
  bool ok = out.row_norm <= 1.0 + tol;
  for (Index n = 2; n <= sys.truncation(); ++n) {
    const ComplexMatrix mu = mu_n(rep, n);
    const ComplexMatrix projected =
        kron_id_apply(sys.projector(n), h, mu.adjoint()).adjoint();
    const double res = op_norm(mu - projected);
    out.relation_residuals.push_back(res);
    ok = ok && res <= tol;
  }
  out.valid = ok;
  return out;
}

// ---------------------------------------------------------------------------
// The completely positive map and purity
// ---------------------------------------------------------------------------

// theta(a) = Sum_i T_i a T_i^*.
inline ComplexMatrix theta(const CovariantRep& rep, const ComplexMatrix& a) {
  const Index h = rep.h_dim();
  if (a.rows() != h || a.cols() != h)
    throw ShapeMismatch("theta: argument must be h_dim x h_dim");
  ComplexMatrix out = ComplexMatrix::Zero(h, h);
  for (Index i = 0; i < rep.generator_dim(); ++i)
    out.noalias() += rep.coeff(i) * a * rep.coeff(i).adjoint();
  return out;
}

// k-fold iterate of theta.
inline ComplexMatrix theta_pow(const CovariantRep& rep, Index k,
                               const ComplexMatrix& a) {
  const Index h = rep.h_dim();
  if (a.rows() != h || a.cols() != h)
    throw ShapeMismatch("theta_pow: argument must be h_dim x h_dim");
  ComplexMatrix out = a;
  for (Index j = 0; j < k; ++j) out = theta(rep, out);
  return out;
}

// The single-step form theta^k(a) = tt_k (I (x) a) tt_k^*; only available
// up to the truncation degree.  Cross-validates the iterated form.
inline ComplexMatrix theta_pow_direct(const CovariantRep& rep, Index k,
                                      const ComplexMatrix& a) {
  const SubproductSystem& sys = rep.system();
  if (k > sys.truncation())
    throw DegreeOutOfRange("theta_pow_direct: degree beyond truncation");
  if (a.rows() != rep.h_dim() || a.cols() != rep.h_dim())
    throw ShapeMismatch("theta_pow_direct: argument must be h_dim x h_dim");
  const ComplexMatrix tt = t_tilde_n(rep, k);
  return tt * id_kron_apply(sys.dim(k), a, tt.adjoint());
}

struct PurityResult {
  ComplexMatrix limit;    // last iterate Q_k = theta^k(I)
  double q_norm = 0.0;
  bool is_pure = false;
  Index k_used = 0;
  bool converged = false; // false = k_max exhausted with step above tol
  double last_step = 0.0;
};

// Iterates Q_k = theta^k(I) until either ||Q_k|| <= tol (pure: the
// sequence is nonincreasing, so it stays below tol) or the step stalls at
// a nonzero limit.  The stall threshold is tol/100 so that slow geometric
// decay toward zero is not misread as a nonzero limit; a representation
// mixing slower than that within k_max is reported unconverged.
inline PurityResult purity(const CovariantRep& rep, double tol = 1e-9,
                           Index k_max = 200) {
  const Index h = rep.h_dim();
  const double step_tol = tol * 1e-2;
  PurityResult out;
  if (rep.shift_multiplicity() > 0) {
    // theta^k(I) for the induced shift is the projection onto degrees
    // >= k (validated against explicit iteration in the test suite), so
    // the iterates hit zero exactly at k = N + 1.
    out.limit = ComplexMatrix::Zero(h, h);
    out.q_norm = 0.0;
    out.is_pure = true;
    out.k_used = std::min(rep.system().truncation() + 1, k_max);
    out.converged = out.k_used == rep.system().truncation() + 1;
    out.last_step = 1.0;
    return out;
  }
  ComplexMatrix q = ComplexMatrix::Identity(h, h);
  for (Index k = 1; k <= k_max; ++k) {
    ComplexMatrix next = theta(rep, q);
    const ComplexMatrix diff = 0.5 * (q - next + (q - next).adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff,
                                                    Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw Error("purity: theta iterates failed monotonicity");
    out.last_step = op_norm(diff);
    q = std::move(next);
    out.k_used = k;
    out.q_norm = op_norm(q);
    if (out.q_norm <= tol) {
      out.is_pure = true;
      out.converged = true;
      break;
    }
    if (out.last_step <= step_tol) {
      out.converged = true;
      break;
    }
  }
  out.limit = std::move(q);
  return out;
}

// ---------------------------------------------------------------------------
// Defect and Poisson kernel
// ---------------------------------------------------------------------------

struct Defect {
  ComplexMatrix delta;  // (I - rt rt^*)^{1/2} on H
  Subspace space;       // closure of the range of delta, inside H
};

inline Defect defect(const CovariantRep& rep) {
  const Index h = rep.h_dim();
  const ComplexMatrix d2 =
      ComplexMatrix::Identity(h, h) -
      theta(rep, ComplexMatrix::Identity(h, h));
  Defect out{psd_sqrt(d2, 1e-10), Subspace(h)};
  // delta is already a square root, so rounding noise in delta^2 of size
  // eps surfaces in delta at size sqrt(eps); the rank cutoff moves to
  // sqrt(kRankCutoff) to keep the decision at the delta^2 scale.
  out.space = range_isometry(out.delta, std::sqrt(kRankCutoff));
  return out;
}

// The Poisson kernel K : H -> F_X (x) D, with the defect space compressed
// to its rank.  Block n is (I_{X(n)} (x) D^* delta) tt_n^*; within a degree
// the index runs X(n)-major, defect-minor.
class PoissonKernel {
public:
  PoissonKernel(FockBasis fock, ComplexMatrix matrix, Defect def)
      : fock_(std::move(fock)), matrix_(std::move(matrix)),
        defect_(std::move(def)) {}

  const FockBasis& fock() const { return fock_; }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Defect& defect() const { return defect_; }
  Index defect_rank() const { return defect_.space.rank(); }
  Index codomain_dim() const { return matrix_.rows(); }

  // Row block of degree n.
  Index block_offset(Index n) const {
    return fock_.degree_offset(n) * defect_rank();
  }
  Index block_rows(Index n) const {
    return fock_.degree_dim(n) * defect_rank();
  }

private:
  FockBasis fock_;
  ComplexMatrix matrix_;
  Defect defect_;
};

inline PoissonKernel poisson_kernel(const CovariantRep& rep) {
  Defect def = defect(rep);
  const Index r = def.space.rank();
  const Index h = rep.h_dim();
  FockBasis fock(rep.system());
  const ComplexMatrix compress = def.space.basis().adjoint() * def.delta;

  // Adjoint blocks K_n^* = tt_n (I (x) compress^*), assembled through the
  // word-basis recursion Z_k = mu_k (I (x) x) = [T_1 Z_{k-1} .. T_d Z_{k-1}]
  // followed by compression with V_n.  Everything stays h-thin, which
  // matters when this runs on large restricted representations.
  const ComplexMatrix x = compress.adjoint(); // h x r
  ComplexMatrix kadj(h, fock.total_dim() * r);
  ComplexMatrix z = x;
  for (Index n = 0; n <= rep.system().truncation(); ++n) {
    if (n > 0) {
      ComplexMatrix next(h, rep.generator_dim() * z.cols());
      for (Index i = 0; i < rep.generator_dim(); ++i)
        next.middleCols(i * z.cols(), z.cols()).noalias() =
            rep.coeff(i) * z;
      z = std::move(next);
    }
    kadj.middleCols(fock.degree_offset(n) * r, rep.system().dim(n) * r) =
        kron_id_apply(rep.system().isometry(n).adjoint(), r, z.adjoint())
            .adjoint();
  }
  return PoissonKernel(std::move(fock), ComplexMatrix(kadj.adjoint()),
                       std::move(def));
}

// ||K^*K - (I - theta^{N+1}(I))||: the truncated Poisson identity, exact
// up to floating point for every valid representation.
inline double poisson_identity_residual(const CovariantRep& rep,
                                        const PoissonKernel& kernel) {
  const Index h = rep.h_dim();
  const ComplexMatrix expected =
      ComplexMatrix::Identity(h, h) -
      theta_pow(rep, rep.system().truncation() + 1,
                ComplexMatrix::Identity(h, h));
  return op_norm(ComplexMatrix(kernel.matrix().adjoint() * kernel.matrix()) -
                 expected);
}

// max_i || K^*(S_i (x) I_D) - T_i K^* || restricted to inputs supported on
// degrees <= N-1 (the identity cannot see past the truncation edge).
inline double poisson_intertwining_residual(const CovariantRep& rep,
                                            const PoissonKernel& kernel) {
  const Index r = kernel.defect_rank();
  if (r == 0) return 0.0;
  const std::vector<ComplexMatrix> shifts = shift_matrices(kernel.fock());
  const Index cols_kept = kernel.block_offset(rep.system().truncation());
  double worst = 0.0;
  for (Index i = 0; i < rep.generator_dim(); ++i) {
    // K^*(S_i (x) I_r) computed through its adjoint to stay thin.
    const ComplexMatrix lhs =
        kron_id_apply(shifts[static_cast<size_t>(i)].adjoint(), r,
                      kernel.matrix())
            .adjoint();
    const ComplexMatrix rhs = rep.coeff(i) * kernel.matrix().adjoint();
    worst = std::max(worst,
                     op_norm(lhs.leftCols(cols_kept) - rhs.leftCols(cols_kept)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Restriction to an invariant subspace
// ---------------------------------------------------------------------------

// max_i ||(I - P_S) T_i P_S||.
inline double invariance_residual(const CovariantRep& rep, const Subspace& s) {
  if (s.ambient_dim() != rep.h_dim())
    throw AmbientMismatch("invariance_residual: subspace ambient mismatch");
  const ComplexMatrix& j = s.basis();
  double worst = 0.0;
  for (Index i = 0; i < rep.generator_dim(); ++i) {
    const ComplexMatrix tj = rep.coeff(i) * j;
    worst = std::max(worst, op_norm(tj - j * (j.adjoint() * tj)));
  }
  return worst;
}

// Compression V_i = J^* T_i J onto an invariant subspace.  Restriction of
// a representation stays completely contractive, and stays pure when the
// original is pure.
inline CovariantRep restrict_rep(const CovariantRep& rep, const Subspace& s,
                                 double tol = 1e-9) {
  if (s.ambient_dim() != rep.h_dim())
    throw AmbientMismatch("restrict_rep: subspace ambient mismatch");
  if (s.rank() == 0)
    throw TrivialSubspace("restrict_rep: zero-dimensional subspace");
  const double res = invariance_residual(rep, s);
  if (res > tol)
    throw NotInvariant("restrict_rep: invariance residual " +
                       std::to_string(res));
  const ComplexMatrix& j = s.basis();
  std::vector<ComplexMatrix> comp;
  comp.reserve(static_cast<size_t>(rep.generator_dim()));
  for (Index i = 0; i < rep.generator_dim(); ++i)
    comp.push_back(j.adjoint() * rep.coeff(i) * j);
  return CovariantRep(rep.system(), std::move(comp));
}

// ---------------------------------------------------------------------------
// Induced shifts
// ---------------------------------------------------------------------------

// The representation S (x) I_r on F_X (x) C^r; always pure, and the
// reference example of the nilpotent class at finite truncation.
inline CovariantRep induced_shift_rep(const FockBasis& fock, Index r = 1) {
  if (r < 1) throw ShapeMismatch("induced_shift_rep: r must be >= 1");
  const std::vector<ComplexMatrix> shifts = shift_matrices(fock);
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(shifts.size());
  const ComplexMatrix id = ComplexMatrix::Identity(r, r);
  for (const auto& s : shifts) coeffs.push_back(tensor_product(s, id));
  CovariantRep rep(fock.system(), std::move(coeffs));
  rep.mark_as_induced_shift(r);
  return rep;
}

// tt_n (I_{X(n)} (x) x) for a thin x : C^w -> H, without materializing
// tt_n.  For induced shifts the columns come straight from the creation
// operators, which keeps the cost proportional to w rather than h.
inline ComplexMatrix degree_action_on(const CovariantRep& rep, Index n,
                                      const ComplexMatrix& x) {
  if (x.rows() != rep.h_dim())
    throw ShapeMismatch("degree_action_on: row count must equal h_dim");
  const SubproductSystem& sys = rep.system();
  const Index dx = sys.dim(n);
  const Index w = x.cols();
  const Index r = rep.shift_multiplicity();
  if (r > 0) {
    const FockBasis fock(sys);
    ComplexMatrix out(rep.h_dim(), dx * w);
    ComplexVector e = ComplexVector::Zero(dx);
    for (Index a = 0; a < dx; ++a) {
      e[a] = 1.0;
      out.middleCols(a * w, w) = kron_id_apply(shift_n(fock, n, e), r, x);
      e[a] = 0.0;
    }
    return out;
  }
  const ComplexMatrix tt = t_tilde_n(rep, n);
  return id_kron_apply(dx, x.adjoint(), tt.adjoint()).adjoint();
}

} // namespace subfock
