#pragma once

// Invariant-subspace machinery: the partial-isometry factorization of an
// invariant subspace through the Poisson kernel of the restricted
// representation, its Beurling-type specialization to induced shifts, the
// complement factorization I - K K^* = Pi Pi^*, and the wandering-subspace
// lattice L_n.
//
// Two exactness regimes apply throughout.  On the nilpotent class
// (tt_n = 0 beyond some degree) every identity is exact to floating
// point at finite truncation; for a strict row contraction of norm rho the
// range identity carries a truncation residual bounded by rho^{2(N+1)}.

#include <utility>
#include <vector>

#include "subfock/representation.hpp"

namespace subfock {

// ---------------------------------------------------------------------------
// Invariance test
// ---------------------------------------------------------------------------

struct InvarianceReport {
  double residual = 0.0; // max_i ||(I - P_S) T_i P_S||
  bool invariant = false;
};

inline InvarianceReport is_invariant(const CovariantRep& rep,
                                     const Subspace& s, double tol = 1e-9) {
  InvarianceReport out;
  out.residual = invariance_residual(rep, s);
  out.invariant = out.residual <= tol;
  return out;
}

// ---------------------------------------------------------------------------
// Factorization of an invariant subspace
// ---------------------------------------------------------------------------

struct FactorizationResult {
  ComplexMatrix pi;        // F_X (x) D' -> H (or codomain Fock module)
  Subspace range;          // the invariant subspace S = ran Pi
  Subspace defect_space;   // D' of the restricted representation
  Index dprime_rank = 0;
  double residual_partial_isometry = 0.0; // ||Pi Pi^* Pi - Pi||
  double residual_range = 0.0;            // ||Pi Pi^* - P_S||
  double residual_intertwine = 0.0;       // max_i, on degrees <= N-1
};

namespace detail {

inline double intertwine_residual(const CovariantRep& rep,
                                  const ComplexMatrix& pi, Index dprime,
                                  const FockBasis& fock) {
  if (dprime == 0) return 0.0;
  const std::vector<ComplexMatrix> shifts = shift_matrices(fock);
  const Index cols_kept =
      fock.degree_offset(fock.system().truncation()) * dprime;
  double worst = 0.0;
  for (Index i = 0; i < rep.generator_dim(); ++i) {
    const ComplexMatrix lhs =
        kron_id_apply(shifts[static_cast<size_t>(i)].adjoint(), dprime,
                      pi.adjoint())
            .adjoint();
    const ComplexMatrix rhs = rep.coeff(i) * pi;
    worst = std::max(worst,
                     op_norm(lhs.leftCols(cols_kept) - rhs.leftCols(cols_kept)));
  }
  return worst;
}

} // namespace detail

// Pi = J K(V)^* where V is the restriction of a pure representation to the
// invariant subspace S with inclusion J.  Then Pi Pi^* equals
// J (I - theta_V^{N+1}(I)) J^*, so the range residual is exactly the
// truncation tail of the restricted iterates, and Pi intertwines the
// shifts with the representation on degrees <= N-1.
inline FactorizationResult factorization(const CovariantRep& rep,
                                         const Subspace& s,
                                         double invariance_tol = 1e-9) {
  if (s.ambient_dim() != rep.h_dim())
    throw AmbientMismatch("factorization: subspace ambient mismatch");
  if (s.rank() == 0)
    throw TrivialSubspace("factorization: zero-dimensional subspace");
  const PurityResult pr = purity(rep);
  if (!(pr.converged && pr.is_pure))
    throw NotPure("factorization: representation not pure (||Q|| = " +
                  std::to_string(pr.q_norm) + ")");

  const CovariantRep restricted = restrict_rep(rep, s, invariance_tol);
  const PoissonKernel kv = poisson_kernel(restricted);

  FactorizationResult out;
  out.pi = s.basis() * kv.matrix().adjoint();
  out.range = s;
  out.defect_space = kv.defect().space;
  out.dprime_rank = kv.defect_rank();
  out.residual_range = op_norm(ComplexMatrix(out.pi * out.pi.adjoint()) -
                               s.projector());
  out.residual_partial_isometry =
      op_norm(ComplexMatrix(out.pi * out.pi.adjoint() * out.pi) - out.pi);
  out.residual_intertwine =
      detail::intertwine_residual(rep, out.pi, out.dprime_rank, kv.fock());
  return out;
}

// Beurling-type factorization: an invariant subspace of the induced shift
// S (x) I_r is the range of an inner multi-analytic Pi.  The intertwining
// residual doubles as the multi-analyticity check here, since the ambient
// representation is the shift itself.
inline FactorizationResult beurling(const SubproductSystem& sys, Index r,
                                    const Subspace& s) {
  const FockBasis fock(sys);
  const CovariantRep shift = induced_shift_rep(fock, r);
  return factorization(shift, s);
}

// ---------------------------------------------------------------------------
// Complement factorization
// ---------------------------------------------------------------------------

struct ComplementFactorization {
  FactorizationResult factor;  // Pi with range (ran K)^perp
  PoissonKernel kernel;        // K itself
  double identity_residual = 0.0;   // ||(I - K K^*) - Pi Pi^*||
  double invariance_residual = 0.0; // shift-invariance defect of (ran K)^perp
};

// Factorizes (ran K)^perp inside F_X (x) D through the induced shift.  At
// finite truncation the complement is invariant only up to a defect of
// order ||tt_N||; the subspace is taken as computed and the defect is
// reported rather than rejected.
inline ComplementFactorization complement_factor(const CovariantRep& rep) {
  const PurityResult pr = purity(rep);
  if (!(pr.converged && pr.is_pure))
    throw NotPure("complement_factor: representation not pure");

  PoissonKernel k = poisson_kernel(rep);
  const Index amb = k.codomain_dim();
  const Subspace ran_k = range_isometry(k.matrix());
  const Subspace wprime = orthogonal_complement(ran_k);

  const FockBasis fock(rep.system());
  const CovariantRep shift = induced_shift_rep(fock, k.defect_rank());

  FactorizationResult fact;
  double inv_res = 0.0;
  if (wprime.rank() == 0) {
    // K is onto: the complement is trivial and Pi has rank zero.
    fact.pi = ComplexMatrix::Zero(amb, 0);
    fact.range = wprime;
    fact.defect_space = Subspace(0);
    fact.dprime_rank = 0;
  } else {
    inv_res = invariance_residual(shift, wprime);
    fact = factorization(shift, wprime, /*invariance_tol=*/1.0);
  }

  ComplementFactorization out{std::move(fact), std::move(k), 0.0, inv_res};
  const ComplexMatrix kk =
      out.kernel.matrix() * out.kernel.matrix().adjoint();
  out.identity_residual =
      op_norm(ComplexMatrix::Identity(amb, amb) - kk -
              ComplexMatrix(out.factor.pi * out.factor.pi.adjoint()));
  return out;
}

// ---------------------------------------------------------------------------
// Wandering subspaces
// ---------------------------------------------------------------------------

// L_n(W) = span{ tt_n (zeta (x) w) }, the degree-n shift of W.
inline Subspace l_n(const CovariantRep& rep, const Subspace& w, Index n) {
  if (w.ambient_dim() != rep.h_dim())
    throw AmbientMismatch("l_n: subspace ambient mismatch");
  if (n < 0 || n > rep.system().truncation())
    throw DegreeOutOfRange("l_n: degree out of range");
  if (n == 0) return w;
  if (w.rank() == 0) return Subspace(rep.h_dim());
  return range_isometry(degree_action_on(rep, n, w.basis()));
}

struct WanderingReport {
  double residual = 0.0; // max_{n=1..N} ||P_W P_{L_n(W)}||
  bool wandering = false;
};

inline WanderingReport is_wandering(const CovariantRep& rep, const Subspace& w,
                                    double tol = 1e-9) {
  WanderingReport out;
  for (Index n = 1; n <= rep.system().truncation(); ++n) {
    const Subspace ln = l_n(rep, w, n);
    if (ln.rank() == 0 || w.rank() == 0) continue;
    out.residual =
        std::max(out.residual, op_norm(w.basis().adjoint() * ln.basis()));
  }
  out.wandering = out.residual <= tol;
  return out;
}

// W = S - L(S): the wandering subspace carried by an invariant subspace.
inline Subspace wandering_of_invariant(const CovariantRep& rep,
                                       const Subspace& s, double tol = 1e-9) {
  const double res = invariance_residual(rep, s);
  if (res > tol)
    throw NotInvariant("wandering_of_invariant: invariance residual " +
                       std::to_string(res));
  const Subspace l1 = l_n(rep, s, 1);
  const ComplexMatrix reduced =
      s.basis() - l1.basis() * (l1.basis().adjoint() * s.basis());
  return range_isometry(reduced);
}

// G_{T,W} = span of L_n(W) over all degrees 0..N.
inline Subspace generated_subspace(const CovariantRep& rep,
                                   const Subspace& w) {
  if (w.ambient_dim() != rep.h_dim())
    throw AmbientMismatch("generated_subspace: subspace ambient mismatch");
  if (w.rank() == 0) return Subspace(rep.h_dim());
  const Index cap = rep.system().truncation();
  Index cols = 0;
  for (Index n = 0; n <= cap; ++n) cols += rep.system().dim(n) * w.rank();
  ComplexMatrix stacked(rep.h_dim(), cols);
  Index at = 0;
  for (Index n = 0; n <= cap; ++n) {
    const Index width = rep.system().dim(n) * w.rank();
    stacked.middleCols(at, width) = degree_action_on(rep, n, w.basis());
    at += width;
  }
  return range_isometry(stacked);
}

// distance(W, G - L(G)) with G the subspace generated by a wandering W;
// the recovery identity says this vanishes.
inline double wandering_recovery_check(const CovariantRep& rep,
                                       const Subspace& w, double tol = 1e-9) {
  const WanderingReport wr = is_wandering(rep, w, tol);
  if (!wr.wandering)
    throw NotWandering("wandering_recovery_check: residual " +
                       std::to_string(wr.residual));
  const Subspace g = generated_subspace(rep, w);
  const Subspace lg = l_n(rep, g, 1);
  const ComplexMatrix reduced =
      g.basis() - lg.basis() * (lg.basis().adjoint() * g.basis());
  return subspace_distance(w, range_isometry(reduced));
}

// ---------------------------------------------------------------------------
// Wandering subspaces through a factorization
// ---------------------------------------------------------------------------

struct WanderingFactorResult {
  Subspace w_direct;  // S - L(S) computed inside H
  Subspace w_factor;  // Pi((ker Pi)^perp intersect degree-0 slice)
  double distance = 0.0;
  // span_n L_n(w_direct, T) versus Pi(span_n L_n(F, S (x) I)).
  double span_match_residual = 0.0;
  // wandering defect of F for the induced shift
  double f_wandering_residual = 0.0;
};

// Both routes to the wandering subspace of ran Pi: directly inside H, and
// as the image of the degree-zero slice of (ker Pi)^perp.
inline WanderingFactorResult wandering_from_factor(
    const CovariantRep& rep, const FactorizationResult& fact) {
  WanderingFactorResult out{Subspace(rep.h_dim()), Subspace(rep.h_dim()),
                            0.0, 0.0, 0.0};
  const Index rprime = fact.dprime_rank;
  const FockBasis fock(rep.system());

  out.w_direct = wandering_of_invariant(rep, fact.range);

  const Index domain = fact.pi.cols();
  const Subspace coker = range_isometry(fact.pi.adjoint());
  ComplexMatrix deg0 = ComplexMatrix::Zero(domain, rprime);
  deg0.topRows(rprime) = ComplexMatrix::Identity(rprime, rprime);
  const Subspace f =
      (domain == 0) ? Subspace(domain)
                    : subspace_intersection(coker, Subspace(std::move(deg0)));
  out.w_factor = range_isometry(fact.pi * f.basis());
  out.distance = subspace_distance(out.w_direct, out.w_factor);

  if (rprime > 0) {
    const CovariantRep induced = induced_shift_rep(fock, rprime);
    out.f_wandering_residual = is_wandering(induced, f).residual;
    const Subspace lhs = generated_subspace(rep, out.w_direct);
    const Subspace gf = generated_subspace(induced, f);
    const Subspace rhs = range_isometry(fact.pi * gf.basis());
    out.span_match_residual = subspace_distance(lhs, rhs);
  }
  return out;
}

} // namespace subfock
