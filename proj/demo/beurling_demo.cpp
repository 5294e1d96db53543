// Beurling-type factorization of a shift-invariant subspace: the tail
// degrees of the truncated Fock space factor through an inner
// multi-analytic operator, and the wandering subspace comes out both
// directly and through the factor.

#include <cstdio>

#include "subfock/subfock.hpp"

using namespace subfock;

int main() {
  const Index d = 2, n = 6, cut = 2;
  const FockBasis fock(symmetric_system(d, n));
  const CovariantRep shift = induced_shift_rep(fock);

  // S = all degrees >= cut.
  ComplexMatrix basis = ComplexMatrix::Zero(
      fock.total_dim(), fock.total_dim() - fock.degree_offset(cut));
  basis.bottomRows(basis.cols()) =
      ComplexMatrix::Identity(basis.cols(), basis.cols());
  const Subspace s(basis);

  const FactorizationResult fact = beurling(fock.system(), 1, s);
  std::printf("symmetric shift d=%lld N=%lld, S = degrees >= %lld\n",
              static_cast<long long>(d), static_cast<long long>(n),
              static_cast<long long>(cut));
  std::printf("  rank S               = %lld\n",
              static_cast<long long>(fact.range.rank()));
  std::printf("  wandering source dim = %lld\n",
              static_cast<long long>(fact.dprime_rank));
  std::printf("  ||PiPi* - P_S||      = %.3e\n", fact.residual_range);
  std::printf("  ||PiPi*Pi - Pi||     = %.3e\n",
              fact.residual_partial_isometry);
  std::printf("  intertwine residual  = %.3e\n", fact.residual_intertwine);

  const WanderingFactorResult w = wandering_from_factor(shift, fact);
  std::printf("  wandering distance   = %.3e (rank %lld)\n", w.distance,
              static_cast<long long>(w.w_direct.rank()));
  std::printf("  span-match residual  = %.3e\n", w.span_match_residual);
  return 0;
}
