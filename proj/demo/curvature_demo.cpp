// Curvature of a few standard representations, all four methods side by
// side.  Build and run:  ./demo/curvature_demo

#include <cstdio>

#include "subfock/subfock.hpp"

using namespace subfock;

namespace {

void show(const char* label, const CurvatureReport& r) {
  std::printf("  %-12s k=%-3lld term=%-19s estimate=", label,
              static_cast<long long>(r.k_used),
              r.termination == CurvatureTermination::converged ? "converged"
              : r.termination == CurvatureTermination::k_exhausted
                  ? "k_exhausted"
                  : "denominator_bounded");
  if (r.estimate)
    std::printf("%.9f\n", *r.estimate);
  else
    std::printf("undefined\n");
}

void analyze(const char* title, const CovariantRep& rep) {
  std::printf("%s\n", title);
  show("direct", curvature_direct(rep));
  try {
    show("closed_form", curvature_closed_form(rep));
  } catch (const NotProductSystem&) {
    std::printf("  %-12s (not a product system)\n", "closed_form");
  }
  show("poisson", curvature_via_poisson(rep));
  show("complement", curvature_via_complement(rep));
  std::printf("\n");
}

} // namespace

int main() {
  {
    const FockBasis fock(full_system(2, 6));
    analyze("full-Fock shift, d = 2, N = 6", induced_shift_rep(fock));
  }
  {
    const FockBasis fock(symmetric_system(2, 6));
    analyze("symmetric shift, d = 2, N = 6", induced_shift_rep(fock));
  }
  {
    const FockBasis fock(symmetric_system(2, 6));
    analyze("symmetric shift (x) I_3, d = 2, N = 6",
            induced_shift_rep(fock, 3));
  }
  {
    // Scalar commuting pair t = (1/2, 1/2): curvature zero.  The ratio
    // window does not settle within the truncation, so the default run
    // reports the sequences; iterating theta further resolves the limit.
    std::vector<ComplexMatrix> t{ComplexMatrix::Constant(1, 1, 0.5),
                                 ComplexMatrix::Constant(1, 1, 0.5)};
    const CovariantRep rep(symmetric_system(2, 8), t);
    analyze("scalar pair t = (1/2, 1/2) on the symmetric system, N = 8",
            rep);
    std::printf("  ...and with k_max = 40:\n");
    show("direct", curvature_direct(rep, 40));
  }
  return 0;
}
