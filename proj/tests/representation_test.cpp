#include <gtest/gtest.h>

#include "support.hpp"

using namespace subfock;
namespace st = subfock::testing;

namespace {

ComplexMatrix scalar1(double v) { return ComplexMatrix::Constant(1, 1, v); }

CovariantRep scalar_pair_rep(const SubproductSystem& sys, double t1,
                             double t2) {
  return CovariantRep(sys, {scalar1(t1), scalar1(t2)});
}

// Superdiagonal Jordan block of size n: J e_k = e_{k-1}, J e_0 = 0.
ComplexMatrix jordan_block(Index n) {
  ComplexMatrix j = ComplexMatrix::Zero(n, n);
  for (Index k = 0; k + 1 < n; ++k) j(k, k + 1) = 1.0;
  return j;
}

ComplexMatrix degree_band_projector(const FockBasis& fock, Index lo,
                                    Index hi) {
  ComplexMatrix p = ComplexMatrix::Zero(fock.total_dim(), fock.total_dim());
  for (Index n = lo; n <= hi; ++n)
    for (Index j = 0; j < fock.degree_dim(n); ++j)
      p(fock.degree_offset(n) + j, fock.degree_offset(n) + j) = 1.0;
  return p;
}

} // namespace

// ---------------------------------------------------------------------------
// validate_rep
// ---------------------------------------------------------------------------

TEST(ValidateRep, CommutingPairPassesOnSymmetricSystem) {
  ComplexMatrix t1 = ComplexMatrix::Zero(2, 2);
  t1(0, 1) = 0.5;
  const RepValidation v = validate_rep(symmetric_system(2, 4),
                                       {t1, ComplexMatrix::Zero(2, 2)});
  EXPECT_TRUE(v.valid);
  EXPECT_LE(v.relation_residual(2), 1e-12);
}

TEST(ValidateRep, NoncommutingPairFailsOnSymmetricSystem) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexMatrix t1 = ComplexMatrix::Zero(2, 2), t2 = ComplexMatrix::Zero(2, 2);
  t1(0, 1) = s;
  t2(1, 0) = s;
  const RepValidation v = validate_rep(symmetric_system(2, 4), {t1, t2});
  EXPECT_FALSE(v.valid);
  EXPECT_GT(v.relation_residual(2), 0.1);
  // [T_1, T_2] = diag(1, -1)/2, and the antisymmetric line carries
  // the commutator with weight 1/sqrt(2).
  EXPECT_NEAR(v.relation_residual(2), 0.5 / std::sqrt(2.0), 1e-12);
  // Same pair on the full system: no relations to violate.
  EXPECT_TRUE(validate_rep(full_system(2, 4), {t1, t2}).valid);
}

TEST(ValidateRep, ShapeMismatch) {
  EXPECT_THROW(
      validate_rep(full_system(2, 3), {ComplexMatrix::Identity(2, 2)}),
      ShapeMismatch);
  EXPECT_THROW(validate_rep(full_system(2, 3),
                            {ComplexMatrix::Identity(2, 2),
                             ComplexMatrix::Identity(3, 3)}),
               ShapeMismatch);
}

TEST(ValidateRep, RandomTuplesAreValidOnTheirSystems) {
  st::Rng rng(101);
  for (int trial = 0; trial < 4; ++trial) {
    const SubproductSystem sys =
        (trial % 2 == 0) ? full_system(2, 5) : symmetric_system(3, 4);
    const st::FramedTuple t =
        st::random_tuple_for(sys, rng, 6, 0.9, trial >= 2);
    EXPECT_TRUE(validate_rep(sys, t.ops).valid);
  }
}

// ---------------------------------------------------------------------------
// t_tilde_n
// ---------------------------------------------------------------------------

TEST(TTildeN, LowDegrees) {
  const SubproductSystem sys = full_system(2, 4);
  st::Rng rng(111);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 3, 0.9, false);
  const CovariantRep rep(sys, t.ops);
  EXPECT_EQ((t_tilde_n(rep, 0) - ComplexMatrix::Identity(3, 3)).norm(), 0.0);
  EXPECT_LE((t_tilde_n(rep, 1) - rep.row_matrix()).norm(), 1e-14);
}

TEST(TTildeN, ScalarPowers) {
  const CovariantRep rep(full_system(1, 5), {scalar1(0.7)});
  for (Index n = 0; n <= 5; ++n)
    EXPECT_NEAR(t_tilde_n(rep, n)(0, 0).real(), std::pow(0.7, n), 1e-13);
}

TEST(TTildeN, MatchesMuCompressionOracle) {
  st::Rng rng(112);
  for (int trial = 0; trial < 4; ++trial) {
    const SubproductSystem sys =
        (trial % 2 == 0) ? symmetric_system(2, 5) : full_system(3, 4);
    const st::FramedTuple t =
        st::random_tuple_for(sys, rng, 5, 0.95, trial >= 2);
    const CovariantRep rep(sys, t.ops);
    for (Index n = 2; n <= sys.truncation(); ++n) {
      const ComplexMatrix direct =
          mu_n(rep, n) *
          tensor_product(sys.isometry(n),
                         ComplexMatrix::Identity(rep.h_dim(), rep.h_dim()));
      EXPECT_LE(op_norm(t_tilde_n(rep, n) - direct), 1e-9)
          << "trial " << trial << " degree " << n;
    }
  }
}

TEST(TTildeN, AdjointFactorizationThroughEmbedding) {
  // tt_{n+m}^* = (I_{X(n)} (x) tt_m^*) tt_n^* up to the isometric embedding
  // X(n+m) -> X(n) (x) X(m).
  st::Rng rng(113);
  const SubproductSystem sys = symmetric_system(2, 5);
  const st::FramedTuple t = st::random_commuting_tuple(rng, 2, 5, 0.9, false);
  const CovariantRep rep(sys, t.ops);
  const Index h = rep.h_dim();
  for (auto [n, m] : std::vector<std::pair<Index, Index>>{{1, 2}, {2, 2}, {2, 3}}) {
    const ComplexMatrix embed =
        tensor_product(sys.isometry(n), sys.isometry(m)).adjoint() *
        sys.isometry(n + m);
    const ComplexMatrix lhs = t_tilde_n(rep, n + m);
    const ComplexMatrix rhs =
        t_tilde_n(rep, n) *
        id_kron_apply(sys.dim(n), t_tilde_n(rep, m),
                      tensor_product(embed, ComplexMatrix::Identity(h, h)));
    EXPECT_LE(op_norm(lhs - rhs), 1e-9);
  }
}

TEST(TTildeN, DegreeOutOfRange) {
  const CovariantRep rep(full_system(1, 3), {scalar1(0.5)});
  EXPECT_THROW(t_tilde_n(rep, 4), DegreeOutOfRange);
}

// ---------------------------------------------------------------------------
// theta and iterates
// ---------------------------------------------------------------------------

TEST(Theta, Basics) {
  const CovariantRep rep = scalar_pair_rep(full_system(2, 4), 0.5, 0.5);
  EXPECT_EQ(theta(rep, ComplexMatrix::Zero(1, 1)).norm(), 0.0);
  EXPECT_NEAR(theta(rep, ComplexMatrix::Identity(1, 1))(0, 0).real(), 0.5,
              1e-14);
  EXPECT_THROW(theta(rep, ComplexMatrix::Zero(2, 2)), ShapeMismatch);
}

TEST(Theta, PositivityAndRowIdentity) {
  st::Rng rng(121);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 5, 0.9, false);
  const CovariantRep rep(full_system(2, 4), t.ops);
  const ComplexMatrix x = st::random_psd(rng, 5);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(theta(rep, x),
                                                  Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), -1e-12);
  const ComplexMatrix row = rep.row_matrix();
  EXPECT_LE(op_norm(theta(rep, ComplexMatrix::Identity(5, 5)) -
                    ComplexMatrix(row * row.adjoint())),
            1e-12);
}

TEST(ThetaPow, KnownValues) {
  const CovariantRep rep = scalar_pair_rep(full_system(2, 6), 0.5, 0.5);
  EXPECT_NEAR(theta_pow(rep, 5, ComplexMatrix::Identity(1, 1))(0, 0).real(),
              std::pow(2.0, -5), 1e-14);
  EXPECT_EQ((theta_pow(rep, 0, scalar1(0.3)) - scalar1(0.3)).norm(), 0.0);
}

TEST(ThetaPow, FullShiftIteratesAreDegreeProjections) {
  const FockBasis fock(full_system(2, 5));
  const CovariantRep shift = induced_shift_rep(fock);
  const ComplexMatrix q3 = theta_pow(
      shift, 3,
      ComplexMatrix::Identity(fock.total_dim(), fock.total_dim()));
  EXPECT_LE((q3 - degree_band_projector(fock, 3, 5)).norm(), 1e-12);
}

TEST(ThetaPow, IteratedMatchesDirectForm) {
  st::Rng rng(122);
  for (int trial = 0; trial < 4; ++trial) {
    const SubproductSystem sys =
        (trial % 2 == 0) ? full_system(3, 4) : symmetric_system(2, 5);
    const st::FramedTuple t =
        st::random_tuple_for(sys, rng, 6, 0.95, trial >= 2);
    const CovariantRep rep(sys, t.ops);
    const ComplexMatrix a = st::random_psd(rng, 6);
    for (Index k = 0; k <= sys.truncation(); ++k)
      EXPECT_LE(op_norm(theta_pow(rep, k, a) - theta_pow_direct(rep, k, a)),
                1e-9)
          << "trial " << trial << " k=" << k;
  }
}

TEST(ThetaPow, MonotoneContracting) {
  st::Rng rng(123);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 6, 1.0, false);
  const CovariantRep rep(full_system(2, 4), t.ops);
  ComplexMatrix q = ComplexMatrix::Identity(6, 6);
  for (Index k = 0; k < 8; ++k) {
    const ComplexMatrix next = theta(rep, q);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (q - next + (q - next).adjoint())),
        Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
    q = next;
  }
}

// ---------------------------------------------------------------------------
// purity
// ---------------------------------------------------------------------------

TEST(Purity, UnitaryIsNotPure) {
  const CovariantRep rep(full_system(1, 4), {scalar1(1.0)});
  const PurityResult p = purity(rep);
  EXPECT_TRUE(p.converged);
  EXPECT_FALSE(p.is_pure);
  EXPECT_NEAR(p.q_norm, 1.0, 1e-12);
}

TEST(Purity, StrictContractionIsPure) {
  const CovariantRep rep(full_system(1, 4), {scalar1(0.9)});
  const PurityResult p = purity(rep);
  EXPECT_TRUE(p.converged);
  EXPECT_TRUE(p.is_pure);
  EXPECT_LE(p.q_norm, 1e-9);
}

TEST(Purity, NilpotentHitsZeroExactly) {
  st::Rng rng(131);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 4, 0.9, true);
  const CovariantRep rep(full_system(2, 6), t.ops);
  const PurityResult p = purity(rep);
  EXPECT_TRUE(p.is_pure);
  EXPECT_LE(p.k_used, 4);
  // Exact nilpotency up to the rounding of the frame conjugation.
  EXPECT_LE(p.q_norm, 1e-16);
}

TEST(Purity, FixedPointOfTheLimit) {
  ComplexMatrix mixed = ComplexMatrix::Zero(2, 2);
  mixed(0, 0) = 1.0;
  mixed(1, 1) = 0.5;
  const CovariantRep rep(full_system(1, 4), {mixed});
  const PurityResult p = purity(rep);
  EXPECT_FALSE(p.is_pure);
  EXPECT_LE(op_norm(theta(rep, p.limit) - p.limit), 10.0 * 1e-9);
}

// ---------------------------------------------------------------------------
// defect
// ---------------------------------------------------------------------------

TEST(Defect, CoisometricHasNoDefect) {
  const CovariantRep rep(full_system(1, 4), {scalar1(1.0)});
  const Defect d = defect(rep);
  EXPECT_LE(d.delta.norm(), 1e-7);
  EXPECT_EQ(d.space.rank(), 0);
}

TEST(Defect, ScalarPair) {
  const CovariantRep rep = scalar_pair_rep(full_system(2, 4), 0.5, 0.5);
  const Defect d = defect(rep);
  EXPECT_NEAR(d.delta(0, 0).real(), std::sqrt(0.5), 1e-12);
  EXPECT_EQ(d.space.rank(), 1);
}

TEST(Defect, JordanShiftDefectsAtTheTopVector) {
  const CovariantRep rep(full_system(1, 6), {jordan_block(4)});
  const Defect d = defect(rep);
  ASSERT_EQ(d.space.rank(), 1);
  EXPECT_NEAR(std::abs(d.space.basis()(3, 0)), 1.0, 1e-12);
  EXPECT_LE(op_norm(ComplexMatrix(d.delta * d.delta) -
                    d.space.projector()),
            1e-12);
}

TEST(Defect, RowNormAboveOneIsRejected) {
  const CovariantRep rep(full_system(1, 3), {scalar1(1.1)});
  EXPECT_THROW(defect(rep), NotPSD);
}

// ---------------------------------------------------------------------------
// poisson_kernel
// ---------------------------------------------------------------------------

TEST(PoissonKernel, GeometricComponentsForScalarHalf) {
  const CovariantRep rep(full_system(1, 6), {scalar1(0.5)});
  const PoissonKernel k = poisson_kernel(rep);
  ASSERT_EQ(k.defect_rank(), 1);
  ASSERT_EQ(k.matrix().rows(), 7);
  for (Index n = 0; n <= 6; ++n)
    EXPECT_NEAR(k.matrix()(n, 0).real(),
                std::sqrt(0.75) * std::pow(0.5, n), 1e-13);
  EXPECT_NEAR((k.matrix().adjoint() * k.matrix())(0, 0).real(),
              1.0 - std::pow(0.25, 7), 1e-13);
}

TEST(PoissonKernel, CoisometricKernelVanishes) {
  const CovariantRep rep(full_system(1, 4), {scalar1(1.0)});
  const PoissonKernel k = poisson_kernel(rep);
  EXPECT_EQ(k.defect_rank(), 0);
  EXPECT_LE(poisson_identity_residual(rep, k), 1e-9);
}

TEST(PoissonKernel, NilpotentKernelIsAnExactIsometry) {
  st::Rng rng(141);
  const st::FramedTuple t = st::random_commuting_tuple(rng, 2, 4, 0.8, true);
  const CovariantRep rep(symmetric_system(2, 6), t.ops);
  const PoissonKernel k = poisson_kernel(rep);
  EXPECT_LE(op_norm(ComplexMatrix(k.matrix().adjoint() * k.matrix()) -
                    ComplexMatrix::Identity(4, 4)),
            1e-12);
}

TEST(PoissonKernel, IdentityAndIntertwiningForRandomReps) {
  st::Rng rng(142);
  for (int trial = 0; trial < 6; ++trial) {
    const SubproductSystem sys = (trial % 3 == 0) ? full_system(2, 5)
                                 : (trial % 3 == 1)
                                     ? symmetric_system(2, 5)
                                     : symmetric_system(3, 4);
    const st::FramedTuple t =
        st::random_tuple_for(sys, rng, 5, trial % 2 ? 1.0 : 0.85, false);
    const CovariantRep rep(sys, t.ops);
    const PoissonKernel k = poisson_kernel(rep);
    EXPECT_LE(op_norm(k.matrix()), 1.0 + 1e-10) << "trial " << trial;
    EXPECT_LE(poisson_identity_residual(rep, k), 1e-9) << "trial " << trial;
    EXPECT_LE(poisson_intertwining_residual(rep, k), 1e-9)
        << "trial " << trial;
  }
}

TEST(PoissonKernel, TruncationTailShrinksWithN) {
  const CovariantRep rep4 = scalar_pair_rep(full_system(2, 4), 0.5, 0.5);
  const CovariantRep rep8 = scalar_pair_rep(full_system(2, 8), 0.5, 0.5);
  const PoissonKernel k4 = poisson_kernel(rep4);
  const PoissonKernel k8 = poisson_kernel(rep8);
  const double gap4 = op_norm(ComplexMatrix::Identity(1, 1) -
                              ComplexMatrix(k4.matrix().adjoint() * k4.matrix()));
  const double gap8 = op_norm(ComplexMatrix::Identity(1, 1) -
                              ComplexMatrix(k8.matrix().adjoint() * k8.matrix()));
  EXPECT_NEAR(gap4, std::pow(0.5, 5), 1e-13);
  EXPECT_NEAR(gap8, std::pow(0.5, 9), 1e-13);
  EXPECT_LT(gap8, gap4);
}

// ---------------------------------------------------------------------------
// restrict_rep
// ---------------------------------------------------------------------------

TEST(RestrictRep, FullSpaceIsABasisChange) {
  st::Rng rng(151);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 4, 0.9, false);
  const CovariantRep rep(full_system(2, 4), t.ops);
  const CovariantRep res =
      restrict_rep(rep, Subspace(ComplexMatrix::Identity(4, 4)));
  for (Index i = 0; i < 2; ++i)
    EXPECT_LE((res.coeff(i) - rep.coeff(i)).norm(), 1e-14);
}

TEST(RestrictRep, ShiftTailIsAShorterShift) {
  const FockBasis fock(full_system(1, 4));
  const CovariantRep shift = induced_shift_rep(fock);
  const Subspace tail = st::degrees_from(fock, 1);
  const CovariantRep res = restrict_rep(shift, tail);
  ComplexMatrix expected = ComplexMatrix::Zero(4, 4);
  expected(1, 0) = expected(2, 1) = expected(3, 2) = 1.0;
  EXPECT_LE((res.coeff(0) - expected).norm(), 1e-13);
}

TEST(RestrictRep, Errors) {
  const FockBasis fock(full_system(1, 4));
  const CovariantRep shift = induced_shift_rep(fock);
  EXPECT_THROW(restrict_rep(shift, Subspace(Index(5))), TrivialSubspace);
  // The vacuum line is not invariant for the shift.
  ComplexMatrix vac = ComplexMatrix::Zero(5, 1);
  vac(0, 0) = 1.0;
  EXPECT_THROW(restrict_rep(shift, Subspace(vac)), NotInvariant);
  EXPECT_THROW(restrict_rep(shift, Subspace(Index(3))), AmbientMismatch);
}

TEST(RestrictRep, PreservesPurityAndContractivity) {
  st::Rng rng(152);
  const st::FramedTuple t = st::random_free_tuple(rng, 2, 6, 0.8, false);
  const CovariantRep rep(full_system(2, 5), t.ops);
  const CovariantRep res = restrict_rep(rep, t.invariant_subspace(3));
  EXPECT_LE(res.row_norm(), rep.row_norm() + 1e-12);
  EXPECT_TRUE(purity(res).is_pure);
}

// ---------------------------------------------------------------------------
// induced shifts
// ---------------------------------------------------------------------------

TEST(InducedShift, PureWithVacuumDefect) {
  const FockBasis fock(symmetric_system(2, 4));
  const CovariantRep rep = induced_shift_rep(fock, 3);
  const PurityResult p = purity(rep);
  EXPECT_TRUE(p.is_pure);
  EXPECT_EQ(p.k_used, 5);
  EXPECT_EQ(defect(rep).space.rank(), 3);

  // Same operators without the structure tag: the generic purity
  // iteration must reach the same conclusion.
  const CovariantRep untagged(fock.system(), rep.coeffs());
  const PurityResult q = purity(untagged);
  EXPECT_TRUE(q.is_pure);
  EXPECT_EQ(q.k_used, 5);
  EXPECT_LE(q.q_norm, 1e-12);
}
