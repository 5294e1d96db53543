#pragma once

// Curvature of a completely contractive covariant representation,
//
//     Curv(T) = lim_k  tr(I - theta^k(I)) / Sum_{j<k} dim X(j),
//
// computed four ways: directly from the theta iterates, through the
// product-system closed form, through the Poisson kernel on the Fock
// module, and through the complement factorization I - K K^* = Pi Pi^*.
// Every method reports the full numerator/denominator/ratio tables so a
// failed limit is visible rather than papered over.

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "subfock/invariant.hpp"
#include "subfock/representation.hpp"

namespace subfock {

inline constexpr Index kDefaultRatioWindow = 4;
inline constexpr double kDefaultRatioEps = 1e-6;

enum class CurvatureMethod { direct, closed_form, poisson, complement };

enum class CurvatureTermination { converged, k_exhausted, denominator_bounded };

struct CurvatureReport {
  CurvatureMethod method = CurvatureMethod::direct;
  std::optional<double> estimate;
  Index k_used = 0;
  std::vector<double> partial_numerators;   // A_k = Sum_{j<k} a_j
  std::vector<double> partial_denominators; // B_k = Sum_{j<k} b_j
  std::vector<double> ratios;               // a_j / b_j
  CurvatureTermination termination = CurvatureTermination::k_exhausted;
  // Set by closed_form when d > 1: the (d-1) A_k / d^k evaluation at the
  // final k, which converges to the same limit from below.
  std::optional<double> tail_value;
  // Direct method only: theta was iterated past the truncation degree
  // (dimension profile continued analytically).
  bool beyond_truncation = false;
  // Complement method only: ||(I - K K^*) - Pi Pi^*|| of the factorization
  // that produced the numerators.
  std::optional<double> complement_residual;
};

// ---------------------------------------------------------------------------
// Ratio limits
// ---------------------------------------------------------------------------

// Stolz-style limit detection: A_k/B_k converges to the limit of a_j/b_j
// whenever the latter exists and B_k grows without bound, so the estimate
// is the last per-term ratio once the trailing `window` ratios agree
// pairwise to within eps.
inline std::optional<double> limit_ratio(const std::vector<double>& a,
                                         const std::vector<double>& b,
                                         Index window = kDefaultRatioWindow,
                                         double eps = kDefaultRatioEps) {
  if (a.size() != b.size())
    throw ShapeMismatch("limit_ratio: sequence lengths differ");
  for (double v : b)
    if (v <= 0.0)
      throw NonpositiveDenominator("limit_ratio: denominator <= 0");
  if (window < 1) window = 1;
  const Index n = static_cast<Index>(a.size());
  if (n < window) return std::nullopt;
  std::vector<double> r(a.size());
  for (size_t j = 0; j < a.size(); ++j) r[j] = a[j] / b[j];
  double lo = r.back(), hi = r.back();
  for (Index j = n - window; j < n; ++j) {
    lo = std::min(lo, r[static_cast<size_t>(j)]);
    hi = std::max(hi, r[static_cast<size_t>(j)]);
  }
  if (hi - lo <= eps) return r.back();
  return std::nullopt;
}

namespace detail {

inline CurvatureReport build_ratio_report(CurvatureMethod method,
                                          std::vector<double> a,
                                          std::vector<double> b,
                                          bool denominator_bounded,
                                          Index window, double eps) {
  CurvatureReport out;
  out.method = method;
  out.k_used = static_cast<Index>(a.size());
  double asum = 0.0, bsum = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    asum += a[j];
    bsum += b[j];
    out.partial_numerators.push_back(asum);
    out.partial_denominators.push_back(bsum);
    out.ratios.push_back(a[j] / b[j]);
  }
  if (denominator_bounded) {
    out.termination = CurvatureTermination::denominator_bounded;
    return out;
  }
  out.estimate = limit_ratio(a, b, window, eps);
  out.termination = out.estimate ? CurvatureTermination::converged
                                 : CurvatureTermination::k_exhausted;
  return out;
}

// a_j = tr theta^j(I) - tr theta^{j+1}(I) for j < count.  Mathematically
// nonnegative; floating-point jitter is clamped at zero.
inline std::vector<double> theta_trace_increments(const CovariantRep& rep,
                                                  Index count) {
  std::vector<double> a;
  a.reserve(static_cast<size_t>(count));
  ComplexMatrix q = ComplexMatrix::Identity(rep.h_dim(), rep.h_dim());
  double prev = static_cast<double>(rep.h_dim());
  for (Index j = 0; j < count; ++j) {
    q = theta(rep, q);
    const double cur = q.real().trace();
    a.push_back(std::max(prev - cur, 0.0));
    prev = cur;
  }
  return a;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Direct method
// ---------------------------------------------------------------------------

// Numerator increments from the theta iterates, denominators dim X(j).
// k_max <= 0 selects the default k_max = N.  Iterating past the truncation
// is permitted when the construction determines the dimension profile
// (full and symmetric systems); the report flags it.
inline CurvatureReport curvature_direct(const CovariantRep& rep,
                                        Index k_max = -1,
                                        Index window = kDefaultRatioWindow,
                                        double eps = kDefaultRatioEps) {
  const SubproductSystem& sys = rep.system();
  const Index trunc = sys.truncation();
  if (k_max <= 0) k_max = trunc;
  const bool dims_known_beyond = sys.dim_extended(trunc + 1) >= 0;
  const Index cap = dims_known_beyond ? k_max : std::min(k_max, trunc);

  std::vector<double> b;
  bool bounded = false;
  for (Index j = 0; j < cap; ++j) {
    const Index dj = sys.dim_extended(j);
    if (dj <= 0) {
      bounded = true;
      break;
    }
    b.push_back(static_cast<double>(dj));
  }
  std::vector<double> a =
      detail::theta_trace_increments(rep, static_cast<Index>(b.size()));
  CurvatureReport out = detail::build_ratio_report(
      CurvatureMethod::direct, std::move(a), std::move(b), bounded, window,
      eps);
  out.beyond_truncation = cap > trunc;
  return out;
}

// ---------------------------------------------------------------------------
// Product-system closed form
// ---------------------------------------------------------------------------

// For a product system (X(n) = E^{(x)n}) the per-term ratios are
// a_j / d^j, which are nonincreasing, so the limit always exists; for
// d > 1 the report also carries the equivalent tail form
// (d-1) A_k / d^k.  Requesting a generator dimension below one is
// structurally impossible over scalar coefficients.
inline CurvatureReport curvature_closed_form(const CovariantRep& rep,
                                             Index window = kDefaultRatioWindow,
                                             double eps = kDefaultRatioEps) {
  const SubproductSystem& sys = rep.system();
  const Index d = sys.generator_dim();
  if (d < 1)
    throw UnsupportedCase("curvature_closed_form: d < 1 has no meaning over "
                          "scalar coefficients");
  for (Index n = 0; n <= sys.truncation(); ++n)
    if (sys.dim(n) != detail::int_pow(d, n))
      throw NotProductSystem("curvature_closed_form: X(" + std::to_string(n) +
                             ") is a proper subspace of the tensor power");

  const Index count = sys.truncation();
  std::vector<double> a = detail::theta_trace_increments(rep, count);
  std::vector<double> b;
  b.reserve(static_cast<size_t>(count));
  for (Index j = 0; j < count; ++j)
    b.push_back(static_cast<double>(detail::int_pow(d, j)));
  CurvatureReport out = detail::build_ratio_report(
      CurvatureMethod::closed_form, std::move(a), std::move(b), false, window,
      eps);
  if (d > 1 && out.k_used > 0) {
    const double ak = out.partial_numerators.back();
    out.tail_value = static_cast<double>(d - 1) * ak /
                     std::pow(static_cast<double>(d),
                              static_cast<double>(out.k_used));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Poisson-kernel method
// ---------------------------------------------------------------------------

// Numerator tr(K^*(I - theta_{S (x) I}^k(I))K) on the Fock module.  The
// induced-shift iterate theta_{S (x) I}^k(I) is the projection onto
// degrees >= k tensored with I_D (coisometry of the multiplication maps),
// so the increments are the squared norms of the degree blocks of K.
// Only degrees up to the truncation exist, so k_max is capped at N.
inline CurvatureReport curvature_via_poisson(const CovariantRep& rep,
                                             Index k_max = -1,
                                             Index window = kDefaultRatioWindow,
                                             double eps = kDefaultRatioEps) {
  const PurityResult pr = purity(rep);
  if (!(pr.converged && pr.is_pure))
    throw NotPure("curvature_via_poisson: representation not pure");
  const SubproductSystem& sys = rep.system();
  const Index trunc = sys.truncation();
  if (k_max <= 0) k_max = trunc;
  const Index cap = std::min(k_max, trunc);

  const PoissonKernel k = poisson_kernel(rep);
  std::vector<double> a, b;
  bool bounded = false;
  for (Index j = 0; j < cap; ++j) {
    const Index dj = sys.dim(j);
    if (dj <= 0) {
      bounded = true;
      break;
    }
    b.push_back(static_cast<double>(dj));
    a.push_back(
        k.matrix().middleRows(k.block_offset(j), k.block_rows(j)).squaredNorm());
  }
  return detail::build_ratio_report(CurvatureMethod::poisson, std::move(a),
                                    std::move(b), bounded, window, eps);
}

// ---------------------------------------------------------------------------
// Complement-factorization method
// ---------------------------------------------------------------------------

// Numerator tr((I - Pi Pi^*)(I - theta_{S (x) I}^k(I))) with Pi from the
// complement factorization; per-term increments are the diagonal sums of
// I - Pi Pi^* over the degree blocks.
inline CurvatureReport curvature_via_complement(
    const CovariantRep& rep, Index k_max = -1,
    Index window = kDefaultRatioWindow, double eps = kDefaultRatioEps) {
  const ComplementFactorization cf = complement_factor(rep);
  const SubproductSystem& sys = rep.system();
  const Index trunc = sys.truncation();
  if (k_max <= 0) k_max = trunc;
  const Index cap = std::min(k_max, trunc);

  const Index amb = cf.kernel.codomain_dim();
  const Index r = cf.kernel.defect_rank();
  const ComplexMatrix q =
      ComplexMatrix::Identity(amb, amb) -
      ComplexMatrix(cf.factor.pi * cf.factor.pi.adjoint());
  std::vector<double> a, b;
  bool bounded = false;
  for (Index j = 0; j < cap; ++j) {
    const Index dj = sys.dim(j);
    if (dj <= 0) {
      bounded = true;
      break;
    }
    b.push_back(static_cast<double>(dj));
    const double inc =
        q.diagonal().segment(cf.kernel.block_offset(j), dj * r).real().sum();
    a.push_back(std::max(inc, 0.0));
  }
  CurvatureReport out = detail::build_ratio_report(
      CurvatureMethod::complement, std::move(a), std::move(b), bounded, window,
      eps);
  out.complement_residual = cf.identity_residual;
  return out;
}

// ---------------------------------------------------------------------------
// Trace inequality
// ---------------------------------------------------------------------------

struct TraceInequalityReport {
  double lhs = 0.0;   // tr theta^n(x)
  double rhs = 0.0;   // ||tt_n||^2 dim X(n) tr x
  double slack = 0.0; // rhs - lhs
  bool passed = false;
};

inline TraceInequalityReport trace_inequality_check(const CovariantRep& rep,
                                                    const ComplexMatrix& x,
                                                    Index n) {
  if (n > rep.system().truncation())
    throw DegreeOutOfRange("trace_inequality_check: degree beyond truncation");
  if (x.rows() != rep.h_dim() || x.cols() != rep.h_dim())
    throw ShapeMismatch("trace_inequality_check: x must be h_dim x h_dim");
  if (x.rows() > 0) {
    if (op_norm(x - x.adjoint()) > 1e-10)
      throw NotPSD("trace_inequality_check: x is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        ComplexMatrix(0.5 * (x + x.adjoint())), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
      throw NotPSD("trace_inequality_check: x has a negative eigenvalue");
  }
  TraceInequalityReport out;
  out.lhs = theta_pow(rep, n, x).real().trace();
  const double tn = op_norm(t_tilde_n(rep, n));
  out.rhs = tn * tn * static_cast<double>(rep.system().dim(n)) *
            x.real().trace();
  out.slack = out.rhs - out.lhs;
  out.passed = out.lhs <= out.rhs + 1e-9;
  return out;
}

} // namespace subfock
