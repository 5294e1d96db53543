#pragma once

// Command implementations behind the subfock CLI.
//
// Exit codes: 0 ok, 1 input error, 2 mathematical validation failure,
// 3 numerical failure.  Reports go to stdout as JSON; diagnostics belong
// on stderr (handled by the binary).

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "subfock/io.hpp"

namespace subfock {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitValidationFailure = 2;
inline constexpr int kExitNumericalFailure = 3;

struct CliOptions {
  std::vector<CurvatureMethod> methods{
      CurvatureMethod::direct, CurvatureMethod::closed_form,
      CurvatureMethod::poisson, CurvatureMethod::complement};
  bool shift_mode = false;
  std::optional<double> tol;
  std::optional<Index> k_max;
};

namespace detail {

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

inline OptionsSpec effective_options(const ProblemDescriptor& d,
                                     const CliOptions& cli) {
  OptionsSpec opt = d.options;
  if (cli.tol) opt.tol = *cli.tol;
  if (cli.k_max) opt.k_max = *cli.k_max;
  return opt;
}

inline Json validation_to_json(const SystemValidation& sv,
                               const RepValidation* rv) {
  Json j;
  j["system_residual"] = sv.max_residual;
  j["system_valid"] = sv.passed;
  if (rv != nullptr) {
    j["row_norm"] = rv->row_norm;
    j["relation_residuals"] = rv->relation_residuals;
    j["valid"] = rv->valid;
  }
  return j;
}

// Resolve the representation named by the descriptor: explicit matrices,
// or the induced shift S (x) I_r in shift mode (r from representation.dim,
// defaulting to 1).
inline CovariantRep resolve_rep(const SubproductSystem& sys,
                                const ProblemDescriptor& d,
                                const CliOptions& cli) {
  if (cli.shift_mode || !d.representation) {
    Index r = 1;
    if (d.representation && d.representation->operators.empty() &&
        d.representation->dim > 0)
      r = d.representation->dim;
    return induced_shift_rep(FockBasis(sys), r);
  }
  return build_rep(sys, *d.representation);
}

} // namespace detail

// ---------------------------------------------------------------------------
// subfock validate
// ---------------------------------------------------------------------------

inline int cmd_validate(const ProblemDescriptor& d, const CliOptions& cli,
                        Json& report) {
  const detail::Stopwatch clock;
  const OptionsSpec opt = detail::effective_options(d, cli);
  report = Json{};
  report["schema_version"] = kSchemaVersion;
  try {
    const SubproductSystem sys = build_system(d.system);
    const SystemValidation sv = validate_system(sys, opt.tol);
    std::optional<RepValidation> rv;
    if (d.representation && !d.representation->operators.empty())
      rv = validate_rep(sys, d.representation->operators, opt.tol);
    report["validation"] =
        detail::validation_to_json(sv, rv ? &*rv : nullptr);
    report["timings"] = Json{{"total_ms", clock.ms()}};
    const bool ok = sv.passed && (!rv || rv->valid);
    return ok ? kExitOk : kExitValidationFailure;
  } catch (const ParseError&) {
    throw; // surfaced as an input error by the caller
  } catch (const ShapeMismatch& e) {
    throw ParseError(e.what());
  }
}

// ---------------------------------------------------------------------------
// subfock analyze
// ---------------------------------------------------------------------------

inline int cmd_analyze(const ProblemDescriptor& d, const CliOptions& cli,
                       Json& report) {
  const detail::Stopwatch clock;
  const OptionsSpec opt = detail::effective_options(d, cli);
  report = Json{};
  report["schema_version"] = kSchemaVersion;

  SubproductSystem sys = build_system(d.system);
  const SystemValidation sv = validate_system(sys, opt.tol);
  CovariantRep rep = detail::resolve_rep(sys, d, cli);
  std::optional<RepValidation> rv;
  if (!cli.shift_mode && d.representation &&
      !d.representation->operators.empty())
    rv = validate_rep(sys, d.representation->operators, opt.tol);
  report["validation"] = detail::validation_to_json(sv, rv ? &*rv : nullptr);
  if (!sv.passed || (rv && !rv->valid)) {
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitValidationFailure;
  }

  const PurityResult pr = purity(rep, opt.tol);
  report["purity"] = Json{{"is_pure", pr.is_pure},
                          {"q_norm", pr.q_norm},
                          {"k_used", pr.k_used},
                          {"converged", pr.converged}};

  try {
    const Defect def = defect(rep);
    report["defect_rank"] = def.space.rank();
    const PoissonKernel kernel = poisson_kernel(rep);
    report["poisson"] =
        Json{{"identity_residual", poisson_identity_residual(rep, kernel)},
             {"intertwining_residual",
              poisson_intertwining_residual(rep, kernel)}};
  } catch (const NotPSD& e) {
    report["error"] = std::string("NotPSD: ") + e.what();
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitNumericalFailure;
  }

  Json curv = Json::array();
  for (CurvatureMethod m : cli.methods) {
    Json entry;
    try {
      CurvatureReport cr;
      switch (m) {
        case CurvatureMethod::direct:
          cr = curvature_direct(rep, opt.k_max, opt.window, opt.eps);
          break;
        case CurvatureMethod::closed_form:
          cr = curvature_closed_form(rep, opt.window, opt.eps);
          break;
        case CurvatureMethod::poisson:
          cr = curvature_via_poisson(rep, opt.k_max, opt.window, opt.eps);
          break;
        case CurvatureMethod::complement:
          cr = curvature_via_complement(rep, opt.k_max, opt.window, opt.eps);
          break;
      }
      entry = curvature_report_to_json(cr);
    } catch (const NotPure& e) {
      entry["method"] = method_name(m);
      entry["error"] = std::string("NotPure: ") + e.what();
    } catch (const NotProductSystem& e) {
      entry["method"] = method_name(m);
      entry["error"] = std::string("NotProductSystem: ") + e.what();
    }
    curv.push_back(std::move(entry));
  }
  report["curvature"] = std::move(curv);
  report["timings"] = Json{{"total_ms", clock.ms()}};
  return kExitOk;
}

// ---------------------------------------------------------------------------
// subfock factor
// ---------------------------------------------------------------------------

inline int cmd_factor(const ProblemDescriptor& d, const CliOptions& cli,
                      Json& report) {
  const detail::Stopwatch clock;
  const OptionsSpec opt = detail::effective_options(d, cli);
  report = Json{};
  report["schema_version"] = kSchemaVersion;
  if (!d.subspace) throw ParseError("factor: descriptor needs a subspace");

  SubproductSystem sys = build_system(d.system);
  CovariantRep rep = [&]() -> CovariantRep {
    if (cli.shift_mode) {
      const FockBasis fock(sys);
      const Index amb = d.subspace->basis.rows();
      if (amb % fock.total_dim() != 0)
        throw ParseError("factor --shift: subspace ambient dimension is not "
                         "a multiple of the Fock dimension");
      return induced_shift_rep(fock, amb / fock.total_dim());
    }
    if (!d.representation || d.representation->operators.empty())
      throw ParseError("factor: descriptor needs representation operators "
                       "(or --shift)");
    return build_rep(sys, *d.representation);
  }();

  if (!cli.shift_mode && d.representation) {
    const RepValidation rv =
        validate_rep(sys, d.representation->operators, opt.tol);
    const SystemValidation sv = validate_system(sys, opt.tol);
    report["validation"] = detail::validation_to_json(sv, &rv);
    if (!rv.valid || !sv.passed) {
      report["timings"] = Json{{"total_ms", clock.ms()}};
      return kExitValidationFailure;
    }
  }

  const Subspace s = build_subspace(*d.subspace);
  if (s.ambient_dim() != rep.h_dim())
    throw ParseError("factor: subspace ambient does not match the space");

  const InvarianceReport inv = is_invariant(rep, s, opt.tol);
  report["invariance"] =
      Json{{"residual", inv.residual}, {"invariant", inv.invariant}};
  if (!inv.invariant) {
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitValidationFailure;
  }

  try {
    const FactorizationResult fact = factorization(rep, s, opt.tol);
    report["factorization"] =
        Json{{"residual_range", fact.residual_range},
             {"residual_partial_isometry", fact.residual_partial_isometry},
             {"residual_intertwine", fact.residual_intertwine},
             {"rank", fact.range.rank()},
             {"defect_rank", fact.dprime_rank}};
    const WanderingFactorResult w = wandering_from_factor(rep, fact);
    Json w_basis = Json::array();
    for (Index c = 0; c < w.w_direct.rank(); ++c)
      w_basis.push_back(detail::vector_to_json(w.w_direct.basis().col(c)));
    report["wandering"] =
        Json{{"distance", w.distance},
             {"span_match_residual", w.span_match_residual},
             {"f_wandering_residual", w.f_wandering_residual},
             {"w_rank", w.w_direct.rank()},
             {"w_basis", std::move(w_basis)}};
  } catch (const TrivialSubspace& e) {
    report["error"] = std::string("TrivialSubspace: ") + e.what();
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitValidationFailure;
  } catch (const NotPure& e) {
    report["error"] = std::string("NotPure: ") + e.what();
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitValidationFailure;
  } catch (const NotInvariant& e) {
    report["error"] = std::string("NotInvariant: ") + e.what();
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitValidationFailure;
  } catch (const NotPSD& e) {
    report["error"] = std::string("NotPSD: ") + e.what();
    report["timings"] = Json{{"total_ms", clock.ms()}};
    return kExitNumericalFailure;
  }

  report["timings"] = Json{{"total_ms", clock.ms()}};
  return kExitOk;
}

} // namespace subfock
