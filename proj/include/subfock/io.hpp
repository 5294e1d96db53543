#pragma once

// JSON problem descriptors and reports.
//
// Complex scalars are [re, im] pairs throughout; no complex-literal
// dialects.  Field names and the schema version are part of the CLI
// contract, so fixtures stay language-neutral and diffable.

#include <json.hpp>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subfock/curvature.hpp"
#include "subfock/invariant.hpp"
#include "subfock/representation.hpp"
#include "subfock/subproduct.hpp"

namespace subfock {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Malformed descriptor content (wrong types, missing fields, bad shapes).
class ParseError : public Error {
public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

// ---------------------------------------------------------------------------
// Descriptor
// ---------------------------------------------------------------------------

struct SystemSpec {
  std::string kind; // "full" | "symmetric" | "degree2"
  Index d = 0;
  Index truncation = 0;
  // degree2 only: vectors spanning X(2) inside E (x) E.
  std::vector<ComplexVector> relations;
};

struct RepSpec {
  Index dim = 0;
  std::vector<ComplexMatrix> operators;
};

struct SubspaceSpec {
  // Spanning vectors (columns); orthonormalized on construction.
  ComplexMatrix basis;
};

struct OptionsSpec {
  double tol = 1e-9;
  Index k_max = -1; // -1: default to the truncation degree
  Index window = kDefaultRatioWindow;
  double eps = kDefaultRatioEps;
};

struct ProblemDescriptor {
  SystemSpec system;
  std::optional<RepSpec> representation;
  std::optional<SubspaceSpec> subspace;
  OptionsSpec options;
};

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

inline Complex parse_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ParseError(where + ": complex values must be [re, im] pairs");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline ComplexVector parse_vector(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i)
    v[i] = parse_complex(j[static_cast<size_t>(i)], where);
  return v;
}

inline ComplexMatrix parse_matrix(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ParseError(where + ": expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  ComplexMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError(where + ": ragged rows");
    for (Index c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[static_cast<size_t>(c)], where);
  }
  return m;
}

inline Json complex_to_json(const Complex& z) {
  return Json::array({z.real(), z.imag()});
}

inline Json vector_to_json(const ComplexVector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json out = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace detail

inline ProblemDescriptor parse_descriptor(const Json& j) {
  if (!j.is_object()) throw ParseError("descriptor: expected a JSON object");
  ProblemDescriptor out;

  if (!j.contains("system") || !j["system"].is_object())
    throw ParseError("descriptor: missing system block");
  const Json& sys = j["system"];
  out.system.kind = sys.value("kind", std::string());
  if (out.system.kind != "full" && out.system.kind != "symmetric" &&
      out.system.kind != "degree2")
    throw ParseError("system.kind must be full, symmetric or degree2");
  if (!sys.contains("d") || !sys.contains("N"))
    throw ParseError("system: d and N are required");
  out.system.d = sys["d"].get<Index>();
  out.system.truncation = sys["N"].get<Index>();
  if (sys.contains("relations")) {
    for (const Json& rel : sys["relations"])
      out.system.relations.push_back(
          detail::parse_vector(rel, "system.relations"));
  }

  if (j.contains("representation")) {
    const Json& rep = j["representation"];
    RepSpec spec;
    if (!rep.contains("dim")) throw ParseError("representation: dim required");
    spec.dim = rep["dim"].get<Index>();
    if (rep.contains("operators")) {
      for (const Json& op : rep["operators"])
        spec.operators.push_back(
            detail::parse_matrix(op, "representation.operators"));
    }
    out.representation = std::move(spec);
  }

  if (j.contains("subspace")) {
    const Json& sub = j["subspace"];
    if (!sub.contains("basis") || !sub["basis"].is_array() ||
        sub["basis"].empty())
      throw ParseError("subspace: basis vectors required");
    std::vector<ComplexVector> cols;
    for (const Json& v : sub["basis"])
      cols.push_back(detail::parse_vector(v, "subspace.basis"));
    ComplexMatrix basis(cols.front().size(), static_cast<Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].size() != basis.rows())
        throw ParseError("subspace.basis: vectors of unequal length");
      basis.col(static_cast<Index>(c)) = cols[c];
    }
    out.subspace = SubspaceSpec{std::move(basis)};
  }

  if (j.contains("options")) {
    const Json& opt = j["options"];
    out.options.tol = opt.value("tol", out.options.tol);
    out.options.k_max = opt.value("k_max", out.options.k_max);
    out.options.window = opt.value("window", out.options.window);
    out.options.eps = opt.value("eps", out.options.eps);
  }
  return out;
}

inline Json descriptor_to_json(const ProblemDescriptor& d) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json sys;
  sys["kind"] = d.system.kind;
  sys["d"] = d.system.d;
  sys["N"] = d.system.truncation;
  if (!d.system.relations.empty()) {
    Json rels = Json::array();
    for (const auto& r : d.system.relations)
      rels.push_back(detail::vector_to_json(r));
    sys["relations"] = std::move(rels);
  }
  j["system"] = std::move(sys);
  if (d.representation) {
    Json rep;
    rep["dim"] = d.representation->dim;
    Json ops = Json::array();
    for (const auto& op : d.representation->operators)
      ops.push_back(detail::matrix_to_json(op));
    rep["operators"] = std::move(ops);
    j["representation"] = std::move(rep);
  }
  if (d.subspace) {
    Json sub;
    Json basis = Json::array();
    for (Index c = 0; c < d.subspace->basis.cols(); ++c)
      basis.push_back(detail::vector_to_json(d.subspace->basis.col(c)));
    sub["basis"] = std::move(basis);
    j["subspace"] = std::move(sub);
  }
  Json opt;
  opt["tol"] = d.options.tol;
  opt["k_max"] = d.options.k_max;
  opt["window"] = d.options.window;
  opt["eps"] = d.options.eps;
  j["options"] = std::move(opt);
  return j;
}

// ---------------------------------------------------------------------------
// Construction from descriptors
// ---------------------------------------------------------------------------

inline SubproductSystem build_system(const SystemSpec& spec) {
  if (spec.d < 1 || spec.truncation < 1)
    throw ParseError("system: need d >= 1 and N >= 1");
  if (spec.kind == "full") return full_system(spec.d, spec.truncation);
  if (spec.kind == "symmetric")
    return symmetric_system(spec.d, spec.truncation);
  if (spec.relations.empty())
    throw ParseError("system: degree2 systems need relations spanning X(2)");
  ComplexMatrix span(spec.d * spec.d,
                     static_cast<Index>(spec.relations.size()));
  for (size_t c = 0; c < spec.relations.size(); ++c) {
    if (spec.relations[c].size() != spec.d * spec.d)
      throw ParseError("system.relations: vectors must have length d^2");
    span.col(static_cast<Index>(c)) = spec.relations[c];
  }
  return degree2_system(spec.d, spec.truncation, range_isometry(span));
}

inline CovariantRep build_rep(const SubproductSystem& sys,
                              const RepSpec& spec) {
  if (static_cast<Index>(spec.operators.size()) != sys.generator_dim())
    throw ParseError("representation: need exactly d operators");
  for (const auto& op : spec.operators)
    if (op.rows() != spec.dim || op.cols() != spec.dim)
      throw ParseError("representation: operators must be dim x dim");
  return CovariantRep(sys, spec.operators);
}

inline Subspace build_subspace(const SubspaceSpec& spec) {
  return range_isometry(spec.basis);
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline const char* method_name(CurvatureMethod m) {
  switch (m) {
    case CurvatureMethod::direct: return "direct";
    case CurvatureMethod::closed_form: return "closed_form";
    case CurvatureMethod::poisson: return "poisson";
    case CurvatureMethod::complement: return "complement";
  }
  return "?";
}

inline const char* termination_name(CurvatureTermination t) {
  switch (t) {
    case CurvatureTermination::converged: return "converged";
    case CurvatureTermination::k_exhausted: return "k_exhausted";
    case CurvatureTermination::denominator_bounded:
      return "denominator_bounded";
  }
  return "?";
}

inline Json curvature_report_to_json(const CurvatureReport& r) {
  Json j;
  j["method"] = method_name(r.method);
  if (r.estimate)
    j["estimate"] = *r.estimate;
  else
    j["estimate"] = nullptr;
  j["k_used"] = r.k_used;
  j["partial_numerators"] = r.partial_numerators;
  j["partial_denominators"] = r.partial_denominators;
  j["ratios"] = r.ratios;
  j["termination"] = termination_name(r.termination);
  if (r.tail_value) j["tail_value"] = *r.tail_value;
  if (r.beyond_truncation) j["beyond_truncation"] = true;
  if (r.complement_residual) j["complement_residual"] = *r.complement_residual;
  return j;
}

} // namespace subfock
