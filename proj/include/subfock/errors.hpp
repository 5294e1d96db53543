#pragma once

#include <stdexcept>
#include <string>

namespace subfock {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A matrix expected to be Hermitian is not, beyond tolerance.
class NotHermitian : public Error {
public:
  explicit NotHermitian(const std::string& msg) : Error(msg) {}
};

// A matrix expected to be positive semidefinite has an eigenvalue below -tol.
class NotPSD : public Error {
public:
  explicit NotPSD(const std::string& msg) : Error(msg) {}
};

// Subspaces (or a subspace and an operator) live in different ambient spaces.
class AmbientMismatch : public Error {
public:
  explicit AmbientMismatch(const std::string& msg) : Error(msg) {}
};

// Operator dimensions are inconsistent.
class ShapeMismatch : public Error {
public:
  explicit ShapeMismatch(const std::string& msg) : Error(msg) {}
};

// A degree index exceeds the truncation level of the system.
class DegreeOutOfRange : public Error {
public:
  explicit DegreeOutOfRange(const std::string& msg) : Error(msg) {}
};

// A subspace fails the invariance test required by the operation.
class NotInvariant : public Error {
public:
  explicit NotInvariant(const std::string& msg) : Error(msg) {}
};

// The representation fails the purity test required by the operation.
class NotPure : public Error {
public:
  explicit NotPure(const std::string& msg) : Error(msg) {}
};

// A zero-dimensional subspace was passed where the factorization
// requires a non-degenerate one.
class TrivialSubspace : public Error {
public:
  explicit TrivialSubspace(const std::string& msg) : Error(msg) {}
};

// A subspace fails the wandering test required by the operation.
class NotWandering : public Error {
public:
  explicit NotWandering(const std::string& msg) : Error(msg) {}
};

// The closed-form curvature is only valid when every degree equals the
// full tensor power.
class NotProductSystem : public Error {
public:
  explicit NotProductSystem(const std::string& msg) : Error(msg) {}
};

// Requested a regime that cannot occur over scalar coefficients
// (e.g. generator dimension below one).
class UnsupportedCase : public Error {
public:
  explicit UnsupportedCase(const std::string& msg) : Error(msg) {}
};

// A ratio-limit denominator is zero or negative.
class NonpositiveDenominator : public Error {
public:
  explicit NonpositiveDenominator(const std::string& msg) : Error(msg) {}
};

} // namespace subfock
