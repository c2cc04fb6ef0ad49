#pragma once

#include <stdexcept>
#include <string>

namespace orbint {

/// Base class for all library failures. Catching this catches everything
/// orbint throws on purpose.
class OrbintError : public std::runtime_error {
 public:
  explicit OrbintError(const std::string& what) : std::runtime_error(what) {}
};

/// Two elements (or an element and a chain/system) with incompatible group
/// tags were combined.
class MismatchedGroups : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A truncation window excludes mass that the declared support of the
/// integrand requires.
class TruncationTooSmall : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A level was requested that the chain or family cannot realize
/// (index out of range, enumeration too large, wrong family).
class UnsupportedLevel : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A quadrature rule could not reach its target (non-finite values,
/// zero cells, invalid bounds).
class QuadratureFailure : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// An orbit passed exactly through a non-integrable singularity while the
/// policy demanded an error.
class SingularHit : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A ratio average was requested against a window of zero hitting measure.
class ZeroHitting : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A restricted average over a set the level does not meet.
class EmptyIntersection : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// The region handed to a fundamental reduction does not tile under the
/// base lattice (no representative, or more than one).
class NotAFundamentalDomain : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A conditional expectation was evaluated at a point outside the
/// partitioned region.
class PointNotInRegion : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// Malformed scenario configuration (unknown key, bad value, missing file).
class ConfigError : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

/// A computation produced non-finite output where a finite value is part of
/// the contract.
class NumericalFailure : public OrbintError {
 public:
  using OrbintError::OrbintError;
};

}  // namespace orbint
