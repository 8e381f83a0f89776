#pragma once

#include <stdexcept>
#include <string>

namespace stereocal {

/// Base class for all library errors so callers can catch the whole family.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid option or parameter combination supplied by the caller.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// --- geometry -------------------------------------------------------------

/// Homogeneous point whose third projective component vanishes.
class PointAtInfinity : public Error {
 public:
  using Error::Error;
};

/// Euler decomposition hit the pitch singularity; (yaw, roll) not unique.
class GimbalLock : public Error {
 public:
  using Error::Error;
};

// --- triangulation ---------------------------------------------------------

/// The two optical rays are parallel; no unique closest-approach midpoint.
class ParallelRays : public Error {
 public:
  using Error::Error;
};

// --- relative-pose estimation ----------------------------------------------

/// Input geometry does not constrain the problem (coplanar, collinear,
/// repeated points, ...).
class DegenerateConfiguration : public Error {
 public:
  using Error::Error;
};

/// Fewer correspondences than the estimator needs.
class InsufficientCorrespondences : public Error {
 public:
  using Error::Error;
};

/// No candidate factorization won a clear cheirality majority.
class AmbiguousCheirality : public Error {
 public:
  using Error::Error;
};

// --- minimization ------------------------------------------------------------

/// Cost function returned NaN or infinity.
class NonFiniteCost : public Error {
 public:
  using Error::Error;
};

// --- scene generation --------------------------------------------------------

/// Rejection sampling failed to place a target bar within the attempt budget.
class PlacementExhausted : public Error {
 public:
  using Error::Error;
};

/// A required target detection is absent from the data.
class MissingTarget : public Error {
 public:
  using Error::Error;
};

// --- file I/O ----------------------------------------------------------------

/// Line-level syntax problem; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

/// Structurally well-formed file that violates the schema (missing or
/// duplicate records, out-of-range indices, non-finite values).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Unknown format tag or unsupported version.
class VersionError : public Error {
 public:
  using Error::Error;
};

/// Stored derived quantities disagree with values recomputed from the
/// primary fields.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace stereocal
