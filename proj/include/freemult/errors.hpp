#pragma once

#include <stdexcept>
#include <string>

namespace freemult {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input exceeds an enumeration or truncation cap.
class SizeLimitError : public Error {
public:
  using Error::Error;
};

/// Malformed argument: invalid partition, bad probability, mismatched sizes.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Pair of partitions that are not comparable in refinement order.
class OrderViolationError : public Error {
public:
  using Error::Error;
};

/// Ground-set sizes or truncation orders disagree.
class DimensionError : public Error {
public:
  using Error::Error;
};

/// S-transform requested for a law with vanishing first moment.
class SingularTransformError : public Error {
public:
  using Error::Error;
};

/// Model combination outside the supported class (e.g. exp g with a non-atomic law).
class UnsupportedModelError : public Error {
public:
  using Error::Error;
};

/// Iterative solver failed to reach its tolerance.
class SolverError : public Error {
public:
  using Error::Error;
};

/// Discretisation too coarse for the requested accuracy.
class ResolutionError : public Error {
public:
  using Error::Error;
};

/// Smoothing kernel lacks the vanishing moments the test-function class needs.
class ClassMismatchError : public Error {
public:
  using Error::Error;
};

/// Random model keeps producing zero-trace factors.
class DegenerateModelError : public Error {
public:
  using Error::Error;
};

/// Bad configuration file or command-line flag.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace freemult
