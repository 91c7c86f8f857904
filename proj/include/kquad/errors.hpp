#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kquad {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A point outside [0,1] or another out-of-domain argument.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Eigen-index 0 or an index beyond a finite sequence.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration value (non-positive gamma, M < N, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Violated precondition of an operation, e.g. g outside E_N.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  SingularMatrixError(std::size_t pivot, const std::string& what)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

// The rejection loop exceeded its proposal budget for a single point.
class SamplerStallError : public Error {
 public:
  using Error::Error;
};

// Every resampling attempt produced an ill-conditioned configuration.
class ResampleExhaustedError : public Error {
 public:
  using Error::Error;
};

// An internal numerical invariant failed (e.g. a clearly negative squared norm).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace kquad
