#pragma once

#include <stdexcept>
#include <string>

namespace qasat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (bad indices, length mismatch, bad files).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A configured size cap or attempt budget was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// The random generator could not produce a problem within its budget.
class GenerationError : public ResourceError {
 public:
  using ResourceError::ResourceError;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace qasat
