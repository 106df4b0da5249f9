#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sosperturb {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Polynomial text could not be parsed. `position()` is a 0-based byte offset.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at position " + std::to_string(position) + ": " +
              message),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class VariableOutOfRange : public Error {
 public:
  using Error::Error;
};

class DegreeTooLow : public Error {
 public:
  using Error::Error;
};

class ConvergenceFailure : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

/// The semidefinite solver did not return a usable optimum.
class SolverFailure : public Error {
 public:
  using Error::Error;
};

class TooManyGenerators : public Error {
 public:
  using Error::Error;
};

class IncompleteMoments : public Error {
 public:
  using Error::Error;
};

/// A lemma hypothesis does not hold for the given moment vector.
class HypothesisUnmet : public Error {
 public:
  using Error::Error;
};

class NoSamplesAccepted : public Error {
 public:
  using Error::Error;
};

}  // namespace sosperturb
