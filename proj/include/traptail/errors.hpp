#pragma once

#include <stdexcept>
#include <string>

namespace traptail {

// Base of every error raised by the library. The CLI maps all of these to
// exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A closed form or state space would exceed double range / memory limits.
class OverflowError : public Error {
 public:
  using Error::Error;
};

// Evaluation requested at a pole of a meromorphic function.
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// A simulated walk exceeded its step cap.
class IterationLimitError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace traptail
