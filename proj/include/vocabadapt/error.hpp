#pragma once

#include <stdexcept>
#include <string>

namespace vocabadapt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input files or data that violates a documented precondition (exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// An internal invariant did not hold (exit code 4).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace vocabadapt
