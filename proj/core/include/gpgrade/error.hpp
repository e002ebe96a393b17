#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gpgrade {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller supplied data that violates a precondition (dimensions, grades, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// A feature file could not be parsed. `line()` is 1-based; 0 means the
/// problem is not tied to a specific line (missing file, no records).
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : InputError(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Linear algebra failure. For Cholesky failures `index()` is the diagonal
/// position where the last attempted factorization broke down.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::ptrdiff_t index = -1)
      : Error(what), index_(index) {}

  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  std::ptrdiff_t index_;
};

/// Hyperparameter search produced no finite objective at any restart.
class OptimizationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A model archive could not be read back.
class LoadError : public Error {
 public:
  enum class Kind { Io, BadMagic, Version, Truncated, Checksum, Corrupt };

  LoadError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace gpgrade
