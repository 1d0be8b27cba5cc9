#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ned {

/// Base of every error raised by the library. `category()` is what the CLI
/// maps onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

/// Operand shapes do not fit the operation.
class ShapeError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "shape"; }
};

/// A documented precondition was violated by the caller.
class ContractError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "contract"; }
};

/// Malformed input file. Carries the 1-based line number when known.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const char* category() const noexcept override { return "format"; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "io"; }
};

/// NaN or infinity where a finite number is required.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numeric"; }
};

/// The entity string does not occur in the token sequence.
class MentionNotFound : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "mention_not_found"; }
};

/// No same-name item qualifies as a wrong candidate.
class NoNegative : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "no_negative"; }
};

}  // namespace ned
