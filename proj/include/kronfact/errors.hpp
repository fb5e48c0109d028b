#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kronfact {

/// Invalid argument: index out of range, incompatible sizes, bad parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The all-zero pattern has no well-defined factors.
class EmptyPatternError : public DomainError {
 public:
  EmptyPatternError() : DomainError("pattern has no nonzero entries") {}
  explicit EmptyPatternError(const std::string& what) : DomainError(what) {}
};

/// A claimed Kronecker relation did not hold when re-checked.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::int64_t line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::int64_t line() const noexcept { return line_; }

 private:
  std::int64_t line_;
};

}  // namespace kronfact
