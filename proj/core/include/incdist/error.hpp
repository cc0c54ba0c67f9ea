#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace incdist {

/// Base of every error raised by the library. Callers that only need a
/// diagnostic can catch this; the CLI maps all subclasses to exit status 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a domain-type invariant (ordering, finiteness, count).
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Malformed text input. `line` is 1-based and refers to the physical line.
class ParseError : public Error {
 public:
  ParseError(int line, std::string field, const std::string& what)
      : Error("line " + std::to_string(line) +
              (field.empty() ? std::string() : ", field " + field) + ": " +
              what),
        line_(line),
        field_(std::move(field)) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

/// A numerical operation was asked to work outside its domain: singular
/// systems, negative discriminants, nonpositive logarithm arguments.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace incdist
