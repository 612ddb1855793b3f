#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace climroom {

/// Argument outside the domain of a physical relation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Well-formed input with the wrong shape (record counts, gaps, ordering).
class StructuralError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A field value outside its admissible range.
class ValidationError : public std::runtime_error {
  public:
    ValidationError(const std::string& field, double value, const std::string& detail = {})
        : std::runtime_error("invalid " + field + " = " + std::to_string(value) +
                             (detail.empty() ? "" : " (" + detail + ")")),
          field_(field) {}
    explicit ValidationError(const std::string& message)
        : std::runtime_error(message) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

class NumericalError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace climroom
