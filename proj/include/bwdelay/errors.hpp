#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bwdelay {

enum class ErrorCategory {
  phase_space_closed,
  degenerate_shape,
  collinear_singularity,
  regularization_singular,
  quadrature_under_resolved,
  grid_unconverged,
  parse_error,
  validation_error,
};

constexpr std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::phase_space_closed: return "PhaseSpaceClosed";
    case ErrorCategory::degenerate_shape: return "DegenerateShape";
    case ErrorCategory::collinear_singularity: return "CollinearSingularity";
    case ErrorCategory::regularization_singular: return "RegularizationSingular";
    case ErrorCategory::quadrature_under_resolved: return "QuadratureUnderResolved";
    case ErrorCategory::grid_unconverged: return "GridUnconverged";
    case ErrorCategory::parse_error: return "ParseError";
    case ErrorCategory::validation_error: return "ValidationError";
  }
  return "Unknown";
}

/// Base of every error raised by the library. The category is stable and
/// machine readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

template <ErrorCategory C>
class CategorizedError : public Error {
 public:
  explicit CategorizedError(const std::string& what) : Error(C, what) {}
};

using PhaseSpaceClosed = CategorizedError<ErrorCategory::phase_space_closed>;
using DegenerateShape = CategorizedError<ErrorCategory::degenerate_shape>;
using CollinearSingularity = CategorizedError<ErrorCategory::collinear_singularity>;
using RegularizationSingular = CategorizedError<ErrorCategory::regularization_singular>;
using QuadratureUnderResolved = CategorizedError<ErrorCategory::quadrature_under_resolved>;
using GridUnconverged = CategorizedError<ErrorCategory::grid_unconverged>;

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& field, const std::string& what)
      : Error(ErrorCategory::parse_error,
              "line " + std::to_string(line) + (field.empty() ? "" : " (" + field + ")") + ": " + what),
        line_(line), field_(field) {}

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  int line_;
  std::string field_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& what)
      : Error(ErrorCategory::validation_error, field + ": " + what), field_(field) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace bwdelay
