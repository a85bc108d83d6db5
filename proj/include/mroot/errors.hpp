#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mroot {

// Base-point or stencil evaluation left the declared domain box, or a
// reciprocal node hit a zero denominator.
class DomainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The probe is outside the admissible cone: A <= 0 or (A_ij) not positive
// definite. Carries the reciprocal condition estimate of (A_ij) when known.
class DegenerateMetric : public std::runtime_error {
public:
  enum class Kind { nonpositive_A, singular_hessian, zero_direction, indefinite_g };

  DegenerateMetric(Kind kind, const std::string& what, double rcond = 0.0)
      : std::runtime_error(what), kind_(kind), rcond_(rcond) {}
  Kind kind() const noexcept { return kind_; }
  double rcond() const noexcept { return rcond_; }

private:
  Kind kind_;
  double rcond_;
};

// Malformed metric file or expression text.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + what),
        line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

// Operation invoked outside its hypotheses (n = 1 for the isotropic check,
// m != 2 for the Riemannian spray form, too few base points, ...).
class UsageError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mroot
