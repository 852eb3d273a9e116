#pragma once

#include <stdexcept>
#include <string>

namespace pslab {

// Malformed or out-of-range input. The CLI maps it to exit code 2.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a power series is inverted at a polynomial with f(0) = 0.
class SingularInversionError : public InputError {
 public:
  using InputError::InputError;
};

// Polyhedral data with no admissible nonsingular vertex.
class DegenerateDomainError : public InputError {
 public:
  using InputError::InputError;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

// A numerical procedure failed to converge. The CLI maps it to exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pslab
