#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace fedpref {

// Shape or dimension mismatch between containers.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite values, divergence or solver failure. Carries the index of the
// step/iteration/round at which it was detected when one is known.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what,
                        std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(what), index_(index) {}

  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  std::optional<std::size_t> index_;
};

// Numeric failure during a federation run, tagged with the 1-based round.
class RoundError : public NumericError {
 public:
  RoundError(const std::string& what, std::size_t round)
      : NumericError(what + " (round " + std::to_string(round) + ")", round) {}

  std::size_t round() const noexcept { return *index(); }
};

}  // namespace fedpref
