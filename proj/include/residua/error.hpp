#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace residua {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or a violated precondition (bad generator index, m = 0, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Operands live in different ambient groups or have incompatible coefficients.
class ContextMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// A configured size cap would be exceeded. Carries the predicted size.
class SizeLimitError : public Error {
 public:
  SizeLimitError(const std::string& what, std::uint64_t predicted, std::uint64_t cap)
      : Error(what), predicted_(predicted), cap_(cap) {}
  std::uint64_t predicted() const noexcept { return predicted_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t predicted_;
  std::uint64_t cap_;
};

/// A mathematical invariant failed at runtime. Indicates a bad descriptor or a bug.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// A homomorphism identified two distinct elements of a certified ball.
class InjectivityError : public InvariantViolation {
 public:
  InjectivityError(const std::string& what, std::string first, std::string second)
      : InvariantViolation(what), first_(std::move(first)), second_(std::move(second)) {}
  const std::string& first() const noexcept { return first_; }
  const std::string& second() const noexcept { return second_; }

 private:
  std::string first_;
  std::string second_;
};

/// An instance satisfying the power lemma hypothesis with w = e and no commuting b_i.
class CounterexampleError : public InvariantViolation {
 public:
  using InvariantViolation::InvariantViolation;
};

}  // namespace residua
