#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bipartite_lens {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An edge was requested between two nodes of the same mode.
class ModeViolation : public Error {
public:
  using Error::Error;
};

class UnknownNode : public Error {
public:
  using Error::Error;
};

/// A 64-bit count would wrap.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// The brute-force oracle refuses graphs above its node cap.
class TooLarge : public Error {
public:
  using Error::Error;
};

class InsufficientData : public Error {
public:
  using Error::Error;
};

class WindowOutOfRange : public Error {
public:
  using Error::Error;
};

class EmptyStore : public Error {
public:
  using Error::Error;
};

/// Stream-level input failure (unopenable file, missing header, invalid UTF-8).
class UnreadableInput : public Error {
public:
  using Error::Error;
};

class InvalidConfig : public Error {
public:
  using Error::Error;
};

class ShiftOutsideRange : public InvalidConfig {
public:
  using InvalidConfig::InvalidConfig;
};

namespace checked {

inline std::uint64_t add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw OverflowError("64-bit count overflow in addition");
  return r;
}

inline std::uint64_t mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("64-bit count overflow in multiplication");
  return r;
}

/// n choose 2
inline std::uint64_t pairs(std::uint64_t n) {
  if (n < 2) return 0;
  return (n % 2 == 0) ? mul(n / 2, n - 1) : mul(n, (n - 1) / 2);
}

}  // namespace checked

}  // namespace bipartite_lens
