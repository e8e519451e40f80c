#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qrng {

/// Root of every error thrown by the library. The CLI maps subclasses onto
/// exit codes: IoError -> 2, everything else -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An index or value falls outside a supported range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// A spectrum cutoff would drop more probability mass than allowed.
class TruncationError : public Error {
 public:
  using Error::Error;
};

/// The balance solver was asked to attenuate the unfavoured arm (R > 1).
class ArmRoleError : public Error {
 public:
  using Error::Error;
};

/// Estimation was attempted on data with an empty outcome bin.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Bit data contained a symbol other than 0 or 1.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed binary or text input. Carries the byte offset of the problem.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

/// A time-tag stream is not sorted. Carries the first offending index.
class OrderingError : public Error {
 public:
  OrderingError(const std::string& what, std::size_t index)
      : Error(what + " (at event index " + std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// No OAM projection reaches the requested bias. Carries the achievable
/// interval of p0.
class UnachievableTargetError : public Error {
 public:
  UnachievableTargetError(const std::string& what, double lo, double hi)
      : Error(what + " (achievable p0 in [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "])"),
        lo_(lo),
        hi_(hi) {}

  double achievable_min() const noexcept { return lo_; }
  double achievable_max() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// File-system failure (missing input, unwritable output).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace qrng
