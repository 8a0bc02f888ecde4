#pragma once

#include <stdexcept>
#include <string>

namespace vbits {

// Recoverable failures: bad input, out-of-range values, malformed data.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AlignmentError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class AllocationError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidSequence : public Error {
 public:
  InvalidSequence(const std::string& what, std::size_t offset)
      : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class OutOfBounds : public Error {
 public:
  using Error::Error;
};

// Broken ownership contracts (double free, freeing an unknown address).
// These indicate a bug in the caller, never bad input.
class FatalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace vbits
