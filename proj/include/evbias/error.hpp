#pragma once

#include <stdexcept>

namespace evbias {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied values break a documented precondition (bias ranges,
/// zero periods, geometry too small, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Serialized data could not be decoded (bad magic, truncated record,
/// malformed CSV row, ordering violation in strict mode).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// The operating system refused a read or write.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace evbias
