#pragma once

#include <stdexcept>
#include <string>

namespace hetq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed container bytes: bad magic, unsupported version, truncation.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid input that breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range parameters and malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// No memory configuration satisfies the latency and power constraints.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetq
