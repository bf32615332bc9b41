#pragma once

#include <stdexcept>
#include <string>

namespace cventropic {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The grid cannot represent the requested state or transform faithfully
/// (Nyquist violation, mass leaking past the grid edge, ...).
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// Arguments violate a documented precondition (mode-count mismatch, zero
/// operator, out-of-range axis, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed run configuration. Raised by the cli layer only.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cventropic
