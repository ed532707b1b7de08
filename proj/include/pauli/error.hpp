#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pauli {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed weight expression; `position` is the 0-based character offset.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid argument or configuration value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Overflow, breakdown, certification failure and similar numerical trouble.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace pauli
