// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jointaxis {

/// Invalid argument supplied to a library call (sizes, ranges, counts).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A vector that must be unit length was not.
class NormViolation : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// Inconsistent or out-of-range configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Data that was supposed to be stationary shows motion.
class NotStationaryError : public std::runtime_error {
 public:
  NotStationaryError(std::string axis, double observed, double limit);

  const std::string& axis() const noexcept { return axis_; }
  double observed() const noexcept { return observed_; }
  double limit() const noexcept { return limit_; }

 private:
  std::string axis_;
  double observed_;
  double limit_;
};

/// Malformed input file. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace jointaxis
