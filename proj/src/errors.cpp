// SPDX-License-Identifier: Apache-2.0

#include "jointaxis/errors.hpp"

#include <sstream>

namespace jointaxis {

namespace {

std::string stationary_message(const std::string& axis, double observed, double limit) {
  std::ostringstream os;
  os << "data is not stationary: " << axis << " std " << observed << " exceeds " << limit;
  return os.str();
}

std::string line_message(std::size_t line, const std::string& what) {
  if (line == 0) return what;
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

NotStationaryError::NotStationaryError(std::string axis, double observed, double limit)
    : std::runtime_error(stationary_message(axis, observed, limit)),
      axis_(std::move(axis)),
      observed_(observed),
      limit_(limit) {}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error(line_message(line, what)), line_(line) {}

}  // namespace jointaxis
