#pragma once

#include <stdexcept>
#include <string>

namespace qsim {

// Invalid scenario/configuration input. CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or missing data file (ephemeris, atmosphere table). Exit code 3.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace qsim
