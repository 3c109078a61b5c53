#pragma once

#include <stdexcept>
#include <string>

namespace tonal {

/// Malformed or out-of-contract input data (files, request bodies, arguments
/// describing musical content).
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration: weights, bounds, library filters, tonality flags.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tonal
