#pragma once

#include <stdexcept>
#include <string>

namespace hexflow {

// Bad or missing input files. The CLI maps this to exit code 2.
struct InputError : std::runtime_error {
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration (CLI flags, config JSON, parameter structs).
// The CLI maps this to exit code 3.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Corrupt or inconsistent data discovered mid-run. Exit code 1.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hexflow
