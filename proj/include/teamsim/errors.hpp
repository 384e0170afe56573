#pragma once

#include <stdexcept>
#include <string>

namespace teamsim {

// Invalid scenario, parameters or CLI arguments. Maps to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data (ticket files, gap lists). Maps to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Filesystem failures. Maps to exit code 2.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Broken engine invariant (duplicate queue entry, non-finite state).
// Maps to exit code 3.
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace teamsim
