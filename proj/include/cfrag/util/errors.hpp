#pragma once

#include <stdexcept>
#include <string>

namespace cfrag {

// Invalid run or synthesis configuration. The CLI maps it to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or inconsistent input data. The CLI maps it to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cfrag
