#pragma once

#include <stdexcept>
#include <string>

namespace notecoder {

/// Bad input data: malformed files, missing columns, inconsistent labels.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or arguments.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace notecoder
