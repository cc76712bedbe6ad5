#pragma once

#include <stdexcept>
#include <string>

namespace uavsim {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration or input data (bad bounds, non-finite values, ...).
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

// A query outside the sampled/representable domain of a model.
class OutOfRangeError : public Error {
 public:
  explicit OutOfRangeError(const std::string& what) : Error(what) {}
};

}  // namespace uavsim
