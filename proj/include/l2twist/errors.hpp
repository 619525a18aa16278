#pragma once

#include <stdexcept>
#include <string>

namespace l2twist {

/// Malformed or inconsistent input data. The CLI maps this to exit status 2.
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

class DimensionMismatch : public InvalidInput {
 public:
  explicit DimensionMismatch(const std::string& what) : InvalidInput(what) {}
};

}  // namespace l2twist
