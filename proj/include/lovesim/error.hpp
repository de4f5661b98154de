#pragma once

#include <stdexcept>
#include <string>

namespace lovesim {

// Bad input: malformed records, violated invariants, illegal configuration.
// The CLI maps this to exit status 1; any other exception maps to 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace lovesim
