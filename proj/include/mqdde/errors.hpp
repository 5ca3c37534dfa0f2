#pragma once

#include <stdexcept>
#include <string>

namespace mqdde {

/// Raised when arguments violate an operation's preconditions.
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a function is evaluated outside the region where it is defined,
/// e.g. a history queried below its lower bound.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace mqdde
