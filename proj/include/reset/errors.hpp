#pragma once

#include <stdexcept>
#include <string>

namespace reset {

/// A precondition on an argument was not met (bad dimension, bad horizon, ...).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// A learner was driven out of its query/update order.
class LifecycleError : public std::logic_error {
 public:
  explicit LifecycleError(const std::string& what) : std::logic_error(what) {}
};

/// More trials were played than the learner was initialised for.
class HorizonExhausted : public LifecycleError {
 public:
  explicit HorizonExhausted(const std::string& what) : LifecycleError(what) {}
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace detail
}  // namespace reset
