#pragma once

#include <stdexcept>
#include <string>

namespace fairauc {

// Bad config file / CLI usage. CLI maps this to its own exit code.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A training invariant was broken (negative multiplier, infeasible pair
// distribution, non-finite loss). Distinct so runs fail loudly.
struct InvariantViolation : std::runtime_error {
  explicit InvariantViolation(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fairauc
