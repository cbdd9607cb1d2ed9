#pragma once

#include <stdexcept>
#include <string>

namespace hsagg {

// Randomized construction exhausted its retry budget; the usual remedy is a
// larger prime modulus.
struct ConstructionFailed : std::runtime_error {
  explicit ConstructionFailed(const std::string& what) : std::runtime_error(what) {}
};

// More relays are missing than the code's straggler tolerance s.
struct TooManyMissing : std::invalid_argument {
  explicit TooManyMissing(const std::string& what) : std::invalid_argument(what) {}
};

// A lifted sum entry exceeded K*(q-1): upstream corruption, not a decode path.
struct OutOfRange : std::runtime_error {
  explicit OutOfRange(const std::string& what) : std::runtime_error(what) {}
};

// Brute-force enumeration would exceed its state budget.
struct TooLarge : std::runtime_error {
  explicit TooLarge(const std::string& what) : std::runtime_error(what) {}
};

// A sweep enumeration does not fit the caller's episode budget.
struct BudgetExceeded : std::runtime_error {
  explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hsagg
