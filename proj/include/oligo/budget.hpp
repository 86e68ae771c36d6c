#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace oligo {

// Raised when a search exceeds its node cap or a window exceeds its size cap.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shared node counter; limit 0 means unbounded.
struct Budget {
  std::uint64_t limit = 0;
  std::atomic<std::uint64_t> used{0};

  Budget() = default;
  explicit Budget(std::uint64_t cap) : limit(cap) {}

  void tick(std::uint64_t n = 1) {
    std::uint64_t now = used.fetch_add(n, std::memory_order_relaxed) + n;
    if (limit != 0 && now > limit)
      throw BudgetExceeded("search node budget of " + std::to_string(limit) + " exhausted");
  }
};

}  // namespace oligo
