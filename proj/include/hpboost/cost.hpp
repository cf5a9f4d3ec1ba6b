#pragma once

#include <cstdint>
#include <limits>
#include <string>

namespace hpboost {

// Costs are exact integers. kInfiniteCost is absorbing under addition and
// compares above every finite cost.
using Cost = std::int64_t;

inline constexpr Cost kInfiniteCost = std::numeric_limits<Cost>::max();

constexpr bool is_infinite(Cost c) noexcept { return c == kInfiniteCost; }

constexpr Cost add_costs(Cost a, Cost b) noexcept {
  if (is_infinite(a) || is_infinite(b)) return kInfiniteCost;
  Cost out = 0;
  if (__builtin_add_overflow(a, b, &out) || out == kInfiniteCost) return kInfiniteCost;
  return out;
}

inline std::string cost_to_string(Cost c) {
  return is_infinite(c) ? std::string("inf") : std::to_string(c);
}

}  // namespace hpboost
