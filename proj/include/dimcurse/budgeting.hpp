#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "dimcurse/core_types.hpp"
#include "dimcurse/errors.hpp"

namespace dimcurse {

namespace detail {

// True iff base^exp <= limit, computed without overflow.
inline bool power_at_most(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
  std::uint64_t acc = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && acc > limit / base) return false;
    acc *= base;
  }
  return acc <= limit;
}

inline std::uint64_t saturating_product(std::uint64_t floor_factor, std::size_t n_floor,
                                        std::uint64_t ceil_factor, std::size_t n_ceil) {
  constexpr std::uint64_t kMax = UINT64_MAX;
  std::uint64_t acc = 1;
  auto mul = [&](std::uint64_t f) {
    if (f != 0 && acc > kMax / f) {
      acc = kMax;
    } else {
      acc *= f;
    }
  };
  for (std::size_t i = 0; i < n_floor; ++i) mul(floor_factor);
  for (std::size_t i = 0; i < n_ceil; ++i) mul(ceil_factor);
  return acc;
}

}  // namespace detail

/// Largest k with k^d <= T, by integer bisection.
inline std::uint64_t integer_root_floor(std::uint64_t T, std::size_t d) {
  if (T == 0 || d == 0) throw DomainError("integer_root_floor: T and d must be positive");
  if (d == 1) return T;
  std::uint64_t lo = 1;  // 1^d <= T always
  std::uint64_t hi = T;
  while (lo < hi) {
    const std::uint64_t mid = lo + (hi - lo + 1) / 2;
    if (detail::power_at_most(mid, d, T)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

/// Smallest k with k^d >= T.
inline std::uint64_t integer_root_ceil(std::uint64_t T, std::size_t d) {
  const std::uint64_t k = integer_root_floor(T, d);
  return detail::saturating_product(k, d, 0, 0) == T ? k : k + 1;
}

/// Factorizes a total budget T into d per-dimension budgets, each either
/// floor(T^(1/d)) or ceil(T^(1/d)), nondecreasing, using the fewest ceiling
/// factors that reach a product >= T. Ceiling factors go to the deepest
/// dimensions.
inline BudgetSchedule split_budget(std::uint64_t T, std::size_t d) {
  if (T == 0 || d == 0) throw DomainError("split_budget: T and d must be positive");
  const std::uint64_t lo = integer_root_floor(T, d);
  const std::uint64_t hi = lo + 1;
  std::size_t n_ceil = 0;
  while (n_ceil < d && detail::saturating_product(lo, d - n_ceil, hi, n_ceil) < T) ++n_ceil;
  std::vector<std::size_t> budgets(d, static_cast<std::size_t>(lo));
  for (std::size_t i = d - n_ceil; i < d; ++i) budgets[i] = static_cast<std::size_t>(hi);
  return BudgetSchedule(std::move(budgets));
}

/// Epoch lengths 1, 2, 4, ..., 2^(N-1), C of the doubling trick, with
/// T = (2^N - 1) + C and 1 <= C <= 2^N.
struct EpochSchedule {
  std::vector<std::uint64_t> epochs;
  unsigned n_doublings = 0;
  std::uint64_t remainder = 0;
};

inline EpochSchedule doubling_epochs(std::uint64_t T) {
  if (T == 0) throw DomainError("doubling_epochs: T must be positive");
  EpochSchedule s;
  std::uint64_t covered = 0;  // 2^N - 1
  std::uint64_t next = 1;     // 2^N
  // Grow N while the full epochs so far plus a full 2^N epoch still fall short of T.
  while (T - covered > next) {
    s.epochs.push_back(next);
    covered += next;
    next *= 2;
    ++s.n_doublings;
  }
  s.remainder = T - covered;
  s.epochs.push_back(s.remainder);
  return s;
}

}  // namespace dimcurse
