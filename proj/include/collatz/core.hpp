#ifndef COLLATZ_CORE_HPP
#define COLLATZ_CORE_HPP

#include <cstdint>
#include <string_view>
#include <vector>

#include "collatz/error.hpp"
#include "collatz/uint128.hpp"

namespace collatz {

/// How the step count of the input 1 is defined.
///
/// `paper` iterates until 1 recurs (1 -> 4 -> 2 -> 1, three steps), which
/// makes the family step identities hold uniformly down to the root 1.
/// `standard` returns 0, matching published stopping-time tables.
enum class Convention : std::uint8_t { paper = 0, standard = 1 };

std::string_view to_string(Convention c) noexcept;
Convention parse_convention(std::string_view text);

inline constexpr std::uint64_t default_budget = 100'000;

/// Positive integer in 128 bits. Zero is unrepresentable.
class CollatzInt {
 public:
  explicit CollatzInt(u128 value) : value_(value) {
    if (value == 0) throw InvalidArgument("Collatz values must be positive");
  }

  [[nodiscard]] constexpr u128 value() const noexcept { return value_; }
  [[nodiscard]] constexpr bool is_odd() const noexcept { return (value_ & 1) != 0; }

  friend constexpr bool operator==(CollatzInt, CollatzInt) noexcept = default;
  friend constexpr auto operator<=>(CollatzInt, CollatzInt) noexcept = default;

 private:
  u128 value_;
};

/// n/2 for even n, 3n+1 for odd n. Throws OverflowError if 3n+1 needs more
/// than 128 bits.
CollatzInt collatz_step(CollatzInt n);

enum class TrajectoryStatus : std::uint8_t { converged, budget_exhausted };

struct Trajectory {
  CollatzInt seed;
  /// values[0] is the first image of the seed.
  std::vector<u128> values;
  std::uint64_t steps = 0;
  u128 peak = 0;
  TrajectoryStatus status = TrajectoryStatus::converged;

  [[nodiscard]] bool converged() const noexcept { return status == TrajectoryStatus::converged; }
};

/// Iterates until 1 is appended or max_steps values have been produced.
/// Seed 1 runs the 1 -> 4 -> 2 -> 1 cycle once. Running out of steps is
/// reported through `status`, not thrown.
Trajectory trajectory(CollatzInt n, std::uint64_t max_steps = default_budget);

struct StepCount {
  CollatzInt n;
  std::uint64_t count;
};

/// Number of applications of the map until 1 is first reached.
/// Throws OverflowError or BudgetExhausted.
StepCount stopping_count(CollatzInt n, std::uint64_t budget = default_budget,
                         Convention convention = Convention::paper);

struct DecompositionTerm {
  unsigned exponent;  // s_i: 2-adic valuation of 3*b_{i-1}+1
  u128 odd;           // b_i
  friend bool operator==(const DecompositionTerm&, const DecompositionTerm&) = default;
};

/// 3*b_{i-1} + 1 = 2^{s_i} * b_i for each term, starting from b_0 = n and
/// ending at b_k = 1.
struct Decomposition {
  CollatzInt n;
  std::vector<DecompositionTerm> terms;

  [[nodiscard]] std::size_t k() const noexcept { return terms.size(); }
  [[nodiscard]] std::uint64_t exponent_sum() const noexcept;
  /// sum(s_i) + k, the step count implied by the chain.
  [[nodiscard]] std::uint64_t total_steps() const noexcept { return exponent_sum() + k(); }
};

/// Odd-step chain of n. `budget` bounds sum(s_i) + k.
Decomposition syracuse_decompose(CollatzInt n, std::uint64_t budget = default_budget);

// Non-throwing kernel shared by the scanners.

enum class WalkStatus : std::uint8_t { converged, budget_exhausted, overflow };

struct Walk {
  WalkStatus status = WalkStatus::converged;
  std::uint64_t steps = 0;
  u128 peak = 0;
};

/// Full walk from n to the first arrival at 1, tracking the peak (which
/// includes n itself).
Walk walk(u128 n, std::uint64_t budget, Convention convention) noexcept;

}  // namespace collatz

#endif  // COLLATZ_CORE_HPP
