#include "collatz/core.hpp"

#include <algorithm>
#include <string>

namespace collatz {

std::string_view to_string(Convention c) noexcept {
  return c == Convention::paper ? "paper" : "standard";
}

Convention parse_convention(std::string_view text) {
  if (text == "paper") return Convention::paper;
  if (text == "standard") return Convention::standard;
  throw InvalidArgument("unknown convention '" + std::string(text) + "' (expected paper|standard)");
}

CollatzInt collatz_step(CollatzInt n) {
  const u128 v = n.value();
  if ((v & 1) == 0) return CollatzInt(v >> 1);
  const auto next = checked_triple_plus_one(v);
  if (!next) throw OverflowError("3n+1 overflows 128 bits at n = " + to_string(v));
  return CollatzInt(*next);
}

Walk walk(u128 n, std::uint64_t budget, Convention convention) noexcept {
  Walk w;
  w.peak = n;
  u128 v = n;
  if (n == 1) {
    if (convention == Convention::standard) return w;
    v = 4;
    w.steps = 1;
    w.peak = 4;
  }
  while (v != 1) {
    if (v & 1) {
      const auto next = checked_triple_plus_one(v);
      if (!next) {
        w.status = WalkStatus::overflow;
        return w;
      }
      v = *next;
      ++w.steps;
      w.peak = std::max(w.peak, v);
    } else {
      const int tz = countr_zero(v);
      v >>= tz;
      w.steps += static_cast<std::uint64_t>(tz);
    }
    if (w.steps > budget) {
      w.status = WalkStatus::budget_exhausted;
      return w;
    }
  }
  return w;
}

Trajectory trajectory(CollatzInt n, std::uint64_t max_steps) {
  if (max_steps == 0) throw InvalidArgument("max_steps must be at least 1");
  Trajectory t{.seed = n, .values = {}, .steps = 0, .peak = n.value(),
               .status = TrajectoryStatus::budget_exhausted};
  CollatzInt v = n;
  do {
    v = collatz_step(v);
    t.values.push_back(v.value());
    t.peak = std::max(t.peak, v.value());
  } while (v.value() != 1 && t.values.size() < max_steps);
  t.steps = t.values.size();
  if (v.value() == 1) t.status = TrajectoryStatus::converged;
  return t;
}

StepCount stopping_count(CollatzInt n, std::uint64_t budget, Convention convention) {
  const Walk w = walk(n.value(), budget, convention);
  switch (w.status) {
    case WalkStatus::overflow:
      throw OverflowError("trajectory of " + to_string(n.value()) + " exceeds 128 bits");
    case WalkStatus::budget_exhausted:
      throw BudgetExhausted("trajectory of " + to_string(n.value()) + " did not reach 1 within " +
                            std::to_string(budget) + " steps");
    case WalkStatus::converged:
      break;
  }
  return {n, w.steps};
}

std::uint64_t Decomposition::exponent_sum() const noexcept {
  std::uint64_t sum = 0;
  for (const auto& t : terms) sum += t.exponent;
  return sum;
}

Decomposition syracuse_decompose(CollatzInt n, std::uint64_t budget) {
  if (!n.is_odd()) throw InvalidArgument("decomposition requires an odd n, got " + to_string(n.value()));
  Decomposition d{n, {}};
  std::uint64_t total = 0;
  u128 b = n.value();
  do {
    const auto lifted = checked_triple_plus_one(b);
    if (!lifted) throw OverflowError("3b+1 overflows 128 bits at b = " + to_string(b));
    const int s = countr_zero(*lifted);
    b = *lifted >> s;
    d.terms.push_back({static_cast<unsigned>(s), b});
    total += static_cast<std::uint64_t>(s) + 1;
    if (total > budget) {
      throw BudgetExhausted("decomposition of " + to_string(n.value()) + " exceeds " +
                            std::to_string(budget) + " steps");
    }
  } while (b != 1);
  return d;
}

}  // namespace collatz
