#ifndef COLLATZ_UINT128_HPP
#define COLLATZ_UINT128_HPP

#include <bit>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

namespace collatz {

__extension__ typedef unsigned __int128 u128;

inline constexpr u128 u128_max = ~static_cast<u128>(0);

/// Number of trailing zero bits; v must be nonzero.
[[nodiscard]] constexpr int countr_zero(u128 v) noexcept {
  const auto lo = static_cast<std::uint64_t>(v);
  if (lo != 0) return std::countr_zero(lo);
  return 64 + std::countr_zero(static_cast<std::uint64_t>(v >> 64));
}

/// 3v+1, or nullopt when the result does not fit in 128 bits.
[[nodiscard]] constexpr std::optional<u128> checked_triple_plus_one(u128 v) noexcept {
  if (v > (u128_max - 1) / 3) return std::nullopt;
  return 3 * v + 1;
}

[[nodiscard]] constexpr std::optional<u128> checked_mul(u128 a, u128 b) noexcept {
  u128 r{};
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

[[nodiscard]] constexpr std::optional<u128> checked_add(u128 a, u128 b) noexcept {
  u128 r{};
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

/// c * 2^e, or nullopt on overflow.
[[nodiscard]] constexpr std::optional<u128> checked_shl(u128 c, unsigned e) noexcept {
  if (c == 0 || e == 0) return c;
  if (e >= 128 || (c >> (128 - e)) != 0) return std::nullopt;
  return c << e;
}

std::string to_string(u128 v);

/// Parses a decimal string. Rejects signs, whitespace, empty input and
/// anything above 2^128-1.
std::optional<u128> parse_u128(std::string_view text) noexcept;

}  // namespace collatz

#endif  // COLLATZ_UINT128_HPP
