#include "collatz/uint128.hpp"

#include <algorithm>

namespace collatz {

std::string to_string(u128 v) {
  if (v == 0) return "0";
  std::string out;
  while (v != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::optional<u128> parse_u128(std::string_view text) noexcept {
  if (text.empty()) return std::nullopt;
  u128 v = 0;
  for (char ch : text) {
    if (ch < '0' || ch > '9') return std::nullopt;
    const auto times_ten = checked_mul(v, 10);
    if (!times_ten) return std::nullopt;
    const auto next = checked_add(*times_ten, static_cast<u128>(ch - '0'));
    if (!next) return std::nullopt;
    v = *next;
  }
  return v;
}

}  // namespace collatz
