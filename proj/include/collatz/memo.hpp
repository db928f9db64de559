#ifndef COLLATZ_MEMO_HPP
#define COLLATZ_MEMO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "collatz/core.hpp"

namespace collatz {

/// Dense table of stopping counts for n = 1..limit.
///
/// On-disk layout (all integers little-endian):
///   0..3   magic "CZMT"
///   4..5   version, u16 = 1
///   6      convention, 0 = paper, 1 = standard
///   7      reserved, 0
///   8..15  limit, u64
///   16..   limit x u32 counts for n = 1..limit; 0xFFFFFFFF marks unknown
class MemoTable {
 public:
  static constexpr std::uint32_t sentinel = 0xFFFF'FFFFu;
  static constexpr std::uint16_t format_version = 1;

  MemoTable(Convention convention, std::vector<std::uint32_t> counts);

  [[nodiscard]] std::uint64_t limit() const noexcept { return counts_.size(); }
  [[nodiscard]] Convention convention() const noexcept { return convention_; }

  /// Count for n, or nullopt if n is outside 1..limit or marked unknown.
  [[nodiscard]] std::optional<std::uint32_t> lookup(u128 n) const noexcept {
    if (n == 0 || n > counts_.size()) return std::nullopt;
    const std::uint32_t c = counts_[static_cast<std::size_t>(n - 1)];
    if (c == sentinel) return std::nullopt;
    return c;
  }

  /// Raw entries, index 0 holds n = 1.
  [[nodiscard]] std::span<const std::uint32_t> counts() const noexcept { return counts_; }

  friend bool operator==(const MemoTable&, const MemoTable&) = default;

 private:
  Convention convention_;
  std::vector<std::uint32_t> counts_;
};

/// Ascending fill: each n follows its trajectory until it drops below n and
/// reuses the stored count there. Entries whose count exceeds `budget` or
/// whose walk overflows become the sentinel.
MemoTable build_memo(std::uint64_t limit, Convention convention,
                     std::uint64_t budget = default_budget);

void save_memo(const MemoTable& table, std::ostream& out);
void save_memo(const MemoTable& table, const std::filesystem::path& path);

/// Throws FormatError on a malformed stream and ConventionMismatch when
/// `required` differs from the stored convention.
MemoTable load_memo(std::istream& in, std::optional<Convention> required = std::nullopt);
MemoTable load_memo(const std::filesystem::path& path,
                    std::optional<Convention> required = std::nullopt);

}  // namespace collatz

#endif  // COLLATZ_MEMO_HPP
