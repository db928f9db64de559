#include "collatz/memo.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace collatz {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'Z', 'M', 'T'};
constexpr std::size_t kHeaderSize = 16;

template <typename T>
void put_le(char* dst, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    dst[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
}

template <typename T>
T get_le(const char* src) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    v |= static_cast<T>(static_cast<unsigned char>(src[i])) << (8 * i);
  }
  return v;
}

}  // namespace

MemoTable::MemoTable(Convention convention, std::vector<std::uint32_t> counts)
    : convention_(convention), counts_(std::move(counts)) {}

MemoTable build_memo(std::uint64_t limit, Convention convention, std::uint64_t budget) {
  if (limit < 2) throw InvalidArgument("memo limit must be at least 2");
  std::vector<std::uint32_t> counts(limit, MemoTable::sentinel);

  const std::uint64_t one = convention == Convention::paper ? 3 : 0;
  if (one <= budget) counts[0] = static_cast<std::uint32_t>(one);

  const std::uint64_t cap = std::min<std::uint64_t>(budget, MemoTable::sentinel - 1);
  for (std::uint64_t n = 2; n <= limit; ++n) {
    u128 v = n;
    std::uint64_t steps = 0;
    std::uint32_t result = MemoTable::sentinel;
    while (true) {
      if (v & 1) {
        const auto next = checked_triple_plus_one(v);
        if (!next) break;
        v = *next;
        ++steps;
      } else {
        const int tz = countr_zero(v);
        v >>= tz;
        steps += static_cast<std::uint64_t>(tz);
      }
      if (v == 1) {
        if (steps <= cap) result = static_cast<std::uint32_t>(steps);
        break;
      }
      if (v < n) {
        const std::uint32_t tail = counts[static_cast<std::size_t>(v - 1)];
        if (tail != MemoTable::sentinel && steps + tail <= cap) {
          result = static_cast<std::uint32_t>(steps + tail);
        }
        break;
      }
      if (steps > cap) break;
    }
    counts[n - 1] = result;
  }
  return MemoTable(convention, std::move(counts));
}

void save_memo(const MemoTable& table, std::ostream& out) {
  std::array<char, kHeaderSize> header{};
  std::memcpy(header.data(), kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(header.data() + 4, MemoTable::format_version);
  header[6] = static_cast<char>(table.convention());
  header[7] = 0;
  put_le<std::uint64_t>(header.data() + 8, table.limit());
  out.write(header.data(), header.size());

  const auto counts = table.counts();
  if constexpr (std::endian::native == std::endian::little) {
    out.write(reinterpret_cast<const char*>(counts.data()),
              static_cast<std::streamsize>(counts.size_bytes()));
  } else {
    std::array<char, 4> buf{};
    for (std::uint32_t c : counts) {
      put_le(buf.data(), c);
      out.write(buf.data(), buf.size());
    }
  }
  if (!out) throw Error("failed to write memo table");
}

void save_memo(const MemoTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  save_memo(table, out);
}

MemoTable load_memo(std::istream& in, std::optional<Convention> required) {
  std::array<char, kHeaderSize> header{};
  if (!in.read(header.data(), header.size())) throw FormatError("memo file shorter than its header");
  if (!std::equal(kMagic.begin(), kMagic.end(), header.begin())) {
    throw FormatError("bad memo magic (expected CZMT)");
  }
  const auto version = get_le<std::uint16_t>(header.data() + 4);
  if (version != MemoTable::format_version) {
    throw FormatError("unsupported memo version " + std::to_string(version));
  }
  const auto convention_byte = static_cast<unsigned char>(header[6]);
  if (convention_byte > 1) throw FormatError("bad convention byte " + std::to_string(convention_byte));
  if (header[7] != 0) throw FormatError("reserved header byte is not zero");
  const auto convention = static_cast<Convention>(convention_byte);
  if (required && *required != convention) {
    throw ConventionMismatch("memo table uses the " + std::string(to_string(convention)) +
                             " convention, " + std::string(to_string(*required)) + " requested");
  }
  const auto limit = get_le<std::uint64_t>(header.data() + 8);

  // Read in bounded blocks so a corrupt limit cannot trigger a huge allocation.
  constexpr std::uint64_t block = 1u << 20;
  std::vector<std::uint32_t> counts;
  std::vector<char> buf;
  for (std::uint64_t done = 0; done < limit;) {
    const std::uint64_t take = std::min(block, limit - done);
    buf.resize(static_cast<std::size_t>(take * 4));
    if (!in.read(buf.data(), static_cast<std::streamsize>(buf.size()))) {
      throw FormatError("memo payload truncated after " + std::to_string(done) + " of " +
                        std::to_string(limit) + " entries");
    }
    for (std::size_t i = 0; i < take; ++i) counts.push_back(get_le<std::uint32_t>(buf.data() + 4 * i));
    done += take;
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after memo payload");
  return MemoTable(convention, std::move(counts));
}

MemoTable load_memo(const std::filesystem::path& path, std::optional<Convention> required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open memo file " + path.string());
  return load_memo(in, required);
}

}  // namespace collatz
