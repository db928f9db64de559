#ifndef COLLATZ_VERIFY_HPP
#define COLLATZ_VERIFY_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "collatz/core.hpp"
#include "collatz/memo.hpp"

namespace collatz {

inline constexpr std::uint64_t default_chunk_size = std::uint64_t{1} << 16;

unsigned default_workers() noexcept;

struct VerifyConfig {
  u128 start = 1;  // inclusive
  u128 end = 1;    // exclusive
  std::uint64_t step_budget = default_budget;
  unsigned workers = 1;
  Convention convention = Convention::paper;
  const MemoTable* cache = nullptr;  // read-only for the duration of a scan
  std::uint64_t chunk_size = default_chunk_size;
};

struct StepsRecord {
  u128 n;
  std::uint64_t steps;
  friend bool operator==(const StepsRecord&, const StepsRecord&) = default;
};

struct ExcursionRecord {
  u128 n;
  u128 peak;
  friend bool operator==(const ExcursionRecord&, const ExcursionRecord&) = default;
};

struct SeedFailure {
  u128 n;
  std::string reason;  // "overflow" or "budget"
  friend bool operator==(const SeedFailure&, const SeedFailure&) = default;
};

struct IdentityFailure {
  std::string identity;
  std::string witness;
  friend bool operator==(const IdentityFailure&, const IdentityFailure&) = default;
};

/// Result of any scan. Extremal ties go to the smallest seed. Everything
/// except duration_ms is independent of worker count and cache use.
struct VerifyReport {
  std::string kind;
  u128 start = 1;
  u128 end = 1;
  Convention convention = Convention::paper;
  std::uint64_t seeds_checked = 0;
  bool all_converged = true;
  std::vector<SeedFailure> nonconverged;
  std::optional<StepsRecord> max_steps;
  std::optional<ExcursionRecord> max_excursion;
  /// At most one entry per identity: its smallest counterexample.
  std::vector<IdentityFailure> identity_failures;
  std::map<std::string, std::uint64_t> tallies;
  std::int64_t duration_ms = 0;

  [[nodiscard]] bool ok() const noexcept { return all_converged && identity_failures.empty(); }
};

/// Full-range convergence scan with extremal statistics. Per-seed overflow
/// or budget exhaustion is recorded, never thrown. Throws InvalidArgument
/// for a malformed config and ConventionMismatch for a cache built under
/// another convention.
VerifyReport verify_range(const VerifyConfig& cfg);

/// For k in 1..max_k: N(2k-1) = 2 + N(3k-1) and N(8k-3) = 2 + N(2k-1),
/// plus sampled family checks (registry, parametric, general term).
VerifyReport check_step_identities(std::uint64_t max_k, const VerifyConfig& cfg);

/// Registry families, 0 <= n <= max_n: oracle count == unified prediction
/// == per-family stated form.
VerifyReport check_family_identities(unsigned max_n, const VerifyConfig& cfg);

/// D/J/M/K/S, 1 <= k <= max_k, 0 <= n <= max_n: closed form is odd,
/// matches general_term(seed(k), n), 3*term+1 = 2^(2n+p)*coefficient(k),
/// and N(term) = 2n + N(seed(k)).
VerifyReport check_parametric_identities(std::uint64_t max_k, unsigned max_n,
                                         const VerifyConfig& cfg);

/// Odd n <= max_odd, m <= max_m: N(general_term(n, m)) = N(n) + 2m.
VerifyReport check_general_term_identity(std::uint64_t max_odd, unsigned max_m,
                                         const VerifyConfig& cfg);

/// Every odd <= max_odd has exactly one (root, index); roots are exactly the
/// odds with residue 1, 3 or 7 mod 8.
VerifyReport check_partition(std::uint64_t max_odd, unsigned workers = 1);

/// For every odd n <= max_odd: sum(s_i) + k = N(n).
VerifyReport decomposition_consistency(std::uint64_t max_odd, const VerifyConfig& cfg);

/// Stable JSON form. duration_ms is omitted when include_timing is false so
/// reports can be compared byte for byte.
nlohmann::json to_json(const VerifyReport& report, bool include_timing = true);

}  // namespace collatz

#endif  // COLLATZ_VERIFY_HPP
