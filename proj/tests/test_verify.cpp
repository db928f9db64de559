#include <doctest.h>

#include "collatz/families.hpp"
#include "collatz/verify.hpp"
#include "oracle.hpp"

using namespace collatz;

namespace {
VerifyConfig range(u128 start, u128 end, unsigned workers = 1) {
  VerifyConfig cfg;
  cfg.start = start;
  cfg.end = end;
  cfg.workers = workers;
  cfg.step_budget = 10000;
  return cfg;
}
}  // namespace

TEST_CASE("verify_range small ranges") {
  SUBCASE("[1,10]") {
    const VerifyReport r = verify_range(range(1, 11));
    CHECK(r.all_converged);
    CHECK(r.seeds_checked == 10);
    REQUIRE(r.max_steps);
    CHECK(r.max_steps->n == 9);
    CHECK(r.max_steps->steps == 19);
  }
  SUBCASE("[27,28)") {
    const VerifyReport r = verify_range(range(27, 28));
    REQUIRE(r.max_excursion);
    CHECK(r.max_excursion->n == 27);
    CHECK(r.max_excursion->peak == 9232);
  }
  SUBCASE("empty range") {
    const VerifyReport r = verify_range(range(5, 5));
    CHECK(r.seeds_checked == 0);
    CHECK(r.all_converged);
    CHECK_FALSE(r.max_steps);
  }
}

TEST_CASE("verify_range extremes match a brute-force scan") {
  const u128 start = 300, end = 6000;
  std::uint64_t best_steps = 0;
  u128 best_steps_n = 0;
  oracle::Big best_peak = 0;
  u128 best_peak_n = 0;
  for (u128 n = start; n < end; ++n) {
    const oracle::Big b(static_cast<std::uint64_t>(n));
    const auto s = oracle::steps(b);
    const auto p = oracle::peak(b);
    if (s > best_steps) best_steps = s, best_steps_n = n;
    if (p > best_peak) best_peak = p, best_peak_n = n;
  }
  const MemoTable memo = build_memo(10000, Convention::paper);
  for (const MemoTable* cache : {static_cast<const MemoTable*>(nullptr), &memo}) {
    for (unsigned workers : {1u, 3u}) {
      VerifyConfig cfg = range(start, end, workers);
      cfg.chunk_size = 97;
      cfg.cache = cache;
      const VerifyReport r = verify_range(cfg);
      CHECK(r.max_steps->n == best_steps_n);
      CHECK(r.max_steps->steps == best_steps);
      CHECK(r.max_excursion->n == best_peak_n);
      CHECK(to_bigint(r.max_excursion->peak) == best_peak);
    }
  }
}

TEST_CASE("report is independent of workers and cache") {
  const MemoTable memo = build_memo(300000, Convention::paper);
  VerifyConfig base = range(1, 200000);
  base.chunk_size = 4096;
  const auto reference = to_json(verify_range(base), false).dump();
  for (unsigned workers : {2u, 4u, 7u}) {
    VerifyConfig cfg = base;
    cfg.workers = workers;
    CHECK(to_json(verify_range(cfg), false).dump() == reference);
    cfg.cache = &memo;
    CHECK(to_json(verify_range(cfg), false).dump() == reference);
  }
}

TEST_CASE("ties go to the smaller seed") {
  // 12 and 13 both take 9 steps.
  CHECK(stopping_count(CollatzInt(12)).count == stopping_count(CollatzInt(13)).count);
  VerifyConfig cfg = range(12, 14, 2);
  cfg.chunk_size = 1;
  const VerifyReport r = verify_range(cfg);
  CHECK(r.max_steps->n == 12);
}

TEST_CASE("per-seed overflow is recorded") {
  const u128 big = (u128{1} << 120) - 1;
  const VerifyReport r = verify_range(range(big - 4, big + 1));
  CHECK(r.seeds_checked == 5);
  CHECK_FALSE(r.all_converged);
  bool found = false;
  for (const auto& f : r.nonconverged) {
    if (f.n == big) {
      found = true;
      CHECK(f.reason == "overflow");
    }
  }
  CHECK(found);
  CHECK(r.tallies.at("overflow") >= 1);
}

TEST_CASE("budget exhaustion is recorded") {
  VerifyConfig cfg = range(25, 30);
  cfg.step_budget = 50;
  const VerifyReport r = verify_range(cfg);
  REQUIRE(r.nonconverged.size() == 1);  // only 27 needs more than 50 steps
  CHECK(r.nonconverged.front().n == 27);
  CHECK(r.nonconverged.front().reason == "budget");
}

TEST_CASE("invalid configs") {
  CHECK_THROWS_AS(verify_range(range(0, 5)), InvalidArgument);
  CHECK_THROWS_AS(verify_range(range(5, 4)), InvalidArgument);
  VerifyConfig cfg = range(1, 5);
  cfg.workers = 0;
  CHECK_THROWS_AS(verify_range(cfg), InvalidArgument);
  const MemoTable memo = build_memo(10, Convention::standard);
  cfg = range(1, 5);
  cfg.cache = &memo;
  CHECK_THROWS_AS(verify_range(cfg), ConventionMismatch);
}

TEST_CASE("check_step_identities") {
  VerifyConfig cfg;
  cfg.workers = 2;
  const VerifyReport r = check_step_identities(2000, cfg);
  CHECK(r.ok());
  CHECK(r.identity_failures.empty());
  CHECK(r.tallies.at("N(2k-1)=2+N(3k-1).checked") == 2000);
  CHECK(r.tallies.at("N(8k-3)=2+N(2k-1).checked") == 2000);
  CHECK(r.tallies.at("family-a.checked") == 21);
  CHECK(r.tallies.at("parametric-D.steps.checked") == 1000 * 11);
  CHECK(r.tallies.at("general-term.checked") == 2000 * 9);

  SUBCASE("standard convention breaks the k = 1 case") {
    cfg.convention = Convention::standard;
    const VerifyReport s = check_step_identities(10, cfg);
    REQUIRE_FALSE(s.identity_failures.empty());
    CHECK(s.identity_failures.front().identity == "N(2k-1)=2+N(3k-1)");
    CHECK(s.identity_failures.front().witness.rfind("k=1 ", 0) == 0);
  }
}

TEST_CASE("check_family_identities and parametric") {
  VerifyConfig cfg;
  CHECK(check_family_identities(20, cfg).ok());
  const VerifyReport p = check_parametric_identities(50, 10, cfg);
  CHECK(p.ok());
  CHECK(p.tallies.at("parametric-S.closed-form.checked") == 50 * 11);
}

TEST_CASE("check_general_term_identity") {
  VerifyConfig cfg;
  cfg.workers = 3;
  const VerifyReport r = check_general_term_identity(999, 8, cfg);
  CHECK(r.ok());
  CHECK(r.seeds_checked == 500);
  CHECK(r.tallies.at("general-term.checked") == 500 * 9);
}

TEST_CASE("check_partition") {
  const VerifyReport r = check_partition(85);
  CHECK(r.ok());
  CHECK(r.seeds_checked == 43);
  CHECK(r.tallies.at("roots.mod8=1") + r.tallies.at("roots.mod8=3") + r.tallies.at("roots.mod8=7") ==
        43 - 11);  // 11 odds in 1..85 are 5 mod 8

  const VerifyReport one = check_partition(1);
  CHECK(one.ok());
  CHECK(one.seeds_checked == 1);
  CHECK(one.tallies.at("roots.mod8=1") == 1);

  CHECK(check_partition(100001, 2).ok());
  CHECK_THROWS_AS(check_partition(10), InvalidArgument);
}

TEST_CASE("decomposition_consistency") {
  VerifyConfig cfg;
  const VerifyReport r = decomposition_consistency(20001, cfg);
  CHECK(r.ok());
  CHECK(r.seeds_checked == 10001);
  const VerifyReport one = decomposition_consistency(1, cfg);
  CHECK(one.seeds_checked == 1);
  CHECK(one.ok());
}

TEST_CASE("json report schema") {
  const auto j = to_json(verify_range(range(1, 11)));
  for (const char* key : {"kind", "range", "convention", "seeds_checked", "all_converged",
                          "nonconverged", "max_steps", "max_excursion", "identity_failures",
                          "tallies", "duration_ms"}) {
    CHECK(j.contains(key));
  }
  CHECK(j["range"]["start"] == "1");
  CHECK(j["max_steps"]["n"] == "9");
  CHECK(j["max_steps"]["steps"] == 19);
  CHECK_FALSE(to_json(verify_range(range(1, 11)), false).contains("duration_ms"));
}
