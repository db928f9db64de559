#include "collatz/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

#include "collatz/families.hpp"

namespace collatz {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_ms(Clock::time_point since) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count();
}

/// Splits [begin, end) into fixed-size chunks, runs `fn(lo, hi)` on up to
/// `workers` threads, and returns the partial results in chunk order.
template <typename Partial>
std::vector<Partial> run_chunks(u128 begin, u128 end, std::uint64_t chunk_size, unsigned workers,
                                const std::function<Partial(u128, u128)>& fn) {
  if (end <= begin) return {};
  const u128 span = end - begin;
  const u128 chunk_count = (span + chunk_size - 1) / chunk_size;
  if (chunk_count > std::numeric_limits<std::size_t>::max() / 2) {
    throw InvalidArgument("range too large to partition");
  }
  const auto chunks = static_cast<std::size_t>(chunk_count);
  std::vector<Partial> results(chunks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&] {
    for (std::size_t i = next.fetch_add(1); i < chunks; i = next.fetch_add(1)) {
      const u128 lo = begin + static_cast<u128>(i) * chunk_size;
      const u128 hi = std::min<u128>(end, lo + chunk_size);
      try {
        results[i] = fn(lo, hi);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(chunks);
      }
    }
  };

  const auto threads = std::min<std::size_t>(std::max(workers, 1u), chunks);
  if (threads <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(drain);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

void validate(const VerifyConfig& cfg) {
  if (cfg.start < 1) throw InvalidArgument("range start must be at least 1");
  if (cfg.end < cfg.start) throw InvalidArgument("range end precedes its start");
  if (cfg.step_budget < 1) throw InvalidArgument("step budget must be at least 1");
  if (cfg.workers < 1) throw InvalidArgument("workers must be at least 1");
  if (cfg.chunk_size < 1) throw InvalidArgument("chunk size must be at least 1");
  if (cfg.cache && cfg.cache->convention() != cfg.convention) {
    throw ConventionMismatch("cache uses the " + std::string(to_string(cfg.cache->convention())) +
                             " convention, scan requested " +
                             std::string(to_string(cfg.convention)));
  }
}

const char* reason(WalkStatus s) {
  return s == WalkStatus::overflow ? "overflow" : "budget";
}

/// Stopping counts from the cache when it covers n, else from a fresh walk.
class StepOracle {
 public:
  explicit StepOracle(const VerifyConfig& cfg) : cfg_(cfg) {}

  struct Result {
    WalkStatus status;
    std::uint64_t steps;
  };

  [[nodiscard]] Result operator()(u128 n) const noexcept {
    if (cfg_.cache) {
      if (const auto hit = cfg_.cache->lookup(n)) {
        if (*hit <= cfg_.step_budget) return {WalkStatus::converged, *hit};
        return {WalkStatus::budget_exhausted, 0};
      }
    }
    const Walk w = walk(n, cfg_.step_budget, cfg_.convention);
    return {w.status, w.steps};
  }

 private:
  const VerifyConfig& cfg_;
};

struct RangePartial {
  std::uint64_t seeds = 0;
  std::vector<SeedFailure> failures;
  std::optional<StepsRecord> max_steps;
  std::optional<ExcursionRecord> max_excursion;
};

/// Walk for verify_range. With a cache, the walk stops at the first value v
/// in [start, seed) known to the cache: the count becomes exact through the
/// cache and the peak is partial. The range maximum of partial peaks, with
/// ties to the smaller seed, equals the maximum of full peaks because v is
/// itself scanned.
Walk scan_seed(u128 seed, const VerifyConfig& cfg) {
  if (!cfg.cache || seed == 1) return walk(seed, cfg.step_budget, cfg.convention);
  const MemoTable& memo = *cfg.cache;
  Walk w;
  w.peak = seed;
  u128 v = seed;
  while (true) {
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
    if (v == 1) break;
    if (v < seed && v >= cfg.start) {
      if (const auto hit = memo.lookup(v)) {
        w.steps += *hit;
        break;
      }
    }
    if (w.steps > cfg.step_budget) break;
  }
  if (w.steps > cfg.step_budget) w.status = WalkStatus::budget_exhausted;
  return w;
}

void merge_steps(std::optional<StepsRecord>& into, const std::optional<StepsRecord>& other) {
  if (other && (!into || other->steps > into->steps)) into = other;
}

void merge_excursion(std::optional<ExcursionRecord>& into,
                     const std::optional<ExcursionRecord>& other) {
  if (other && (!into || other->peak > into->peak)) into = other;
}

struct IdentityTally {
  std::string name;
  std::uint64_t checked = 0;
  std::uint64_t failed = 0;
  std::optional<std::string> first_witness;
};

/// Accumulates per-identity results; witnesses are kept only for the first
/// failure in scan order.
class IdentityLedger {
 public:
  IdentityTally& operator[](const std::string& name) {
    for (auto& t : tallies_) {
      if (t.name == name) return t;
    }
    tallies_.push_back({name, 0, 0, std::nullopt});
    return tallies_.back();
  }

  void record(const std::string& name, bool ok, const std::function<std::string()>& witness) {
    auto& t = (*this)[name];
    ++t.checked;
    if (!ok) {
      ++t.failed;
      if (!t.first_witness) t.first_witness = witness();
    }
  }

  void merge(const IdentityLedger& other) {
    for (const auto& o : other.tallies_) {
      auto& t = (*this)[o.name];
      t.checked += o.checked;
      t.failed += o.failed;
      if (!t.first_witness && o.first_witness) t.first_witness = o.first_witness;
    }
  }

  void write_to(VerifyReport& report) const {
    for (const auto& t : tallies_) {
      report.tallies[t.name + ".checked"] += t.checked;
      report.tallies[t.name + ".failed"] += t.failed;
      if (t.first_witness) report.identity_failures.push_back({t.name, *t.first_witness});
    }
  }

 private:
  std::vector<IdentityTally> tallies_;
};

struct IdentityPartial {
  IdentityLedger ledger;
  std::vector<SeedFailure> failures;
  std::uint64_t seeds = 0;
};

/// Collects non-converged evaluations; returns the count only on success.
std::optional<std::uint64_t> count_or_record(const StepOracle& oracle, u128 n,
                                             std::vector<SeedFailure>& failures) {
  const auto r = oracle(n);
  if (r.status == WalkStatus::converged) return r.steps;
  failures.push_back({n, reason(r.status)});
  return std::nullopt;
}

void finish(VerifyReport& report, std::vector<SeedFailure> failures, Clock::time_point t0) {
  std::sort(failures.begin(), failures.end(),
            [](const SeedFailure& a, const SeedFailure& b) { return a.n < b.n; });
  failures.erase(std::unique(failures.begin(), failures.end()), failures.end());
  report.nonconverged = std::move(failures);
  report.all_converged = report.nonconverged.empty();
  report.duration_ms = elapsed_ms(t0);
}

std::string str(u128 v) { return to_string(v); }

void check_registry(unsigned max_n, const StepOracle& oracle, IdentityLedger& ledger,
                    std::vector<SeedFailure>& failures) {
  for (const auto& spec : registry()) {
    const std::string name = std::string("family-") + spec.name;
    const auto seed_steps = count_or_record(oracle, to_collatz(spec.seed).value(), failures);
    for (unsigned n = 0; n <= max_n; ++n) {
      const BigInt term = family_term(spec, n);
      const auto as_u128 = to_u128(term);
      if (!as_u128) {
        failures.push_back({0, "overflow"});
        continue;
      }
      const auto steps = count_or_record(oracle, *as_u128, failures);
      if (!steps || !seed_steps) continue;
      const std::uint64_t predicted = predicted_steps(spec, n);
      const std::uint64_t stated = theorem_steps(spec, n);
      const bool ok = *steps == predicted && predicted == stated && predicted == *seed_steps + 2 * n;
      ledger.record(name, ok, [&] {
        return "n=" + std::to_string(n) + " term=" + term.str() + " oracle=" +
               std::to_string(*steps) + " predicted=" + std::to_string(predicted) +
               " stated=" + std::to_string(stated);
      });
    }
  }
}

void check_parametric_range(std::uint64_t k_lo, std::uint64_t k_hi, unsigned max_n,
                            const StepOracle& oracle, IdentityLedger& ledger,
                            std::vector<SeedFailure>& failures) {
  for (const auto& fam : parametric_families()) {
    const std::string name = std::string("parametric-") + fam.name;
    for (std::uint64_t k = k_lo; k < k_hi; ++k) {
      const BigInt seed = parametric_seed(fam, k);
      const BigInt coefficient = parametric_coefficient(fam, k);
      const auto seed_steps = count_or_record(oracle, to_collatz(seed).value(), failures);
      for (unsigned n = 0; n <= max_n; ++n) {
        const BigInt term = parametric_term(fam, k, n);
        const bool odd = (term & 1) == 1;
        const bool closed_ok = odd && term == general_term(seed, n) &&
                               3 * term + 1 == (BigInt(1) << (2 * n + fam.parity)) * coefficient &&
                               (n != 0 || term == seed);
        ledger.record(name + ".closed-form", closed_ok, [&] {
          return "k=" + std::to_string(k) + " n=" + std::to_string(n) + " term=" + term.str();
        });
        const auto as_u128 = to_u128(term);
        if (!as_u128) {
          failures.push_back({0, "overflow"});
          continue;
        }
        const auto steps = count_or_record(oracle, *as_u128, failures);
        if (!steps || !seed_steps) continue;
        ledger.record(name + ".steps", *steps == *seed_steps + 2 * n, [&] {
          return "k=" + std::to_string(k) + " n=" + std::to_string(n) + " N(term)=" +
                 std::to_string(*steps) + " N(seed)=" + std::to_string(*seed_steps);
        });
      }
    }
  }
}

void check_general_range(u128 odd_lo, u128 odd_hi, unsigned max_m, const StepOracle& oracle,
                         IdentityLedger& ledger, std::vector<SeedFailure>& failures) {
  for (u128 n = odd_lo | 1; n < odd_hi; n += 2) {
    const auto base = count_or_record(oracle, n, failures);
    const BigInt root = to_bigint(n);
    for (unsigned m = 0; m <= max_m; ++m) {
      const auto term = to_u128(general_term(root, m));
      if (!term) {
        failures.push_back({n, "overflow"});
        continue;
      }
      const auto steps = count_or_record(oracle, *term, failures);
      if (!steps || !base) continue;
      ledger.record("general-term", *steps == *base + 2 * m, [&] {
        return "n=" + str(n) + " m=" + std::to_string(m) + " N(term)=" + std::to_string(*steps) +
               " N(n)=" + std::to_string(*base);
      });
    }
  }
}

VerifyReport identity_report(const char* kind, u128 start, u128 end, const VerifyConfig& cfg) {
  VerifyReport report;
  report.kind = kind;
  report.start = start;
  report.end = end;
  report.convention = cfg.convention;
  return report;
}

template <typename Body>
VerifyReport run_identity_scan(const char* kind, u128 begin, u128 end, const VerifyConfig& cfg,
                               Body body) {
  VerifyConfig checked = cfg;
  checked.start = 1;
  checked.end = std::max<u128>(end, 1);
  validate(checked);
  const auto t0 = Clock::now();
  const StepOracle oracle(cfg);
  auto partials = run_chunks<IdentityPartial>(
      begin, end, cfg.chunk_size, cfg.workers, [&](u128 lo, u128 hi) {
        IdentityPartial p;
        body(lo, hi, oracle, p);
        return p;
      });
  VerifyReport report = identity_report(kind, begin, end, cfg);
  IdentityLedger ledger;
  std::vector<SeedFailure> failures;
  for (auto& p : partials) {
    ledger.merge(p.ledger);
    report.seeds_checked += p.seeds;
    failures.insert(failures.end(), p.failures.begin(), p.failures.end());
  }
  ledger.write_to(report);
  finish(report, std::move(failures), t0);
  return report;
}

}  // namespace

unsigned default_workers() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

VerifyReport verify_range(const VerifyConfig& cfg) {
  validate(cfg);
  const auto t0 = Clock::now();
  auto partials = run_chunks<RangePartial>(
      cfg.start, cfg.end, cfg.chunk_size, cfg.workers, [&cfg](u128 lo, u128 hi) {
        RangePartial p;
        for (u128 n = lo; n < hi; ++n) {
          const Walk w = scan_seed(n, cfg);
          ++p.seeds;
          if (w.status != WalkStatus::converged) {
            p.failures.push_back({n, reason(w.status)});
            continue;
          }
          if (!p.max_steps || w.steps > p.max_steps->steps) p.max_steps = StepsRecord{n, w.steps};
          if (!p.max_excursion || w.peak > p.max_excursion->peak) {
            p.max_excursion = ExcursionRecord{n, w.peak};
          }
        }
        return p;
      });

  VerifyReport report;
  report.kind = "range";
  report.start = cfg.start;
  report.end = cfg.end;
  report.convention = cfg.convention;
  std::vector<SeedFailure> failures;
  for (auto& p : partials) {
    report.seeds_checked += p.seeds;
    merge_steps(report.max_steps, p.max_steps);
    merge_excursion(report.max_excursion, p.max_excursion);
    failures.insert(failures.end(), p.failures.begin(), p.failures.end());
  }
  report.tallies["overflow"] = static_cast<std::uint64_t>(
      std::count_if(failures.begin(), failures.end(), [](auto& f) { return f.reason == "overflow"; }));
  report.tallies["budget"] = failures.size() - report.tallies["overflow"];
  finish(report, std::move(failures), t0);
  return report;
}

VerifyReport check_step_identities(std::uint64_t max_k, const VerifyConfig& cfg) {
  if (max_k < 1) throw InvalidArgument("max_k must be at least 1");
  const auto t0 = Clock::now();
  VerifyReport report = run_identity_scan(
      "identities", 1, static_cast<u128>(max_k) + 1, cfg,
      [](u128 lo, u128 hi, const StepOracle& oracle, IdentityPartial& p) {
        for (u128 k = lo; k < hi; ++k) {
          ++p.seeds;
          const auto odd = count_or_record(oracle, 2 * k - 1, p.failures);
          const auto even = count_or_record(oracle, 3 * k - 1, p.failures);
          const auto lifted = count_or_record(oracle, 8 * k - 3, p.failures);
          if (odd && even) {
            p.ledger.record("N(2k-1)=2+N(3k-1)", *odd == 2 + *even, [&] {
              return "k=" + str(k) + " N(2k-1)=" + std::to_string(*odd) +
                     " N(3k-1)=" + std::to_string(*even);
            });
          }
          if (odd && lifted) {
            p.ledger.record("N(8k-3)=2+N(2k-1)", *lifted == 2 + *odd, [&] {
              return "k=" + str(k) + " N(8k-3)=" + std::to_string(*lifted) +
                     " N(2k-1)=" + std::to_string(*odd);
            });
          }
        }
      });

  // Sampled family checks on top of the sweep.
  const StepOracle oracle(cfg);
  IdentityLedger ledger;
  std::vector<SeedFailure> failures = report.nonconverged;
  check_registry(20, oracle, ledger, failures);
  check_parametric_range(1, std::min<std::uint64_t>(max_k, 1000) + 1, 10, oracle, ledger, failures);
  check_general_range(1, std::min<u128>(2 * static_cast<u128>(max_k), 10'000), 8, oracle, ledger,
                      failures);
  ledger.write_to(report);
  finish(report, std::move(failures), t0);
  return report;
}

VerifyReport check_family_identities(unsigned max_n, const VerifyConfig& cfg) {
  VerifyConfig checked = cfg;
  checked.start = 1;
  checked.end = 2;
  validate(checked);
  const auto t0 = Clock::now();
  VerifyReport report = identity_report("families", 0, static_cast<u128>(max_n) + 1, cfg);
  IdentityLedger ledger;
  std::vector<SeedFailure> failures;
  check_registry(max_n, StepOracle(cfg), ledger, failures);
  report.seeds_checked = registry().size() * (std::uint64_t{max_n} + 1);
  ledger.write_to(report);
  finish(report, std::move(failures), t0);
  return report;
}

VerifyReport check_parametric_identities(std::uint64_t max_k, unsigned max_n,
                                         const VerifyConfig& cfg) {
  if (max_k < 1) throw InvalidArgument("max_k must be at least 1");
  VerifyConfig chunked = cfg;
  chunked.chunk_size = std::min<std::uint64_t>(cfg.chunk_size, 64);
  return run_identity_scan("parametric", 1, static_cast<u128>(max_k) + 1, chunked,
                           [max_n](u128 lo, u128 hi, const StepOracle& oracle, IdentityPartial& p) {
                             p.seeds = static_cast<std::uint64_t>(hi - lo);
                             check_parametric_range(static_cast<std::uint64_t>(lo),
                                                    static_cast<std::uint64_t>(hi), max_n, oracle,
                                                    p.ledger, p.failures);
                           });
}

VerifyReport check_general_term_identity(std::uint64_t max_odd, unsigned max_m,
                                         const VerifyConfig& cfg) {
  if (max_odd < 1) throw InvalidArgument("max_odd must be at least 1");
  VerifyConfig chunked = cfg;
  chunked.chunk_size = std::min<std::uint64_t>(cfg.chunk_size, 1024);
  return run_identity_scan("general-term", 1, static_cast<u128>(max_odd) + 1, chunked,
                           [max_m](u128 lo, u128 hi, const StepOracle& oracle, IdentityPartial& p) {
                             p.seeds = static_cast<std::uint64_t>((hi - (lo | 1) + 1) / 2);
                             check_general_range(lo, hi, max_m, oracle, p.ledger, p.failures);
                           });
}

VerifyReport decomposition_consistency(std::uint64_t max_odd, const VerifyConfig& cfg) {
  if (max_odd < 1) throw InvalidArgument("max_odd must be at least 1");
  return run_identity_scan(
      "decomposition", 1, static_cast<u128>(max_odd) + 1, cfg,
      [&cfg](u128 lo, u128 hi, const StepOracle& oracle, IdentityPartial& p) {
        for (u128 n = lo | 1; n < hi; n += 2) {
          ++p.seeds;
          const auto steps = count_or_record(oracle, n, p.failures);
          if (!steps) continue;
          std::uint64_t total = 0;
          try {
            total = syracuse_decompose(CollatzInt(n), cfg.step_budget).total_steps();
          } catch (const OverflowError&) {
            p.failures.push_back({n, "overflow"});
            continue;
          } catch (const BudgetExhausted&) {
            p.failures.push_back({n, "budget"});
            continue;
          }
          p.ledger.record("sum(s)+k=N(n)", total == *steps, [&] {
            return "n=" + str(n) + " sum(s)+k=" + std::to_string(total) +
                   " N(n)=" + std::to_string(*steps);
          });
        }
      });
}

VerifyReport check_partition(std::uint64_t max_odd, unsigned workers) {
  if (max_odd < 1 || (max_odd & 1) == 0) throw InvalidArgument("max_odd must be an odd positive integer");
  const auto t0 = Clock::now();
  VerifyReport report;
  report.kind = "partition";
  report.start = 1;
  report.end = static_cast<u128>(max_odd) + 1;

  // Forward route: enumerate each root's orbit r, 4r+1, 16r+5, ... and count
  // how often every odd is hit. Index (o-1)/2 holds odd o.
  const std::size_t odds = static_cast<std::size_t>(max_odd / 2 + 1);
  std::vector<std::uint8_t> cover(odds, 0);
  std::vector<std::uint64_t> forward_root(odds, 0);
  std::vector<std::uint32_t> forward_index(odds, 0);
  std::map<std::string, std::uint64_t> residues;
  for (std::uint64_t r = 1; r <= max_odd; r += 2) {
    if (r % 8 == 5) continue;
    ++residues["roots.mod8=" + std::to_string(r % 8)];
    std::uint32_t m = 0;
    for (u128 o = r; o <= max_odd; o = 4 * o + 1, ++m) {
      const auto idx = static_cast<std::size_t>((o - 1) / 2);
      if (cover[idx] < 255) ++cover[idx];
      forward_root[idx] = r;
      forward_index[idx] = m;
    }
  }

  // Inverse route through family_root, checked against the forward route.
  VerifyConfig cfg;
  cfg.workers = std::max(workers, 1u);
  auto partials = run_chunks<IdentityPartial>(
      0, odds, default_chunk_size, cfg.workers, [&](u128 lo, u128 hi) {
        IdentityPartial p;
        for (auto i = static_cast<std::size_t>(lo); i < hi; ++i) {
          const std::uint64_t o = 2 * i + 1;
          ++p.seeds;
          const FamilyRoot fr = family_root(BigInt(o));
          const bool root_ok = fr.root >= 1 && is_family_root(fr.root) &&
                               general_term(fr.root, fr.index) == BigInt(o);
          p.ledger.record("root-valid", root_ok, [&] { return "o=" + std::to_string(o); });
          p.ledger.record("unique-cover", cover[i] == 1, [&] {
            return "o=" + std::to_string(o) + " covered " + std::to_string(cover[i]) + " times";
          });
          p.ledger.record("inverse=forward",
                          fr.root == forward_root[i] && fr.index == forward_index[i], [&] {
                            return "o=" + std::to_string(o) + " root=" + fr.root.str() +
                                   " forward root=" + std::to_string(forward_root[i]);
                          });
          const bool self_root = fr.index == 0;
          p.ledger.record("roots=odd-not-5-mod-8", self_root == (o % 8 != 5),
                          [&] { return "o=" + std::to_string(o); });
        }
        return p;
      });
  IdentityLedger ledger;
  for (auto& p : partials) {
    ledger.merge(p.ledger);
    report.seeds_checked += p.seeds;
  }
  ledger.write_to(report);
  for (auto& [k, v] : residues) report.tallies[k] = v;
  finish(report, {}, t0);
  return report;
}

nlohmann::json to_json(const VerifyReport& report, bool include_timing) {
  using nlohmann::json;
  json out;
  out["kind"] = report.kind;
  out["range"] = {{"start", to_string(report.start)}, {"end", to_string(report.end)}};
  out["convention"] = std::string(to_string(report.convention));
  out["seeds_checked"] = report.seeds_checked;
  out["all_converged"] = report.all_converged;
  json nonconverged = json::array();
  for (const auto& f : report.nonconverged) {
    nonconverged.push_back({{"n", to_string(f.n)}, {"reason", f.reason}});
  }
  out["nonconverged"] = std::move(nonconverged);
  out["max_steps"] = report.max_steps
                         ? json{{"n", to_string(report.max_steps->n)}, {"steps", report.max_steps->steps}}
                         : json(nullptr);
  out["max_excursion"] = report.max_excursion
                             ? json{{"n", to_string(report.max_excursion->n)},
                                    {"peak", to_string(report.max_excursion->peak)}}
                             : json(nullptr);
  json failures = json::array();
  for (const auto& f : report.identity_failures) {
    failures.push_back({{"identity", f.identity}, {"witness", f.witness}});
  }
  out["identity_failures"] = std::move(failures);
  out["tallies"] = report.tallies;
  if (include_timing) out["duration_ms"] = report.duration_ms;
  return out;
}

}  // namespace collatz
