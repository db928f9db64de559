#include "collatz/families.hpp"

#include <algorithm>
#include <array>

namespace collatz {

namespace {

BigInt pow2(unsigned e) { return BigInt(1) << e; }

unsigned mod8(const BigInt& v) { return static_cast<unsigned>(v & 7); }

void require_odd_positive(const BigInt& v, const char* what) {
  if (v < 1 || (v & 1) == 0) {
    throw InvalidArgument(std::string(what) + " must be an odd positive integer, got " + v.str());
  }
}

/// (x - 1) / 3 with the divisibility checked.
BigInt exact_third_of_pred(const BigInt& x) {
  if (x % 3 != 1) throw InvalidArgument(x.str() + " - 1 is not divisible by 3");
  return (x - 1) / 3;
}

FamilySpec make_spec(char name, unsigned coefficient, unsigned parity, bool includes_base,
                     unsigned offset) {
  FamilySpec spec;
  spec.name = name;
  spec.coefficient = coefficient;
  spec.parity = parity;
  spec.seed = exact_third_of_pred(spec.coefficient * pow2(parity));
  spec.base_steps = stopping_count(to_collatz(spec.coefficient)).count;
  spec.theorem_includes_base = includes_base;
  spec.theorem_offset = offset;
  return spec;
}

constexpr std::array<ParametricFamily, 5> kParametric{{
    {'D', 3, -1, 1, 2, -1},
    {'J', 3, 2, 1, 2, 1},
    {'M', 6, -1, 1, 4, -1},
    {'K', 12, -1, 1, 8, -1},
    {'S', 3, 1, 2, 4, 1},
}};

BigInt affine(std::int64_t scale, std::int64_t shift, std::uint64_t k) {
  if (k == 0) throw InvalidArgument("parametric families are indexed from k = 1");
  return BigInt(scale) * k + shift;
}

}  // namespace

BigInt to_bigint(u128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) | BigInt(static_cast<std::uint64_t>(v));
}

std::optional<u128> to_u128(const BigInt& v) {
  if (v < 0) return std::nullopt;
  if (v == 0) return u128{0};
  if (boost::multiprecision::msb(v) >= 128) return std::nullopt;
  const auto lo = static_cast<std::uint64_t>(v & BigInt(~std::uint64_t{0}));
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  return (static_cast<u128>(hi) << 64) | lo;
}

CollatzInt to_collatz(const BigInt& v) {
  if (v < 1) throw InvalidArgument("Collatz values must be positive, got " + v.str());
  const auto narrow = to_u128(v);
  if (!narrow) throw OverflowError(v.str() + " does not fit in 128 bits");
  return CollatzInt(*narrow);
}

const std::vector<FamilySpec>& registry() {
  static const std::vector<FamilySpec> families{
      make_spec('a', 1, 2, false, 3),  make_spec('b', 5, 1, true, 2),
      make_spec('c', 13, 2, true, 3),  make_spec('d', 17, 1, true, 2),
      make_spec('e', 11, 1, true, 2),  make_spec('f', 7, 2, true, 3),
      make_spec('g', 29, 1, true, 2),
  };
  return families;
}

const FamilySpec& family(char name) {
  for (const auto& spec : registry()) {
    if (spec.name == name) return spec;
  }
  throw InvalidArgument(std::string("unknown family '") + name + "' (expected a..g)");
}

FamilySpec family_of_root(const BigInt& root) {
  require_odd_positive(root, "family root");
  if (!is_family_root(root)) {
    throw InvalidArgument(root.str() + " = 5 (mod 8) is not a family root");
  }
  const BigInt lifted = 3 * root + 1;
  const auto parity = static_cast<unsigned>(boost::multiprecision::lsb(lifted));
  FamilySpec spec;
  spec.coefficient = lifted >> parity;
  spec.parity = parity;
  spec.seed = root;
  spec.base_steps = stopping_count(to_collatz(spec.coefficient)).count;
  spec.theorem_includes_base = spec.coefficient != 1;
  spec.theorem_offset = parity + 1;
  return spec;
}

BigInt family_term(const FamilySpec& spec, unsigned n) {
  return exact_third_of_pred(spec.coefficient * pow2(2 * n + spec.parity));
}

std::vector<BigInt> family_from_recurrence(const FamilySpec& spec, std::size_t count) {
  if (count == 0) throw InvalidArgument("count must be at least 1");
  std::vector<BigInt> terms;
  terms.reserve(count);
  terms.push_back(spec.seed);
  for (unsigned n = 1; n < count; ++n) {
    terms.push_back(terms.back() + spec.coefficient * pow2(2 * n + spec.parity - 2));
  }
  return terms;
}

std::uint64_t predicted_steps(const FamilySpec& spec, unsigned n) {
  const std::uint64_t tail = spec.coefficient == 1 ? 0 : spec.base_steps;
  return 2 * std::uint64_t{n} + spec.parity + 1 + tail;
}

std::uint64_t theorem_steps(const FamilySpec& spec, unsigned n) {
  return (spec.theorem_includes_base ? spec.base_steps : 0) + 2 * std::uint64_t{n} +
         spec.theorem_offset;
}

BigInt general_term(const BigInt& n, unsigned m) {
  require_odd_positive(n, "general_term root");
  return exact_third_of_pred((3 * n + 1) * pow2(2 * m));
}

std::span<const ParametricFamily> parametric_families() { return kParametric; }

const ParametricFamily& parametric_family(char name) {
  for (const auto& fam : kParametric) {
    if (fam.name == name) return fam;
  }
  throw InvalidArgument(std::string("unknown parametric family '") + name +
                        "' (expected D, J, M, K or S)");
}

BigInt parametric_coefficient(const ParametricFamily& fam, std::uint64_t k) {
  return affine(fam.coefficient_scale, fam.coefficient_shift, k);
}

BigInt parametric_seed(const ParametricFamily& fam, std::uint64_t k) {
  return affine(fam.seed_scale, fam.seed_shift, k);
}

BigInt parametric_term(const ParametricFamily& fam, std::uint64_t k, unsigned n) {
  return exact_third_of_pred(pow2(2 * n + fam.parity) * parametric_coefficient(fam, k));
}

SeedSearchResult seed_search(const FamilySpec& spec, std::size_t depth,
                             std::span<const BigInt> excluded) {
  if (depth == 0) throw InvalidArgument("seed search depth must be at least 1");
  const BigInt own_root = family_root(spec.seed).root;
  std::optional<SeedSearchResult> best;
  for (unsigned n = 0; n < depth; ++n) {
    const BigInt term = family_term(spec, n);
    for (unsigned e : {1u, 2u}) {
      BigInt beta = term * pow2(e);
      if (beta % 3 != 1) continue;
      if (best && beta >= best->beta) continue;
      BigInt next = (beta - 1) / 3;
      const BigInt next_root = family_root(next).root;
      if (next_root == own_root) continue;
      if (std::find(excluded.begin(), excluded.end(), next_root) != excluded.end()) continue;
      best = SeedSearchResult{std::move(beta), std::move(next), term, e, own_root};
    }
  }
  if (!best) {
    throw NotFound("no beta = 1 (mod 3) among the first " + std::to_string(depth) +
                   " terms of the family of " + spec.seed.str());
  }
  return *best;
}

std::vector<SeedSearchResult> seed_chain(const BigInt& start_root, std::size_t stages,
                                         std::size_t depth) {
  std::vector<BigInt> found{start_root};
  std::vector<FamilySpec> families{family_of_root(start_root)};
  std::vector<SeedSearchResult> chain;
  for (std::size_t stage = 0; stage < stages; ++stage) {
    std::optional<SeedSearchResult> best;
    for (const auto& spec : families) {
      try {
        auto candidate = seed_search(spec, depth, found);
        if (!best || candidate.beta < best->beta) best = std::move(candidate);
      } catch (const NotFound&) {
      }
    }
    if (!best) {
      throw NotFound("seed chain stalled at stage " + std::to_string(stage + 1) +
                     " with depth " + std::to_string(depth));
    }
    const BigInt root = family_root(best->next_seed).root;
    found.push_back(root);
    families.push_back(family_of_root(root));
    chain.push_back(std::move(*best));
  }
  return chain;
}

SeedWitness seed_witness(std::uint64_t k, WitnessCase which) {
  if (k == 0) throw InvalidArgument("seed witnesses are indexed from k = 1");
  SeedWitness w{k, which, {}, {}, {}};
  if (which == WitnessCase::I) {
    w.alpha = 3 * BigInt(k) - 1;
    w.beta = 2 * w.alpha;
  } else {
    w.alpha = 3 * BigInt(k) + 1;
    w.beta = 4 * w.alpha;
  }
  w.seed = exact_third_of_pred(w.beta);
  return w;
}

bool is_family_root(const BigInt& odd) {
  const unsigned r = mod8(odd);
  return r == 1 || r == 3 || r == 7;
}

FamilyRoot family_root(const BigInt& odd) {
  require_odd_positive(odd, "family_root input");
  FamilyRoot result{odd, odd, 0};
  while (mod8(result.root) == 5) {
    result.root = (result.root - 1) / 4;
    ++result.index;
  }
  return result;
}

}  // namespace collatz
