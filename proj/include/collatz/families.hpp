#ifndef COLLATZ_FAMILIES_HPP
#define COLLATZ_FAMILIES_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "collatz/core.hpp"

namespace collatz {

using BigInt = boost::multiprecision::cpp_int;

BigInt to_bigint(u128 v);
/// nullopt when v is negative or needs more than 128 bits.
std::optional<u128> to_u128(const BigInt& v);
/// Narrowing for the step kernel; throws OverflowError (or InvalidArgument for v < 1).
CollatzInt to_collatz(const BigInt& v);

/// One family of odd numbers sharing a step-count offset.
///
/// Terms satisfy 3*term(n) + 1 = c * 2^(2n+p), so every term reaches the
/// odd value c after 2n+p+1 steps.
struct FamilySpec {
  char name = '?';
  BigInt coefficient;  // c: odd, not divisible by 3
  unsigned parity = 1;  // p in {1, 2}
  BigInt seed;  // term(0) = (c*2^p - 1)/3
  std::uint64_t base_steps = 0;  // stopping count of c, paper convention

  // Step formula as stated per family: [N_c] + 2n + theorem_offset, with the
  // N_c term absent when the chain ends at c = 1.
  bool theorem_includes_base = true;
  unsigned theorem_offset = 0;
};

/// The seven families a..g. Base step counts are computed on first use.
const std::vector<FamilySpec>& registry();
/// Throws InvalidArgument for names outside a..g.
const FamilySpec& family(char name);

/// Family rooted at an odd root r (r mod 8 in {1,3,7}); p is the 2-adic
/// valuation of 3r+1.
FamilySpec family_of_root(const BigInt& root);

BigInt family_term(const FamilySpec& spec, unsigned n);
/// Builds terms 0..count-1 by adding c * 2^(2n+p-2) to the previous term.
std::vector<BigInt> family_from_recurrence(const FamilySpec& spec, std::size_t count);
/// Unified form 2n + p + 1 + N_c, with N_c dropped when c = 1.
std::uint64_t predicted_steps(const FamilySpec& spec, unsigned n);
/// The per-family stated form (e.g. N_13 + 2n + 3 for family c).
std::uint64_t theorem_steps(const FamilySpec& spec, unsigned n);

/// ((3n+1) * 4^m - 1) / 3 for odd n. general_term(n, 0) == n.
BigInt general_term(const BigInt& n, unsigned m);

/// One-parameter family: coefficient(k) = a*k + b, seed(k) = c*k + d,
/// term(k, n) = (2^(2n+p) * coefficient(k) - 1) / 3.
struct ParametricFamily {
  char name;
  std::int64_t coefficient_scale;
  std::int64_t coefficient_shift;
  unsigned parity;
  std::int64_t seed_scale;
  std::int64_t seed_shift;
};

/// D, J, M, K, S in that order.
std::span<const ParametricFamily> parametric_families();
const ParametricFamily& parametric_family(char name);

BigInt parametric_coefficient(const ParametricFamily& fam, std::uint64_t k);
BigInt parametric_seed(const ParametricFamily& fam, std::uint64_t k);
BigInt parametric_term(const ParametricFamily& fam, std::uint64_t k, unsigned n);

struct SeedSearchResult {
  BigInt beta;         // source_term * 2^exponent, congruent to 1 mod 3
  BigInt next_seed;    // (beta - 1) / 3
  BigInt source_term;
  unsigned exponent;   // 1 or 2
  BigInt source_root;  // root of the family the source term belongs to
};

/// Least beta = t * 2^e (e in {1,2}) over the first `depth` terms t of the
/// family with beta = 1 mod 3. Candidates whose successor falls back into
/// the searched family, or whose successor's root is listed in `excluded`,
/// are skipped. Throws NotFound if the window has no candidate.
SeedSearchResult seed_search(const FamilySpec& spec, std::size_t depth,
                             std::span<const BigInt> excluded = {});

/// Repeats the seed search `stages` times, starting from the family rooted
/// at `start_root`. Each stage takes the least beta over every family found
/// so far and skips successors already found.
std::vector<SeedSearchResult> seed_chain(const BigInt& start_root, std::size_t stages,
                                         std::size_t depth);

enum class WitnessCase : std::uint8_t { I, IIb };

struct SeedWitness {
  std::uint64_t k;
  WitnessCase which;
  BigInt alpha;
  BigInt beta;
  BigInt seed;  // (beta - 1) / 3
};

/// Case I: alpha = 3k-1, beta = 2*alpha, seed = 2k-1.
/// Case IIb: alpha = 3k+1, beta = 4*alpha, seed = 4k+1.
SeedWitness seed_witness(std::uint64_t k, WitnessCase which);

struct FamilyRoot {
  BigInt value;
  BigInt root;
  unsigned index;  // general_term(root, index) == value
};

/// Strips o -> (o-1)/4 while o = 5 mod 8.
FamilyRoot family_root(const BigInt& odd);

/// True for odd o with o mod 8 in {1, 3, 7}.
bool is_family_root(const BigInt& odd);

}  // namespace collatz

#endif  // COLLATZ_FAMILIES_HPP
