#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "chats/datastore.hpp"
#include "chats/oracle.hpp"
#include "chats/table.hpp"

namespace chats::testing {

// Grammar-clean claims with a truth value computed directly from the table
// (integer arithmetic over tenths), independent of the oracle.
struct SyntheticClaim {
  std::string text;
  bool truth = true;
  ClaimKind kind = ClaimKind::point;
};

struct SyntheticExample {
  ExampleRecord record;
  std::vector<std::vector<SyntheticClaim>> candidates;  // sentences per candidate
};

// Values are stored in tenths; a table cell shows one decimal only when needed.
struct SyntheticTable {
  Table table;
  bool temporal = false;                 // rows are years
  std::vector<std::vector<long>> tenths;  // [row][numeric column]
};

SyntheticTable random_table(std::mt19937_64& rng);
SyntheticClaim random_claim(std::mt19937_64& rng, const SyntheticTable& t, bool truth);

// n examples with `candidates` candidates of 2-4 sentences; each sentence is
// false with probability `false_rate`. Candidate 2 (when present) always
// carries one planted false sentence.
std::vector<SyntheticExample> synthetic_corpus(std::size_t n, std::uint64_t seed,
                                               std::size_t candidates = 4,
                                               double false_rate = 0.3);

// A point claim about a single table value whose written precision and unit
// vary; `entailed` is computed in exact integer arithmetic from the
// tolerance rule (round the table value to min(decimals written, 2) places in
// the claim's unit).
struct RoundingCase {
  Table table;
  std::string sentence;
  bool entailed = false;
};
RoundingCase rounding_case(std::mt19937_64& rng, bool approximate);

std::string join_claims(const std::vector<SyntheticClaim>& claims);
std::string format_tenths(long tenths);
// Value in hundredths, rounded half away from zero, as "x.yy" (or "x" when whole).
std::string format_hundredths(long long hundredths);

}  // namespace chats::testing
