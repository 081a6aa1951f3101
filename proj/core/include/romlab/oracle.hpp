#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <utility>

#include "romlab/bits.hpp"

namespace romlab {

enum class Identity : int { alice = 0, bob = 1, eve = 2 };

const char* identity_name(Identity who);

// Shape of the random function H: {0,1}^ell -> {0,1}^ell. An optional
// domain restriction limits legal queries to the canonical encodings of
// [domain_size] (encode_value).
struct OracleSpec {
  int ell = 1;
  std::optional<uint64_t> domain_size;

  void validate() const;
  bool query_legal(const Bitstring& q) const;
  // Number of legal queries when enumerable (domain restricted, or ell
  // small enough to enumerate).
  std::optional<uint64_t> legal_count() const;
};

using QueryAnswer = std::pair<Bitstring, Bitstring>;

// Lazily sampled random function with per-identity distinct-query
// accounting. Fresh answers are a fixed function of (seed, query), so the
// realized table does not depend on query arrival order.
class LazyOracle {
 public:
  LazyOracle(OracleSpec spec, uint64_t seed);

  // Answers q for `who`. Re-asking is permitted and returns the recorded
  // answer; the distinct counter increments only on first ask by `who`.
  Bitstring query(Identity who, const Bitstring& q);

  // Table pre-populated with the pairs in `constraints`; contradictory
  // constraints (same query, two answers) are rejected.
  static LazyOracle from_constraints(OracleSpec spec, std::span<const QueryAnswer> constraints,
                                     uint64_t seed);

  const OracleSpec& spec() const { return spec_; }
  int distinct_queries(Identity who) const { return counts_[static_cast<int>(who)]; }
  const std::map<Bitstring, Bitstring>& table() const { return table_; }

  // Sorted `hex(query),hex(answer)` lines.
  void dump_csv(std::ostream& os) const;

 private:
  Bitstring fresh_answer(const Bitstring& q) const;

  OracleSpec spec_;
  uint64_t seed_;
  std::map<Bitstring, Bitstring> table_;
  std::map<Bitstring, uint8_t> asked_by_;  // bitmask of identities
  std::array<int, 3> counts_{0, 0, 0};
};

}  // namespace romlab
