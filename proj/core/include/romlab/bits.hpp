#pragma once

#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace romlab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long num, long den = 1) { return Rat(num, den); }

// 2^-e as an exact rational, e >= 0.
inline Rat pow2_inv(int e) {
  BigInt d = BigInt(1) << e;
  return Rat(1, d);
}

std::string rat_str(const Rat& r);

// Fixed-width bit string, msb-first ordering. Holds oracle queries,
// answers and secrets; lengths beyond 64 bits are not needed at desk
// scale (tapes use BitTape instead).
struct Bitstring {
  uint64_t value = 0;
  int len = 0;

  Bitstring() = default;
  Bitstring(int length, uint64_t v) : value(v), len(length) {
    if (length < 0 || length > 64) throw std::invalid_argument("Bitstring: bad length");
    if (length < 64) value &= (length == 0) ? 0ull : ((~0ull) >> (64 - length));
  }

  // msb-first lexicographic order; for equal lengths this is numeric order.
  friend auto operator<=>(const Bitstring& a, const Bitstring& b) {
    if (a.len != b.len) return a.len <=> b.len;
    return a.value <=> b.value;
  }
  friend bool operator==(const Bitstring&, const Bitstring&) = default;

  std::string to_hex() const;
  std::string to_bits() const;
};

// Canonical embedding of [m] into ell-bit strings: big-endian binary of
// value-1. Values are 1-based.
Bitstring encode_value(uint64_t value, int ell);
uint64_t decode_value(const Bitstring& q);

// Dynamic-length random tape, bit-addressable.
class BitTape {
 public:
  BitTape() = default;
  explicit BitTape(int len) : len_(len), words_((len + 63) / 64, 0) {}

  // Low `len` bits of an integer index; used by exhaustive enumeration.
  static BitTape from_index(int len, uint64_t index);

  template <typename Rng>
  static BitTape random(int len, Rng& rng) {
    BitTape t(len);
    for (auto& w : t.words_) w = rng();
    t.mask_tail();
    return t;
  }

  int size() const { return len_; }
  bool bit(int pos) const { return (words_[pos / 64] >> (pos % 64)) & 1; }
  // Reads count <= 64 bits starting at pos (must stay in range).
  uint64_t slice(int pos, int count) const;

  friend auto operator<=>(const BitTape& a, const BitTape& b) = default;
  std::string to_bits() const;

 private:
  void mask_tail();
  int len_ = 0;
  std::vector<uint64_t> words_;
};

// --- Deterministic seed derivation -----------------------------------------
//
// All randomness in the project flows from explicit 64-bit seeds. Derived
// streams are obtained by mixing the parent seed with fixed stream tags so
// trials, oracles and samplers are reproducible and order-insensitive.

uint64_t splitmix64(uint64_t x);

inline uint64_t mix_seed(uint64_t seed, uint64_t tag) {
  return splitmix64(seed + 0x9e3779b97f4a7c15ull * (tag + 1));
}
inline uint64_t mix_seed(uint64_t seed, uint64_t tag1, uint64_t tag2) {
  return mix_seed(mix_seed(seed, tag1), tag2);
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) { return Rng(splitmix64(seed ^ 0xd1b54a32d192ed03ull)); }

// Uniform integer in [0, bound) for an arbitrary-precision bound.
BigInt uniform_bigint(Rng& rng, const BigInt& bound);

}  // namespace romlab
