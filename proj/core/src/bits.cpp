#include "romlab/bits.hpp"

#include <sstream>

namespace romlab {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(r);
  if (boost::multiprecision::denominator(r) != 1) {
    os << "/" << boost::multiprecision::denominator(r);
  }
  return os.str();
}

std::string Bitstring::to_hex() const {
  int digits = (len + 3) / 4;
  if (digits == 0) return "-";
  static const char* kHex = "0123456789abcdef";
  std::string s(digits, '0');
  uint64_t v = value;
  for (int i = digits - 1; i >= 0; --i) {
    s[i] = kHex[v & 0xf];
    v >>= 4;
  }
  return s;
}

std::string Bitstring::to_bits() const {
  std::string s(len, '0');
  for (int i = 0; i < len; ++i) {
    if ((value >> (len - 1 - i)) & 1) s[i] = '1';
  }
  return s;
}

Bitstring encode_value(uint64_t value, int ell) {
  if (value == 0) throw std::invalid_argument("encode_value: values are 1-based");
  if (ell < 64 && value > (1ull << ell)) {
    throw std::invalid_argument("encode_value: value does not fit in ell bits");
  }
  return Bitstring(ell, value - 1);
}

uint64_t decode_value(const Bitstring& q) { return q.value + 1; }

BitTape BitTape::from_index(int len, uint64_t index) {
  if (len > 64) throw std::invalid_argument("BitTape::from_index: len > 64");
  BitTape t(len);
  if (len > 0) t.words_[0] = index;
  t.mask_tail();
  return t;
}

uint64_t BitTape::slice(int pos, int count) const {
  if (count < 0 || count > 64 || pos < 0 || pos + count > len_) {
    throw std::out_of_range("BitTape::slice");
  }
  if (count == 0) return 0;
  uint64_t out = 0;
  // Bits are stored lsb-first inside words; slice returns them packed with
  // bit (pos) as the least significant output bit.
  for (int i = count - 1; i >= 0; --i) out = (out << 1) | (bit(pos + i) ? 1 : 0);
  return out;
}

void BitTape::mask_tail() {
  int tail = len_ % 64;
  if (tail != 0 && !words_.empty()) words_.back() &= (~0ull) >> (64 - tail);
}

std::string BitTape::to_bits() const {
  std::string s(len_, '0');
  for (int i = 0; i < len_; ++i) {
    if (bit(i)) s[i] = '1';
  }
  return s;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

BigInt uniform_bigint(Rng& rng, const BigInt& bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_bigint: bound must be positive");
  unsigned bits = boost::multiprecision::msb(bound) + 1;
  while (true) {
    BigInt draw = 0;
    for (unsigned got = 0; got < bits; got += 64) {
      draw <<= 64;
      draw |= BigInt(rng());
    }
    unsigned drawn = ((bits + 63) / 64) * 64;
    draw >>= (drawn - bits);
    if (draw < bound) return draw;
  }
}

}  // namespace romlab
