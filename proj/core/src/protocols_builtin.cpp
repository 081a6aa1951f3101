#include "romlab/protocols_builtin.hpp"

#include <algorithm>
#include <stdexcept>

namespace romlab {

namespace {

int ceil_log2(uint64_t m) {
  int b = 0;
  while ((1ull << b) < m) ++b;
  return b;
}

bool is_pow2(uint64_t m) { return (m & (m - 1)) == 0; }

}  // namespace

void MerkleParams::validate() const {
  if (k < 1) throw std::invalid_argument("merkle: k >= 1 required");
  if (m < 1) throw std::invalid_argument("merkle: m >= 1 required");
  if (ell < 1 || ell > 64) throw std::invalid_argument("merkle: ell in [1,64] required");
  if (ell < 64 && m > (1ull << ell)) throw std::invalid_argument("merkle: m exceeds 2^ell");
}

int MerkleParams::bits_per_draw() const { return ceil_log2(m); }

int MerkleParams::tape_len() const {
  int b = bits_per_draw();
  if (b == 0) return 0;  // m == 1, every draw is the value 1
  if (is_pow2(m)) return k * b;
  // Rejection resampling: each b-bit chunk is accepted when it encodes a
  // value < m (acceptance > 1/2). 2k + 64 chunks push the probability of
  // running out of tape below 2^-20.
  return (2 * k + 64) * b;
}

MerkleParams MerkleParams::scaled(int n_prime) {
  if (n_prime < 1) throw std::invalid_argument("merkle: scale >= 1 required");
  MerkleParams p;
  p.k = 2 * n_prime;
  p.m = static_cast<uint64_t>(n_prime) * n_prime;
  p.ell = std::max(1, ceil_log2(p.m));
  return p;
}

uint64_t merkle_draw(const BitTape& tape, const MerkleParams& p, int index) {
  int b = p.bits_per_draw();
  if (b == 0) return 1;
  if (is_pow2(p.m)) return tape.slice(index * b, b) + 1;
  // Walk the shared chunk stream; draw `index` takes the (index+1)-th
  // accepted chunk. Falls back to a modular value if the tape runs out
  // (probability < 2^-20 by construction).
  int chunks = tape.size() / b;
  int accepted = 0;
  uint64_t raw = 0;
  for (int c = 0; c < chunks; ++c) {
    raw = tape.slice(c * b, b);
    if (raw < p.m) {
      if (accepted == index) return raw + 1;
      ++accepted;
    }
  }
  return (raw % p.m) + 1;
}

std::vector<uint64_t> merkle_draws(const BitTape& tape, const MerkleParams& p) {
  std::vector<uint64_t> out(p.k);
  for (int i = 0; i < p.k; ++i) out[i] = merkle_draw(tape, p, i);
  return out;
}

namespace {

std::vector<uint64_t> distinct_in_order(const std::vector<uint64_t>& xs) {
  std::vector<uint64_t> d;
  for (uint64_t x : xs) {
    if (std::find(d.begin(), d.end(), x) == d.end()) d.push_back(x);
  }
  return d;
}

// a-list is indexed first: pairs (i, j) in lexicographic order.
std::optional<std::pair<int, int>> first_collision(const std::vector<Bitstring>& a,
                                                   const std::vector<Bitstring>& b) {
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) {
      if (a[i] == b[j]) return std::make_pair(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return std::nullopt;
}

Action merkle_act(const PartyView& view, const MerkleParams& p, bool is_alice) {
  int own_round = is_alice ? 1 : 2;
  if (acting_round(view, is_alice) != own_round) return Action::send(Message::data({}));
  auto draws = merkle_draws(view.tape, p);
  auto distinct = distinct_in_order(draws);
  if (view.answers.size() < distinct.size()) {
    return Action::ask(encode_value(distinct[view.answers.size()], p.ell));
  }
  std::vector<Bitstring> images;
  images.reserve(draws.size());
  for (uint64_t x : draws) images.push_back(*view.answer_for(encode_value(x, p.ell)));
  return Action::send(Message::data(std::move(images)));
}

std::optional<Bitstring> merkle_output(const PartyView& view, const MerkleParams& p,
                                       bool is_alice) {
  if (view.received.empty() || view.received[0].kind != MessageKind::data) return std::nullopt;
  const std::vector<Bitstring>& theirs = view.received[0].items;
  if (static_cast<int>(theirs.size()) != p.k) return std::nullopt;
  auto draws = merkle_draws(view.tape, p);
  std::vector<Bitstring> own;
  own.reserve(draws.size());
  for (uint64_t x : draws) own.push_back(*view.answer_for(encode_value(x, p.ell)));

  // Alice's images come first in the pair order regardless of which party
  // is computing the collision.
  const std::vector<Bitstring>& a_list = is_alice ? own : theirs;
  const std::vector<Bitstring>& b_list = is_alice ? theirs : own;
  auto hit = first_collision(a_list, b_list);
  if (!hit) return std::nullopt;
  int own_index = is_alice ? hit->first : hit->second;
  return encode_value(draws[own_index], p.ell);
}

}  // namespace

NaiveGuessFn merkle_naive_guess(int k, int ell) {
  return [k, ell](const std::vector<Message>& transcript,
                  const std::map<Bitstring, Bitstring>& eve_table) -> std::optional<Bitstring> {
    // The first two k-item data messages are the two image lists, in both
    // the plain and the seminormal transcript.
    std::vector<const Message*> lists;
    for (const auto& msg : transcript) {
      if (msg.kind == MessageKind::data && static_cast<int>(msg.items.size()) == k) {
        lists.push_back(&msg);
        if (lists.size() == 2) break;
      }
    }
    if (lists.size() != 2) return std::nullopt;
    auto hit = first_collision(lists[0]->items, lists[1]->items);
    if (!hit) return std::nullopt;
    Bitstring target = lists[0]->items[hit->first];
    for (const auto& [q, a] : eve_table) {
      if (a == target && q.len == ell) return q;  // lexicographically first preimage
    }
    return std::nullopt;
  };
}

ProtocolDef merkle_protocol(const MerkleParams& p) {
  p.validate();
  ProtocolDef def;
  def.name = "merkle";
  def.tape_len_a = def.tape_len_b = p.tape_len();
  def.query_bound = p.k;
  def.round_count = 2;
  def.oracle = OracleSpec{p.ell, p.m};
  def.next_a = [p](const PartyView& v) { return merkle_act(v, p, true); };
  def.next_b = [p](const PartyView& v) { return merkle_act(v, p, false); };
  def.output_a = [p](const PartyView& v) { return merkle_output(v, p, true); };
  def.output_b = [p](const PartyView& v) { return merkle_output(v, p, false); };
  def.naive_guess = merkle_naive_guess(p.k, p.ell);
  return def;
}

Rat merkle_collision_probability(int k, uint64_t m) {
  if (k < 1 || m < 1) throw std::invalid_argument("merkle_collision_probability: k,m >= 1");
  // Pr[no shared value] = sum_d Pr[Alice's distinct set has size d] * ((m-d)/m)^k.
  // Count of k-sequences covering a fixed d-set is the surjection number
  // surj(k, d) = sum_j (-1)^j C(d, j) (d-j)^k.
  auto power = [](BigInt base, int e) {
    BigInt r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
  };
  BigInt none = 0;
  BigInt choose_md = 1;  // C(m, d)
  uint64_t dmax = std::min<uint64_t>(k, m);
  for (uint64_t d = 1; d <= dmax; ++d) {
    choose_md = choose_md * BigInt(m - d + 1) / BigInt(d);
    BigInt surj = 0;
    BigInt choose_dj = 1;  // C(d, j)
    for (uint64_t j = 0; j <= d; ++j) {
      BigInt term = choose_dj * power(BigInt(d - j), k);
      surj += (j % 2 == 0) ? term : -term;
      choose_dj = choose_dj * BigInt(d - j) / BigInt(j + 1);
    }
    none += choose_md * surj * power(BigInt(m - d), k);
  }
  Rat no_collision(none, power(BigInt(m), 2 * k));
  return 1 - no_collision;
}

ProtocolDef hiddenbit_protocol(int ell) {
  if (ell < 1 || ell > 64) throw std::invalid_argument("hiddenbit: ell in [1,64]");
  Bitstring zeros(ell, 0);
  Bitstring ones(ell, ~0ull);
  ProtocolDef def;
  def.name = "hiddenbit";
  def.tape_len_a = 1;
  def.tape_len_b = 0;
  def.query_bound = 1;
  def.round_count = 2;
  def.oracle = OracleSpec{ell, std::nullopt};
  def.next_a = [zeros, ones](const PartyView& v) {
    if (v.answers.empty()) return Action::ask(v.tape.bit(0) ? ones : zeros);
    return Action::send(Message::data({v.answers[0].second}));
  };
  def.next_b = [ones](const PartyView& v) {
    if (v.answers.empty()) return Action::ask(ones);
    return Action::send(Message::data({}));
  };
  def.output_a = [zeros, ones](const PartyView& v) -> std::optional<Bitstring> {
    return v.tape.bit(0) ? ones : zeros;
  };
  def.output_b = [zeros, ones](const PartyView& v) -> std::optional<Bitstring> {
    if (v.received.empty() || v.received[0].items.empty()) return std::nullopt;
    // y' == y means Alice most likely hid 1^ell (exact under injective H).
    return v.answers[0].second == v.received[0].items[0] ? ones : zeros;
  };
  return def;
}

ProtocolDef fixedquery_protocol(int ell) {
  Bitstring shared(ell, 0);
  ProtocolDef def;
  def.name = "fixedquery";
  def.tape_len_a = 1;
  def.tape_len_b = 1;
  def.query_bound = 1;
  def.round_count = 2;
  def.oracle = OracleSpec{ell, std::nullopt};
  auto act = [shared](const PartyView& v, bool is_alice) {
    if (acting_round(v, is_alice) != (is_alice ? 1 : 2)) return Action::send(Message::data({}));
    if (v.answers.empty()) return Action::ask(shared);
    return is_alice ? Action::send(Message::data({v.answers[0].second}))
                    : Action::send(Message::data({}));
  };
  def.next_a = [act](const PartyView& v) { return act(v, true); };
  def.next_b = [act](const PartyView& v) { return act(v, false); };
  auto out = [](const PartyView& v) -> std::optional<Bitstring> {
    if (v.answers.empty()) return std::nullopt;
    return v.answers[0].second;
  };
  def.output_a = out;
  def.output_b = out;
  return def;
}

ProtocolDef noquery_protocol() {
  ProtocolDef def;
  def.name = "noquery";
  def.tape_len_a = 1;
  def.tape_len_b = 1;
  def.query_bound = 0;
  def.round_count = 2;
  def.oracle = OracleSpec{1, std::nullopt};
  def.next_a = [](const PartyView&) { return Action::send(Message::data({Bitstring(1, 0)})); };
  def.next_b = [](const PartyView&) { return Action::send(Message::data({Bitstring(1, 1)})); };
  auto out = [](const PartyView&) -> std::optional<Bitstring> { return Bitstring(1, 0); };
  def.output_a = out;
  def.output_b = out;
  return def;
}

ProtocolDef make_protocol(const std::string& name, const MerkleParams& merkle) {
  if (name == "merkle") return merkle_protocol(merkle);
  if (name == "hiddenbit") return hiddenbit_protocol(merkle.ell);
  if (name == "fixedquery") return fixedquery_protocol(merkle.ell);
  if (name == "noquery") return noquery_protocol();
  throw std::invalid_argument("unknown protocol: " + name);
}

}  // namespace romlab
