#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "romlab/oracle.hpp"

namespace romlab {

// Wire message. Bot is the padding sentinel used by seminormal sub-rounds,
// Last is the distinguished end-of-protocol sentinel sent by Alice.
enum class MessageKind : int { data = 0, bot = 1, last = 2 };

struct Message {
  MessageKind kind = MessageKind::bot;
  std::vector<Bitstring> items;  // payload for data messages

  static Message bot() { return Message{MessageKind::bot, {}}; }
  static Message last() { return Message{MessageKind::last, {}}; }
  static Message data(std::vector<Bitstring> xs) { return Message{MessageKind::data, std::move(xs)}; }

  friend bool operator==(const Message&, const Message&) = default;
  friend auto operator<=>(const Message&, const Message&) = default;
  std::string str() const;
};

// One party's partial knowledge: private tape, messages received so far,
// oracle answers in ask order (no duplicate queries).
struct PartyView {
  BitTape tape;
  std::vector<Message> received;
  std::vector<QueryAnswer> answers;

  std::vector<Bitstring> query_set() const;  // Q(view), sorted
  bool has_query(const Bitstring& q) const;
  std::optional<Bitstring> answer_for(const Bitstring& q) const;

  friend auto operator<=>(const PartyView&, const PartyView&) = default;
};

// In strict alternation (odd rounds Alice, even rounds Bob) the global
// round an acting party is in is determined by how much it has received.
int acting_round(const PartyView& view, bool is_alice);

struct Action {
  enum class Kind { query, send } kind;
  Bitstring query;  // set for Kind::query
  Message message;  // set for Kind::send

  static Action ask(Bitstring q) { return Action{Kind::query, q, {}}; }
  static Action send(Message m) { return Action{Kind::send, {}, std::move(m)}; }
};

using NextFn = std::function<Action(const PartyView&)>;
using OutputFn = std::function<std::optional<Bitstring>(const PartyView&)>;

// Guess function used by the naive baseline attacker: given the public
// transcript and the attacker's query/answer table, return the secret they
// determine, if any. Protocols without a sensible notion leave it unset.
using NaiveGuessFn = std::function<std::optional<Bitstring>(
    const std::vector<Message>&, const std::map<Bitstring, Bitstring>&)>;

// Two-party oracle protocol as deterministic next-action functions.
// Rounds alternate (odd = Alice sends, even = Bob sends); the final round
// must carry the Last sentinel (finalize_with_last arranges this).
struct ProtocolDef {
  std::string name;
  int tape_len_a = 0;
  int tape_len_b = 0;
  int query_bound = 1;  // n: max distinct oracle queries per party
  int round_count = 1;  // total rounds, including the Last round
  OracleSpec oracle;
  NextFn next_a;
  NextFn next_b;
  OutputFn output_a;
  OutputFn output_b;
  NaiveGuessFn naive_guess;  // optional

  void validate() const;
  int tape_len(Identity who) const { return who == Identity::alice ? tape_len_a : tape_len_b; }
};

// Pads with Bot rounds as needed and appends an Alice round that sends
// Last, so every finalized protocol ends the same way.
ProtocolDef finalize_with_last(ProtocolDef def);

struct RoundQuery {
  int round = 0;  // 1-based
  Identity party = Identity::alice;
  Bitstring query;
  Bitstring answer;
};

struct ExecutionTrace {
  PartyView view_a, view_b;
  std::vector<Message> transcript;
  std::optional<Bitstring> output_a, output_b;
  std::vector<RoundQuery> query_log;

  std::string str() const;
};

// Runs def to completion against the given oracle. Enforces the per-party
// distinct-query bound and guards against non-terminating action loops.
ExecutionTrace run_protocol(const ProtocolDef& def, LazyOracle& oracle, const BitTape& tape_a,
                            const BitTape& tape_b);

namespace detail {
// Executes round r of an in-progress trace (queries plus the send) and
// returns the message sent. Used by attackers that interleave with the run.
Message run_round(const ProtocolDef& def, LazyOracle& oracle, ExecutionTrace& trace, int round);
}  // namespace detail

}  // namespace romlab
