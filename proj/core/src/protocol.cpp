#include "romlab/protocol.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace romlab {

std::string Message::str() const {
  switch (kind) {
    case MessageKind::bot: return "_";
    case MessageKind::last: return "LAST";
    case MessageKind::data: {
      std::string s = "[";
      for (size_t i = 0; i < items.size(); ++i) {
        if (i) s += " ";
        s += items[i].to_hex();
      }
      return s + "]";
    }
  }
  return "?";
}

std::vector<Bitstring> PartyView::query_set() const {
  std::vector<Bitstring> qs;
  qs.reserve(answers.size());
  for (const auto& [q, a] : answers) qs.push_back(q);
  std::sort(qs.begin(), qs.end());
  return qs;
}

bool PartyView::has_query(const Bitstring& q) const {
  return answer_for(q).has_value();
}

std::optional<Bitstring> PartyView::answer_for(const Bitstring& q) const {
  for (const auto& [query, answer] : answers) {
    if (query == q) return answer;
  }
  return std::nullopt;
}

int acting_round(const PartyView& view, bool is_alice) {
  int r = static_cast<int>(view.received.size());
  return is_alice ? 2 * r + 1 : 2 * r;
}

void ProtocolDef::validate() const {
  if (tape_len_a < 0 || tape_len_b < 0) throw std::invalid_argument("protocol: negative tape length");
  if (query_bound < 0) throw std::invalid_argument("protocol: negative query bound");
  if (round_count < 1) throw std::invalid_argument("protocol: needs at least one round");
  if (!next_a || !next_b) throw std::invalid_argument("protocol: missing next-action function");
  oracle.validate();
}

ProtocolDef finalize_with_last(ProtocolDef def) {
  NextFn base_a = def.next_a;
  NextFn base_b = def.next_b;
  int base_rounds = def.round_count;

  // Rounds past the base protocol send Bot, except the final Alice round
  // which sends Last.
  int total = base_rounds + 1;
  if (total % 2 == 0) total += 1;  // Last must come from Alice (odd round)

  def.next_a = [base_a, base_rounds, total](const PartyView& view) {
    int r = acting_round(view, true);
    if (r <= base_rounds) return base_a(view);
    return Action::send(r == total ? Message::last() : Message::bot());
  };
  def.next_b = [base_b, base_rounds](const PartyView& view) {
    int r = acting_round(view, false);
    if (r <= base_rounds) return base_b(view);
    return Action::send(Message::bot());
  };
  def.round_count = total;
  return def;
}

namespace detail {

Message run_round(const ProtocolDef& def, LazyOracle& oracle, ExecutionTrace& trace, int round) {
  bool alice_acts = (round % 2 == 1);
  PartyView& actor = alice_acts ? trace.view_a : trace.view_b;
  PartyView& other = alice_acts ? trace.view_b : trace.view_a;
  const NextFn& next = alice_acts ? def.next_a : def.next_b;
  Identity who = alice_acts ? Identity::alice : Identity::bob;
  const int action_cap = 4 * def.query_bound + 16;

  int actions = 0;
  while (true) {
    if (++actions > action_cap) {
      throw std::runtime_error("run_protocol: non-terminating round " + std::to_string(round));
    }
    Action act = next(actor);
    if (act.kind == Action::Kind::send) {
      trace.transcript.push_back(act.message);
      other.received.push_back(act.message);
      return act.message;
    }
    // A repeated query leaves the view unchanged, so a deterministic party
    // that re-asks loops until the action cap stops it.
    if (actor.answer_for(act.query)) continue;
    if (static_cast<int>(actor.answers.size()) >= def.query_bound) {
      throw std::runtime_error("run_protocol: query bound exceeded in round " +
                               std::to_string(round));
    }
    Bitstring answer = oracle.query(who, act.query);
    actor.answers.emplace_back(act.query, answer);
    trace.query_log.push_back(RoundQuery{round, who, act.query, answer});
  }
}

}  // namespace detail

ExecutionTrace run_protocol(const ProtocolDef& def, LazyOracle& oracle, const BitTape& tape_a,
                            const BitTape& tape_b) {
  def.validate();
  if (tape_a.size() != def.tape_len_a || tape_b.size() != def.tape_len_b) {
    throw std::invalid_argument("run_protocol: tape lengths do not match the protocol");
  }

  ExecutionTrace trace;
  trace.view_a.tape = tape_a;
  trace.view_b.tape = tape_b;
  for (int round = 1; round <= def.round_count; ++round) {
    detail::run_round(def, oracle, trace, round);
  }
  if (def.output_a) trace.output_a = def.output_a(trace.view_a);
  if (def.output_b) trace.output_b = def.output_b(trace.view_b);
  return trace;
}

std::string ExecutionTrace::str() const {
  std::ostringstream os;
  os << "tape_a=" << view_a.tape.to_bits() << " tape_b=" << view_b.tape.to_bits() << "\n";
  for (size_t i = 0; i < transcript.size(); ++i) {
    int round = static_cast<int>(i) + 1;
    for (const auto& rq : query_log) {
      if (rq.round == round) {
        os << "  r" << round << " " << identity_name(rq.party) << " asks " << rq.query.to_hex()
           << " -> " << rq.answer.to_hex() << "\n";
      }
    }
    os << "  r" << round << " " << (round % 2 ? "alice" : "bob") << " sends "
       << transcript[i].str() << "\n";
  }
  auto out = [](const std::optional<Bitstring>& s) { return s ? s->to_hex() : std::string("-"); };
  os << "  outputs: alice=" << out(output_a) << " bob=" << out(output_b) << "\n";
  return os.str();
}

}  // namespace romlab
