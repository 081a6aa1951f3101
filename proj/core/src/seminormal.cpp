#include "romlab/seminormal.hpp"

#include <stdexcept>

namespace romlab {

namespace {

// Result of re-driving a party's original-protocol logic up to original
// round r against the answers it already holds: either the next query the
// original logic wants, or the round-r message once all queries are served.
struct Redrive {
  bool wants_query = false;
  Bitstring query;
  Message message;
  int consumed_before_round = 0;  // answers used by rounds < r
};

// Original messages this party received, recovered from the sub-round
// stream by position: original round rr completes at global sub-round
// rr * span, and the receiving side sees it at a fixed index.
Message original_received(const PartyView& view, bool is_alice, int span, int rr) {
  int g = rr * span;  // global sub-round carrying the original message
  int idx = is_alice ? g / 2 - 1 : (g - 1) / 2;
  return view.received.at(idx);
}

Redrive redrive_original(const NextFn& next, const PartyView& view, bool is_alice, int span,
                         int target_round, int action_cap) {
  PartyView orig;
  orig.tape = view.tape;
  size_t consumed = 0;
  Redrive out;

  int first_own = is_alice ? 1 : 2;
  for (int rr = first_own; rr <= target_round; rr += 2) {
    size_t needed = is_alice ? (rr - 1) / 2 : rr / 2;
    while (orig.received.size() < needed) {
      int other_round = static_cast<int>(orig.received.size()) * 2 + (is_alice ? 2 : 1);
      orig.received.push_back(original_received(view, is_alice, span, other_round));
    }
    if (rr == target_round) out.consumed_before_round = static_cast<int>(consumed);
    int actions = 0;
    while (true) {
      if (++actions > action_cap) {
        throw std::runtime_error("to_seminormal: original round does not terminate");
      }
      Action act = next(orig);
      if (act.kind == Action::Kind::query) {
        if (orig.answer_for(act.query)) continue;  // re-ask, no-op
        if (consumed < view.answers.size()) {
          if (view.answers[consumed].first != act.query) {
            throw std::runtime_error("to_seminormal: replay diverged from recorded queries");
          }
          orig.answers.push_back(view.answers[consumed]);
          ++consumed;
          continue;
        }
        if (rr != target_round) {
          // Earlier own rounds are fully answered by the time the target
          // round's sub-rounds run; anything else is a corrupted view.
          throw std::runtime_error("to_seminormal: missing answers for an earlier round");
        }
        out.wants_query = true;
        out.query = act.query;
        return out;
      }
      if (rr == target_round) {
        out.message = act.message;
        return out;
      }
      break;  // earlier own round finished; advance
    }
  }
  throw std::logic_error("to_seminormal: unreachable");
}

Action seminormal_act(const NextFn& next, const PartyView& view, bool is_alice, int span,
                      int action_cap) {
  int t = acting_round(view, is_alice);
  int orig_round = (t - 1) / span + 1;
  int sub = t - (orig_round - 1) * span;
  bool owner = ((orig_round % 2 == 1) == is_alice);
  if (!owner) return Action::send(Message::bot());

  Redrive rd = redrive_original(next, view, is_alice, span, orig_round, action_cap);
  int asked_this_round = static_cast<int>(view.answers.size()) - rd.consumed_before_round;

  // Odd sub-round j carries the round's j-th query handed out one per
  // sub-round; the final sub-round also carries the original message.
  if (sub % 2 == 1 && rd.wants_query && asked_this_round == (sub - 1) / 2) {
    return Action::ask(rd.query);
  }
  if (sub < span) return Action::send(Message::bot());
  if (rd.wants_query) {
    throw std::runtime_error("to_seminormal: more queries in a round than the query bound");
  }
  return Action::send(rd.message);
}

}  // namespace

ProtocolDef to_seminormal(const ProtocolDef& def) {
  def.validate();
  ProtocolDef out = def;
  int span = std::max(1, 2 * def.query_bound - 1);
  int action_cap = 4 * def.query_bound + 16;
  NextFn base_a = def.next_a;
  NextFn base_b = def.next_b;

  out.name = def.name + "+seminormal";
  out.round_count = def.round_count * span;
  out.next_a = [base_a, span, action_cap](const PartyView& v) {
    return seminormal_act(base_a, v, true, span, action_cap);
  };
  out.next_b = [base_b, span, action_cap](const PartyView& v) {
    return seminormal_act(base_b, v, false, span, action_cap);
  };

  auto strip = [span](const PartyView& v, bool is_alice) {
    PartyView orig;
    orig.tape = v.tape;
    orig.answers = v.answers;
    for (int rr = is_alice ? 2 : 1;; rr += 2) {
      int g = rr * span;
      size_t idx = is_alice ? g / 2 - 1 : (g - 1) / 2;
      if (idx >= v.received.size()) break;
      orig.received.push_back(v.received[idx]);
    }
    return orig;
  };
  OutputFn base_out_a = def.output_a;
  OutputFn base_out_b = def.output_b;
  if (base_out_a) {
    out.output_a = [base_out_a, strip](const PartyView& v) { return base_out_a(strip(v, true)); };
  }
  if (base_out_b) {
    out.output_b = [base_out_b, strip](const PartyView& v) { return base_out_b(strip(v, false)); };
  }
  return out;
}

SeminormalDiagnostics validate_seminormal(const ProtocolDef& def, int probes, uint64_t seed) {
  def.validate();
  SeminormalDiagnostics diag;

  int tape_bits = def.tape_len_a + def.tape_len_b;
  bool exhaustive = tape_bits <= 16;
  long runs = exhaustive ? (1L << tape_bits) : probes;
  diag.exhaustive = exhaustive;

  for (long i = 0; i < runs && diag.ok; ++i) {
    uint64_t run_seed = mix_seed(seed, static_cast<uint64_t>(i));
    BitTape ta, tb;
    if (exhaustive) {
      uint64_t idx = static_cast<uint64_t>(i);
      ta = BitTape::from_index(def.tape_len_a, idx & ((def.tape_len_a == 64) ? ~0ull : ((1ull << def.tape_len_a) - 1)));
      tb = BitTape::from_index(def.tape_len_b, idx >> def.tape_len_a);
    } else {
      Rng rng = make_rng(run_seed);
      ta = BitTape::random(def.tape_len_a, rng);
      tb = BitTape::random(def.tape_len_b, rng);
    }
    LazyOracle oracle(def.oracle, mix_seed(run_seed, 0xa));
    ExecutionTrace trace = run_protocol(def, oracle, ta, tb);
    ++diag.executions_checked;

    std::vector<int> per_round(def.round_count + 1, 0);
    for (const auto& rq : trace.query_log) {
      if (++per_round[rq.round] > 1) {
        diag.ok = false;
        diag.first_violating_round = rq.round;
        break;
      }
    }
  }
  return diag;
}

}  // namespace romlab
