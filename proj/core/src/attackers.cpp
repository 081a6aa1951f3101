#include "romlab/attackers.hpp"

#include <algorithm>
#include <cmath>

namespace romlab {

const char* backend_name(Backend b) {
  return b == Backend::exact ? "exact" : "mc";
}

void AttackConfig::validate() const {
  if (eps <= 0 || eps > Rat(1, 10)) {
    throw std::invalid_argument("AttackConfig: eps must lie in (0, 1/10]");
  }
  if (mc_samples < 1) throw std::invalid_argument("AttackConfig: mc_samples >= 1");
  if (max_rejects < 1) throw std::invalid_argument("AttackConfig: max_rejects >= 1");
}

uint64_t AttackConfig::cap_for(int n) const {
  if (query_cap != 0) return query_cap;
  // ceil(n^2 / eps^2)
  Rat cap = Rat(static_cast<long>(n) * n) / (eps * eps);
  BigInt num = boost::multiprecision::numerator(cap);
  BigInt den = boost::multiprecision::denominator(cap);
  BigInt c = (num + den - 1) / den;
  return c.convert_to<uint64_t>();
}

std::optional<int> AttackResult::first_fail_round() const {
  for (const auto& f : fail_events) {
    if (f.first) return f.round;
  }
  return std::nullopt;
}

namespace {

bool domain_exhausted(const ProtocolDef& def, const EveKnowledge& know) {
  auto legal = def.oracle.legal_count();
  return legal && know.info.size() >= *legal;
}

// Lexicographically first query with mass strictly above the threshold.
std::optional<Bitstring> pick_heavy(const std::vector<std::pair<Bitstring, Rat>>& masses,
                                    const Rat& threshold) {
  for (const auto& [q, m] : masses) {
    if (m > threshold) return q;
  }
  return std::nullopt;
}

}  // namespace

std::vector<Bitstring> eve_heavy_round(EveLoopState& state, const ProtocolDef& def,
                                       const AttackConfig& cfg, LazyOracle& oracle,
                                       uint64_t round_seed, const AttackHooks* hooks) {
  cfg.validate();
  int n = std::max(1, def.query_bound);
  Rat threshold = cfg.heavy_threshold(n);
  uint64_t cap = cfg.cap_for(n);
  std::vector<Bitstring> asked;

  if (cfg.backend == Backend::exact) {
    BeliefState beliefs(def, state.know, cfg.bit_budget);
    bool fixed_point = false;
    while (true) {
      state.bad_ever |= beliefs.diagnostics().bad_flag;
      if (domain_exhausted(def, beliefs.knowledge())) {
        fixed_point = true;
        break;
      }
      auto pick = pick_heavy(beliefs.good_query_masses(), threshold);
      if (!pick) {
        fixed_point = true;
        break;
      }
      if (state.queries_asked >= cap) {
        state.long_flag = true;
        break;
      }
      if (hooks && hooks->on_state) hooks->on_state(beliefs, false);
      Bitstring answer = oracle.query(Identity::eve, *pick);
      beliefs.observe_eve_query(*pick, answer);
      asked.push_back(*pick);
      ++state.queries_asked;
    }
    if (fixed_point && hooks && hooks->on_state) hooks->on_state(beliefs, true);
    state.know = beliefs.knowledge();
    return asked;
  }

  // Monte Carlo: re-estimate masses from fresh conditioned samples after
  // every accepted query.
  for (uint64_t iter = 0;; ++iter) {
    if (domain_exhausted(def, state.know)) break;
    WeightedExecutionSet samples;
    try {
      samples = sample_gexec(def, state.know, cfg.mc_samples, mix_seed(round_seed, iter),
                             cfg.max_rejects);
    } catch (const SupportTooThin&) {
      ++state.thin_support_rounds;
      break;
    }
    auto masses = all_query_masses(samples);
    std::erase_if(masses, [&](const auto& qm) { return state.know.knows_query(qm.first); });
    auto pick = pick_heavy(masses, threshold);
    if (!pick) break;
    if (state.queries_asked >= cap) {
      state.long_flag = true;
      break;
    }
    Bitstring answer = oracle.query(Identity::eve, *pick);
    state.know.info.emplace_back(*pick, answer);
    asked.push_back(*pick);
    ++state.queries_asked;
  }
  return asked;
}

namespace {

bool outputs_match(const std::optional<Bitstring>& x, const std::optional<Bitstring>& y) {
  if (!x && !y) return true;  // agreeing on "no secret" counts as agreement
  return x && y && *x == *y;
}

bool captured_all_intersections(const ExecutionTrace& trace, const EveKnowledge& know) {
  for (const auto& [q, a] : trace.view_a.answers) {
    if (trace.view_b.has_query(q) && !know.knows_query(q)) return false;
  }
  return true;
}

}  // namespace

AttackResult eve_heavy_run(const ProtocolDef& def, const AttackConfig& cfg, uint64_t trial_seed,
                           const AttackHooks* hooks) {
  def.validate();
  cfg.validate();

  Rng tape_rng = make_rng(mix_seed(trial_seed, 1));
  ExecutionTrace trace;
  trace.view_a.tape = BitTape::random(def.tape_len_a, tape_rng);
  trace.view_b.tape = BitTape::random(def.tape_len_b, tape_rng);
  LazyOracle oracle(def.oracle, mix_seed(trial_seed, 2));

  AttackResult res;
  EveLoopState eve;
  std::vector<std::set<Bitstring>> know_history(def.round_count + 1);

  for (int round = 1; round <= def.round_count; ++round) {
    know_history[round] = eve.know.info_queries();
    detail::run_round(def, oracle, trace, round);
    eve.know.transcript.push_back(trace.transcript.back());
    eve.know.round_cursor = round;
    if (res.degenerate) continue;  // parties finish; Eve has stopped
    try {
      auto asked = eve_heavy_round(eve, def, cfg, oracle, mix_seed(trial_seed, 100 + round),
                                   hooks);
      for (const auto& q : asked) res.queries_asked.emplace_back(round, q);
    } catch (const GoodSupportEmpty&) {
      res.degenerate = true;
    }
  }

  if (def.output_a) trace.output_a = def.output_a(trace.view_a);
  if (def.output_b) trace.output_b = def.output_b(trace.view_b);

  res.long_flag = eve.long_flag;
  res.thin_support_rounds = eve.thin_support_rounds;
  if (cfg.backend == Backend::exact && !res.degenerate) res.bad_ever = eve.bad_ever;
  res.intersections_found = !res.degenerate && captured_all_intersections(trace, eve.know);
  res.fail_events = classify_failures(trace, know_history);

  if (!res.degenerate) {
    try {
      res.secret_guess = extract_secret(def, eve.know, cfg.backend, mix_seed(trial_seed, 3),
                                        cfg.bit_budget, cfg.max_rejects);
    } catch (const SupportTooThin&) {
    } catch (const GoodSupportEmpty&) {
    }
  }
  res.secret_match = outputs_match(res.secret_guess, trace.output_b);
  res.honest_match = outputs_match(trace.output_a, trace.output_b);
  return res;
}

std::optional<Bitstring> extract_secret(const ProtocolDef& def, const EveKnowledge& know,
                                        Backend backend, uint64_t seed, int bit_budget,
                                        int max_rejects) {
  if (know.transcript.empty() || know.transcript.back().kind != MessageKind::last) {
    throw std::invalid_argument("extract_secret: protocol not finished (no Last observed)");
  }
  if (!def.output_a) throw std::invalid_argument("extract_secret: protocol has no outputs");

  if (backend == Backend::exact) {
    auto [gexec, diag] = enumerate_gexec(def, know, bit_budget);
    Rng rng = make_rng(seed);
    size_t i = sample_entry_index(gexec, rng);
    return def.output_a(gexec.entries[i].view_a);
  }
  WeightedExecutionSet one = sample_gexec(def, know, 1, seed, max_rejects);
  return def.output_a(one.entries[0].view_a);
}

int sampling_baseline_samples(const SamplingBaselineConfig& cfg, int n) {
  if (cfg.samples_per_round > 0) return cfg.samples_per_round;
  double raw = cfg.c * n * std::log2(std::max(1, n));
  return std::max(1, static_cast<int>(std::ceil(raw)));
}

namespace {

// Single-party execution of `is_alice` through round `upto`, with fresh
// tape, answers from the given oracle, and the party's own sends required
// to reproduce the transcript.
std::optional<PartyView> simulate_party(const ProtocolDef& def, bool is_alice,
                                        const BitTape& tape, LazyOracle& oracle,
                                        const std::vector<Message>& transcript, int upto) {
  PartyView v;
  v.tape = tape;
  int action_cap = 4 * def.query_bound + 16;
  const NextFn& next = is_alice ? def.next_a : def.next_b;

  for (int r = is_alice ? 1 : 2; r <= upto; r += 2) {
    size_t needed = static_cast<size_t>(is_alice ? (r - 1) / 2 : r / 2);
    while (v.received.size() < needed) {
      int other_round = static_cast<int>(v.received.size()) * 2 + (is_alice ? 2 : 1);
      v.received.push_back(transcript[other_round - 1]);
    }
    int actions = 0;
    while (true) {
      if (++actions > action_cap) throw std::runtime_error("simulate_party: non-terminating");
      Action act = next(v);
      if (act.kind == Action::Kind::send) {
        if (act.message != transcript[r - 1]) return std::nullopt;
        break;
      }
      if (v.answer_for(act.query)) continue;
      if (static_cast<int>(v.answers.size()) >= def.query_bound) {
        throw std::runtime_error("simulate_party: query bound exceeded");
      }
      v.answers.emplace_back(act.query, oracle.query(is_alice ? Identity::alice : Identity::bob,
                                                     act.query));
    }
  }
  return v;
}

}  // namespace

AttackResult eve_sampling_run(const ProtocolDef& def, const SamplingBaselineConfig& cfg,
                              uint64_t trial_seed) {
  def.validate();
  int n = std::max(1, def.query_bound);
  int per_round = sampling_baseline_samples(cfg, n);

  Rng tape_rng = make_rng(mix_seed(trial_seed, 1));
  ExecutionTrace trace;
  trace.view_a.tape = BitTape::random(def.tape_len_a, tape_rng);
  trace.view_b.tape = BitTape::random(def.tape_len_b, tape_rng);
  LazyOracle oracle(def.oracle, mix_seed(trial_seed, 2));

  AttackResult res;
  EveKnowledge know;
  std::vector<std::set<Bitstring>> know_history(def.round_count + 1);
  int thin_rounds = 0;

  for (int round = 1; round <= def.round_count; ++round) {
    know_history[round] = know.info_queries();
    detail::run_round(def, oracle, trace, round);
    know.transcript.push_back(trace.transcript.back());
    know.round_cursor = round;

    bool sender_is_alice = (round % 2 == 1);
    uint64_t round_seed = mix_seed(trial_seed, 200 + round);
    int consecutive = 0;
    bool gave_up = false;
    for (int s = 0; s < per_round && !gave_up; ++s) {
      std::optional<PartyView> sampled;
      for (uint64_t attempt = 0;; ++attempt) {
        uint64_t attempt_seed = mix_seed(round_seed, static_cast<uint64_t>(s), attempt);
        Rng rng = make_rng(attempt_seed);
        BitTape tape = BitTape::random(
            sender_is_alice ? def.tape_len_a : def.tape_len_b, rng);
        LazyOracle guess_oracle =
            LazyOracle::from_constraints(def.oracle, know.info, mix_seed(attempt_seed, 0xb));
        sampled = simulate_party(def, sender_is_alice, tape, guess_oracle, know.transcript,
                                 round);
        if (sampled) {
          consecutive = 0;
          break;
        }
        if (++consecutive >= cfg.max_rejects) {
          gave_up = true;
          ++thin_rounds;
          break;
        }
      }
      if (!sampled) break;
      // Ask the true oracle every query appearing in the sampled execution.
      for (const auto& [q, guessed] : sampled->answers) {
        if (know.knows_query(q)) continue;
        Bitstring answer = oracle.query(Identity::eve, q);
        know.info.emplace_back(q, answer);
        res.queries_asked.emplace_back(round, q);
      }
    }
  }

  if (def.output_a) trace.output_a = def.output_a(trace.view_a);
  if (def.output_b) trace.output_b = def.output_b(trace.view_b);

  res.thin_support_rounds = thin_rounds;
  res.intersections_found = captured_all_intersections(trace, know);
  res.fail_events = classify_failures(trace, know_history);
  try {
    res.secret_guess = extract_secret(def, know, cfg.extract_backend, mix_seed(trial_seed, 3),
                                      cfg.bit_budget, cfg.max_rejects);
  } catch (const SupportTooThin&) {
  } catch (const GoodSupportEmpty&) {
  }
  res.secret_match = outputs_match(res.secret_guess, trace.output_b);
  res.honest_match = outputs_match(trace.output_a, trace.output_b);
  return res;
}

AttackResult eve_naive_run(const ProtocolDef& def, uint64_t budget, uint64_t trial_seed) {
  def.validate();

  Rng tape_rng = make_rng(mix_seed(trial_seed, 1));
  BitTape tape_a = BitTape::random(def.tape_len_a, tape_rng);
  BitTape tape_b = BitTape::random(def.tape_len_b, tape_rng);
  LazyOracle oracle(def.oracle, mix_seed(trial_seed, 2));
  ExecutionTrace trace = run_protocol(def, oracle, tape_a, tape_b);

  AttackResult res;
  auto legal = def.oracle.legal_count();
  uint64_t domain = legal.value_or(~0ull);
  uint64_t asks = std::min(budget, domain);

  Rng pick_rng = make_rng(mix_seed(trial_seed, 4));
  uint64_t hi = def.oracle.domain_size ? *def.oracle.domain_size - 1
               : (def.oracle.ell == 64) ? ~0ull
                                        : (1ull << def.oracle.ell) - 1;
  std::uniform_int_distribution<uint64_t> pick(0, hi);
  std::set<Bitstring> seen;
  std::map<Bitstring, Bitstring> answers;
  while (seen.size() < asks) {
    Bitstring q(def.oracle.ell, pick(pick_rng));
    if (!seen.insert(q).second) continue;
    Bitstring a = oracle.query(Identity::eve, q);
    answers.emplace(q, a);
    res.queries_asked.emplace_back(def.round_count, q);
  }

  if (def.naive_guess) {
    Rng guess_rng = make_rng(mix_seed(trial_seed, 5));
    res.secret_guess = def.naive_guess(trace.transcript, answers, guess_rng);
  }
  EveKnowledge know;
  for (const auto& [q, a] : answers) know.info.emplace_back(q, a);
  res.intersections_found = captured_all_intersections(trace, know);
  res.secret_match = outputs_match(res.secret_guess, trace.output_b);
  res.honest_match = outputs_match(trace.output_a, trace.output_b);
  return res;
}

std::vector<FailureRecord> classify_failures(
    const ExecutionTrace& trace, const std::vector<std::set<Bitstring>>& know_history) {
  std::vector<FailureRecord> records;
  std::array<int, 2> party_counter{0, 0};
  for (const auto& rq : trace.query_log) {
    int pi = ++party_counter[rq.party == Identity::alice ? 0 : 1];
    bool other_asked_before = false;
    for (const auto& prior : trace.query_log) {
      if (prior.round >= rq.round) break;
      if (prior.party != rq.party && prior.query == rq.query) {
        other_asked_before = true;
        break;
      }
    }
    if (!other_asked_before) continue;
    const std::set<Bitstring>& eve_qs =
        static_cast<size_t>(rq.round) < know_history.size() ? know_history[rq.round]
                                                            : know_history.back();
    if (eve_qs.contains(rq.query)) continue;
    FailureRecord rec;
    rec.round = rq.round;
    rec.party_index = pi;
    rec.party = rq.party;
    rec.query = rq.query;
    records.push_back(rec);
  }
  if (!records.empty()) {
    auto first = std::min_element(records.begin(), records.end(),
                                  [](const auto& x, const auto& y) { return x.round < y.round; });
    first->first = true;
  }
  return records;
}

bool eve_replay(const ProtocolDef& def, const EveKnowledge& know, const AttackConfig& cfg) {
  // Replay is defined against the exact heaviness rule; the Monte Carlo
  // backend's decisions depend on sampler noise and are not replayable.
  int n = std::max(1, def.query_bound);
  Rat threshold = cfg.heavy_threshold(n);
  uint64_t cap = cfg.cap_for(n);

  EveLoopState state;
  size_t consumed = 0;
  for (size_t msg = 0; msg < know.transcript.size(); ++msg) {
    state.know.transcript.push_back(know.transcript[msg]);
    state.know.round_cursor = static_cast<int>(msg) + 1;
    try {
      BeliefState beliefs(def, state.know, cfg.bit_budget);
      while (true) {
        if (domain_exhausted(def, beliefs.knowledge())) break;
        auto pick = pick_heavy(beliefs.good_query_masses(), threshold);
        if (!pick) break;
        if (state.queries_asked >= cap) break;
        if (consumed >= know.info.size() || know.info[consumed].first != *pick) return false;
        beliefs.observe_eve_query(*pick, know.info[consumed].second);
        ++consumed;
        ++state.queries_asked;
      }
      state.know = beliefs.knowledge();
    } catch (const GoodSupportEmpty&) {
      return false;
    } catch (const EmptySupport&) {
      return false;  // knowledge inconsistent with the protocol
    }
  }
  return consumed == know.info.size();  // no extra pairs in I
}

bool is_consistent_with_eve(const ProtocolDef& def, const PartyView& view_a,
                            const PartyView& view_b, const EveKnowledge& know,
                            const AttackConfig& cfg) {
  return is_consistent(def, view_a, view_b, know) && eve_replay(def, know, cfg);
}

}  // namespace romlab
