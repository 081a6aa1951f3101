#include "romlab/beliefs.hpp"

#include <algorithm>
#include <map>

namespace romlab {

std::set<Bitstring> EveKnowledge::info_queries() const {
  std::set<Bitstring> qs;
  for (const auto& [q, a] : info) qs.insert(q);
  return qs;
}

bool EveKnowledge::knows_query(const Bitstring& q) const { return info_answer(q).has_value(); }

std::optional<Bitstring> EveKnowledge::info_answer(const Bitstring& q) const {
  for (const auto& [query, answer] : info) {
    if (query == q) return answer;
  }
  return std::nullopt;
}

void EveKnowledge::validate() const {
  int msgs = static_cast<int>(transcript.size());
  if (round_cursor != msgs && round_cursor != msgs + 1) {
    throw std::invalid_argument("EveKnowledge: round_cursor must be |M| or |M|+1");
  }
  if (info_queries().size() != info.size()) {
    throw std::invalid_argument("EveKnowledge: duplicate query in I");
  }
}

bool is_good(const PartyView& view_a, const PartyView& view_b, const EveKnowledge& know) {
  for (const auto& [qa, aa] : view_a.answers) {
    if (view_b.has_query(qa) && !know.knows_query(qa)) return false;
  }
  return true;
}

namespace {

// --- exact enumeration ------------------------------------------------------

struct SimState {
  PartyView view_a, view_b;
  std::map<Bitstring, Bitstring> table;  // I plus branched answers
  int weight_exp = 0;
};

class Enumerator {
 public:
  Enumerator(const ProtocolDef& def, const EveKnowledge& know, std::vector<ExecEntry>& out)
      : def_(def), know_(know), out_(out), action_cap_(4 * def.query_bound + 16) {}

  void run(const BitTape& tape_a, const BitTape& tape_b) {
    SimState st;
    st.view_a.tape = tape_a;
    st.view_b.tape = tape_b;
    for (const auto& [q, a] : know_.info) st.table.emplace(q, a);
    round(1, std::move(st));
  }

 private:
  void emit(SimState st) {
    ExecEntry e;
    e.good = is_good(st.view_a, st.view_b, know_);
    e.view_a = std::move(st.view_a);
    e.view_b = std::move(st.view_b);
    e.weight_exp = st.weight_exp + def_.tape_len_a + def_.tape_len_b;
    out_.push_back(std::move(e));
  }

  void round(int r, SimState st) {
    if (r > know_.round_cursor) {
      emit(std::move(st));
      return;
    }
    step(r, std::move(st), 0);
  }

  // Drives the acting party's action loop for round r; `actions` counts
  // steps taken so far in this round (the loop resumes after each branch).
  void step(int r, SimState st, int actions) {
    bool alice_acts = (r % 2 == 1);
    const NextFn& next = alice_acts ? def_.next_a : def_.next_b;
    int msgs = static_cast<int>(know_.transcript.size());

    while (true) {
      if (++actions > action_cap_) {
        throw std::runtime_error("enumerate: non-terminating round " + std::to_string(r));
      }
      PartyView& actor = alice_acts ? st.view_a : st.view_b;
      Action act = next(actor);

      if (act.kind == Action::Kind::send) {
        if (r <= msgs) {
          if (act.message != know_.transcript[r - 1]) return;  // prune
          PartyView& other = alice_acts ? st.view_b : st.view_a;
          other.received.push_back(act.message);
          round(r + 1, std::move(st));
        } else {
          emit(std::move(st));  // cursor round: stop before the pending send
        }
        return;
      }

      if (actor.answer_for(act.query)) continue;  // re-ask, no-op
      if (static_cast<int>(actor.answers.size()) >= def_.query_bound) {
        throw std::runtime_error("enumerate: query bound exceeded");
      }
      auto it = st.table.find(act.query);
      if (it != st.table.end()) {
        actor.answers.emplace_back(act.query, it->second);
        continue;
      }
      // Fresh oracle point: branch over every possible answer.
      uint64_t width = 1ull << def_.oracle.ell;
      for (uint64_t a = 0; a < width; ++a) {
        SimState branch = st;
        Bitstring ans(def_.oracle.ell, a);
        branch.table.emplace(act.query, ans);
        (alice_acts ? branch.view_a : branch.view_b).answers.emplace_back(act.query, ans);
        branch.weight_exp += def_.oracle.ell;
        step(r, std::move(branch), actions);
      }
      return;
    }
  }

  const ProtocolDef& def_;
  const EveKnowledge& know_;
  std::vector<ExecEntry>& out_;
  int action_cap_;
};

void check_budget(const ProtocolDef& def, int bit_budget) {
  uint64_t slots = 2ull * def.query_bound;
  if (auto legal = def.oracle.legal_count()) slots = std::min<uint64_t>(slots, *legal);
  uint64_t bits = static_cast<uint64_t>(def.tape_len_a) + def.tape_len_b +
                  static_cast<uint64_t>(def.oracle.ell) * slots;
  if (bits > static_cast<uint64_t>(bit_budget) || bit_budget > 30) {
    throw BudgetExceeded("enumeration needs " + std::to_string(bits) + " bits, budget " +
                         std::to_string(bit_budget));
  }
}

Rat dyadic_total(const std::vector<ExecEntry>& entries, bool good_only = false) {
  int max_exp = 0;
  for (const auto& e : entries) max_exp = std::max(max_exp, e.weight_exp);
  BigInt num = 0;
  for (const auto& e : entries) {
    if (good_only && !e.good) continue;
    num += BigInt(1) << (max_exp - e.weight_exp);
  }
  return Rat(num, BigInt(1) << max_exp);
}

}  // namespace

WeightedExecutionSet enumerate_exec(const ProtocolDef& def, const EveKnowledge& know,
                                    int bit_budget) {
  def.validate();
  know.validate();
  check_budget(def, bit_budget);
  if (static_cast<int>(know.transcript.size()) > def.round_count ||
      know.round_cursor > def.round_count) {
    throw std::invalid_argument("enumerate: knowledge extends past the protocol");
  }

  WeightedExecutionSet set;
  set.kind = SetKind::exact;
  Enumerator en(def, know, set.entries);
  for (uint64_t ta = 0; ta < (1ull << def.tape_len_a); ++ta) {
    for (uint64_t tb = 0; tb < (1ull << def.tape_len_b); ++tb) {
      en.run(BitTape::from_index(def.tape_len_a, ta), BitTape::from_index(def.tape_len_b, tb));
    }
  }
  if (set.entries.empty()) throw EmptySupport("EXEC(M,I) has empty support");
  set.total = dyadic_total(set.entries);
  return set;
}

std::pair<WeightedExecutionSet, BeliefDiagnostics> enumerate_gexec(const ProtocolDef& def,
                                                                   const EveKnowledge& know,
                                                                   int bit_budget) {
  WeightedExecutionSet exec = enumerate_exec(def, know, bit_budget);
  BeliefDiagnostics diag;
  Rat good = dyadic_total(exec.entries, /*good_only=*/true);
  diag.pr_good = good / exec.total;
  diag.bad_flag = diag.pr_good < Rat(1, 2);
  if (good == 0) throw GoodSupportEmpty("Pr[Good(M,I)] = 0");

  WeightedExecutionSet gexec;
  gexec.kind = SetKind::exact;
  gexec.conditioned_on_good = true;
  for (auto& e : exec.entries) {
    if (e.good) gexec.entries.push_back(std::move(e));
  }
  gexec.total = good;
  return {std::move(gexec), diag};
}

Rat WeightedExecutionSet::weight(size_t i) const {
  if (kind == SetKind::sampled) return Rat(1, static_cast<long>(entries.size()));
  return pow2_inv(entries[i].weight_exp) / total;
}

Rat WeightedExecutionSet::good_mass() const {
  if (entries.empty()) throw EmptySupport("good_mass of empty set");
  if (kind == SetKind::sampled) {
    long good = static_cast<long>(std::count_if(entries.begin(), entries.end(),
                                                [](const ExecEntry& e) { return e.good; }));
    return Rat(good, static_cast<long>(entries.size()));
  }
  return dyadic_total(entries, /*good_only=*/true) / total;
}

namespace {

// One joint co-simulation attempt against a concrete oracle; nullopt when
// the produced transcript diverges from M.
std::optional<std::pair<PartyView, PartyView>> simulate_joint(const ProtocolDef& def,
                                                              const EveKnowledge& know,
                                                              LazyOracle& oracle,
                                                              const BitTape& tape_a,
                                                              const BitTape& tape_b) {
  PartyView va, vb;
  va.tape = tape_a;
  vb.tape = tape_b;
  int msgs = static_cast<int>(know.transcript.size());
  int action_cap = 4 * def.query_bound + 16;

  for (int r = 1; r <= know.round_cursor; ++r) {
    bool alice_acts = (r % 2 == 1);
    PartyView& actor = alice_acts ? va : vb;
    PartyView& other = alice_acts ? vb : va;
    const NextFn& next = alice_acts ? def.next_a : def.next_b;
    int actions = 0;
    while (true) {
      if (++actions > action_cap) throw std::runtime_error("simulate: non-terminating round");
      Action act = next(actor);
      if (act.kind == Action::Kind::send) {
        if (r <= msgs) {
          if (act.message != know.transcript[r - 1]) return std::nullopt;
          other.received.push_back(act.message);
        }
        break;  // cursor round stops before the pending send
      }
      if (actor.answer_for(act.query)) continue;
      if (static_cast<int>(actor.answers.size()) >= def.query_bound) {
        throw std::runtime_error("simulate: query bound exceeded");
      }
      actor.answers.emplace_back(act.query,
                                 oracle.query(alice_acts ? Identity::alice : Identity::bob,
                                              act.query));
    }
  }
  return std::make_pair(std::move(va), std::move(vb));
}

}  // namespace

WeightedExecutionSet sample_gexec(const ProtocolDef& def, const EveKnowledge& know, int count,
                                  uint64_t seed, int max_rejects) {
  def.validate();
  know.validate();
  if (count < 1) throw std::invalid_argument("sample_gexec: count >= 1");

  WeightedExecutionSet set;
  set.kind = SetKind::sampled;
  set.conditioned_on_good = true;

  int consecutive = 0;
  uint64_t attempt = 0;
  while (static_cast<int>(set.entries.size()) < count) {
    uint64_t attempt_seed = mix_seed(seed, attempt++);
    Rng rng = make_rng(attempt_seed);
    BitTape ta = BitTape::random(def.tape_len_a, rng);
    BitTape tb = BitTape::random(def.tape_len_b, rng);
    LazyOracle oracle =
        LazyOracle::from_constraints(def.oracle, know.info, mix_seed(attempt_seed, 0x0a));

    auto views = simulate_joint(def, know, oracle, ta, tb);
    bool accept = views && is_good(views->first, views->second, know);
    if (!accept) {
      if (++consecutive >= max_rejects) {
        throw SupportTooThin("sample_gexec: " + std::to_string(max_rejects) +
                             " consecutive rejections");
      }
      continue;
    }
    consecutive = 0;
    ExecEntry e;
    e.view_a = std::move(views->first);
    e.view_b = std::move(views->second);
    e.good = true;
    set.entries.push_back(std::move(e));
  }
  set.total = 1;
  return set;
}

namespace {

template <typename Fn>
void for_each_entry_query(const ExecEntry& e, Fn&& fn) {
  for (const auto& [q, a] : e.view_a.answers) fn(q);
  for (const auto& [q, a] : e.view_b.answers) {
    if (!e.view_a.has_query(q)) fn(q);
  }
}

}  // namespace

Rat query_mass(const WeightedExecutionSet& dist, const Bitstring& q) {
  if (dist.entries.empty()) throw EmptySupport("query_mass of empty distribution");
  Rat mass = 0;
  for (size_t i = 0; i < dist.entries.size(); ++i) {
    const ExecEntry& e = dist.entries[i];
    if (e.view_a.has_query(q) || e.view_b.has_query(q)) mass += dist.weight(i);
  }
  return mass;
}

std::vector<Bitstring> heavy_queries(const WeightedExecutionSet& dist, const Rat& threshold) {
  if (threshold <= 0 || threshold > 1) {
    throw std::invalid_argument("heavy_queries: threshold in (0,1]");
  }
  std::vector<Bitstring> out;
  for (const auto& [q, m] : all_query_masses(dist)) {
    if (m > threshold) out.push_back(q);
  }
  return out;
}

std::vector<std::pair<Bitstring, Rat>> all_query_masses(const WeightedExecutionSet& dist) {
  std::map<Bitstring, Rat> mass;
  for (size_t i = 0; i < dist.entries.size(); ++i) {
    Rat w = dist.weight(i);
    for_each_entry_query(dist.entries[i], [&](const Bitstring& q) { mass[q] += w; });
  }
  return {mass.begin(), mass.end()};  // map order is lexicographic
}

size_t sample_entry_index(const WeightedExecutionSet& dist, Rng& rng) {
  if (dist.entries.empty()) throw EmptySupport("sample_entry_index of empty set");
  if (dist.kind == SetKind::sampled) {
    return std::uniform_int_distribution<size_t>(0, dist.entries.size() - 1)(rng);
  }
  int max_exp = 0;
  for (const auto& e : dist.entries) max_exp = std::max(max_exp, e.weight_exp);
  BigInt total = 0;
  for (const auto& e : dist.entries) total += BigInt(1) << (max_exp - e.weight_exp);
  BigInt draw = uniform_bigint(rng, total);
  for (size_t i = 0; i < dist.entries.size(); ++i) {
    BigInt w = BigInt(1) << (max_exp - dist.entries[i].weight_exp);
    if (draw < w) return i;
    draw -= w;
  }
  return dist.entries.size() - 1;  // unreachable
}

// --- consistency ------------------------------------------------------------

namespace {

// Replays one party's deterministic logic against its tape and recorded
// answers; true iff it reproduces the view's receive/answer structure and
// the transcript prefix in `know`.
bool replay_party(const ProtocolDef& def, bool is_alice, const PartyView& view,
                  const EveKnowledge& know) {
  int msgs = static_cast<int>(know.transcript.size());
  // At the cut every message of the other party's parity has been
  // delivered, so the received list is dictated exactly by the transcript.
  std::vector<Message> expected;
  for (int r = is_alice ? 2 : 1; r <= msgs; r += 2) expected.push_back(know.transcript[r - 1]);
  if (view.received != expected) return false;

  PartyView replay;
  replay.tape = view.tape;
  size_t consumed = 0;
  int action_cap = 4 * def.query_bound + 16;
  const NextFn& next = is_alice ? def.next_a : def.next_b;

  for (int r = is_alice ? 1 : 2; r <= know.round_cursor; r += 2) {
    size_t needed = static_cast<size_t>(is_alice ? (r - 1) / 2 : r / 2);
    while (replay.received.size() < needed) {
      replay.received.push_back(view.received[replay.received.size()]);
    }
    int actions = 0;
    while (true) {
      if (++actions > action_cap) return false;
      Action act = next(replay);
      if (act.kind == Action::Kind::send) {
        if (r <= msgs && act.message != know.transcript[r - 1]) return false;
        break;  // the cursor round stops at its pending send
      }
      if (replay.answer_for(act.query)) continue;
      if (consumed >= view.answers.size()) return false;  // view cut short
      if (view.answers[consumed].first != act.query) return false;
      replay.answers.push_back(view.answers[consumed]);
      ++consumed;
    }
  }
  return consumed == view.answers.size();
}

}  // namespace

bool is_consistent(const ProtocolDef& def, const PartyView& view_a, const PartyView& view_b,
                   const EveKnowledge& know) {
  // Shared queries must carry equal answers across {A, B, I}.
  for (const auto& [q, a] : view_a.answers) {
    if (auto other = view_b.answer_for(q); other && *other != a) return false;
    if (auto iv = know.info_answer(q); iv && *iv != a) return false;
  }
  for (const auto& [q, a] : view_b.answers) {
    if (auto iv = know.info_answer(q); iv && *iv != a) return false;
  }
  return replay_party(def, true, view_a, know) && replay_party(def, false, view_b, know);
}

// --- incremental belief state ----------------------------------------------

BeliefState::BeliefState(const ProtocolDef& def, EveKnowledge know, int bit_budget)
    : def_(&def), know_(std::move(know)) {
  WeightedExecutionSet exec = enumerate_exec(def, know_, bit_budget);
  entries_ = std::move(exec.entries);
}

BeliefDiagnostics BeliefState::diagnostics() const {
  BeliefDiagnostics diag;
  diag.pr_good = dyadic_total(entries_, true) / dyadic_total(entries_);
  diag.bad_flag = diag.pr_good < Rat(1, 2);
  return diag;
}

WeightedExecutionSet BeliefState::exec_set() const {
  WeightedExecutionSet set;
  set.kind = SetKind::exact;
  set.entries = entries_;
  set.total = dyadic_total(entries_);
  return set;
}

WeightedExecutionSet BeliefState::gexec_set() const {
  WeightedExecutionSet set;
  set.kind = SetKind::exact;
  set.conditioned_on_good = true;
  for (const auto& e : entries_) {
    if (e.good) set.entries.push_back(e);
  }
  if (set.entries.empty()) throw GoodSupportEmpty("Pr[Good(M,I)] = 0");
  set.total = dyadic_total(set.entries);
  return set;
}

std::vector<std::pair<Bitstring, Rat>> BeliefState::good_query_masses() const {
  int max_exp = 0;
  for (const auto& e : entries_) max_exp = std::max(max_exp, e.weight_exp);
  BigInt good_total = 0;
  std::map<Bitstring, BigInt> acc;
  for (const auto& e : entries_) {
    if (!e.good) continue;
    BigInt w = BigInt(1) << (max_exp - e.weight_exp);
    good_total += w;
    for_each_entry_query(e, [&](const Bitstring& q) {
      if (!know_.knows_query(q)) acc[q] += w;
    });
  }
  if (good_total == 0) throw GoodSupportEmpty("Pr[Good(M,I)] = 0");
  std::vector<std::pair<Bitstring, Rat>> out;
  out.reserve(acc.size());
  for (const auto& [q, num] : acc) out.emplace_back(q, Rat(num, good_total));
  return out;
}

void BeliefState::observe_eve_query(const Bitstring& q, const Bitstring& answer) {
  if (know_.knows_query(q)) throw std::invalid_argument("observe_eve_query: query already in I");
  know_.info.emplace_back(q, answer);

  std::vector<ExecEntry> kept;
  kept.reserve(entries_.size());
  for (auto& e : entries_) {
    std::optional<Bitstring> held = e.view_a.answer_for(q);
    if (!held) held = e.view_b.answer_for(q);
    if (held) {
      if (*held != answer) continue;  // contradicts the true oracle
      e.weight_exp -= def_->oracle.ell;  // answer is now fixed by I, not branched
    }
    kept.push_back(std::move(e));
  }
  entries_ = std::move(kept);
  if (entries_.empty()) throw EmptySupport("EXEC(M,I) emptied by observation");
  refresh_good_flags();
}

void BeliefState::refresh_good_flags() {
  for (auto& e : entries_) e.good = is_good(e.view_a, e.view_b, know_);
}

}  // namespace romlab
