#pragma once

#include <functional>

#include "romlab/beliefs.hpp"

namespace romlab {

enum class Backend : int { exact = 0, monte_carlo = 1 };

const char* backend_name(Backend b);

// Parameters of the heavy-query eavesdropper. eps must stay in (0, 1/10];
// the query cap defaults to ceil(n^2 / eps^2) for the protocol's per-party
// bound n.
struct AttackConfig {
  Rat eps = Rat(1, 10);
  uint64_t query_cap = 0;  // 0: use cap_for(n)
  Backend backend = Backend::exact;
  int mc_samples = 2000;   // per heaviness decision (monte_carlo backend)
  int max_rejects = 10000;
  int bit_budget = 24;

  void validate() const;
  uint64_t cap_for(int n) const;
  Rat heavy_threshold(int n) const { return eps / n; }
  Rat gamma(int n) const { return eps / (2 * n); }                 // EXEC-level heaviness
  Rat expected_queries_bound(int n) const { return Rat(4 * n * n) / eps; }
};

struct FailureRecord {
  int round = 0;         // protocol round of the missed query
  int party_index = 0;   // per-party query index (1-based)
  Identity party = Identity::alice;
  Bitstring query;
  bool first = false;
};

struct AttackResult {
  std::vector<std::pair<int, Bitstring>> queries_asked;  // (round tag, query)
  bool intersections_found = false;  // Q(A) cap Q(B) subset of Q(I) at the end
  std::vector<FailureRecord> fail_events;
  bool long_flag = false;            // query cap hit
  std::optional<Bitstring> secret_guess;
  std::optional<bool> bad_ever;      // exact backend only: Pr[Good] < 1/2 seen
  bool degenerate = false;           // Pr[Good] = 0 encountered
  int thin_support_rounds = 0;       // sampler gave up (monte_carlo backend)
  bool secret_match = false;         // guess vs Bob's output, absent==absent
  bool honest_match = false;         // Alice's vs Bob's output, absent==absent

  std::optional<int> first_fail_round() const;
};

// Observer for verification: called at every exact-backend evaluation
// point, with fixed_point set once the per-message heavy-query loop has
// terminated.
struct AttackHooks {
  std::function<void(const BeliefState&, bool fixed_point)> on_state;
};

// One fixed-point pass of the heavy-query rule: while some query outside
// Q(I) has Good-conditioned mass above eps/n, ask the lexicographically
// first one and fold the answer into I. Returns the queries asked.
struct EveLoopState {
  EveKnowledge know;
  uint64_t queries_asked = 0;
  bool long_flag = false;
  bool bad_ever = false;
  int thin_support_rounds = 0;
};

std::vector<Bitstring> eve_heavy_round(EveLoopState& state, const ProtocolDef& def,
                                       const AttackConfig& cfg, LazyOracle& oracle,
                                       uint64_t round_seed, const AttackHooks* hooks = nullptr);

// Full co-execution of the protocol with the heavy-query eavesdropper
// acting after every message, plus secret extraction after Last.
AttackResult eve_heavy_run(const ProtocolDef& def, const AttackConfig& cfg, uint64_t trial_seed,
                           const AttackHooks* hooks = nullptr);

// Draws one joint view pair from GEXEC(M,I) and returns Alice's output.
std::optional<Bitstring> extract_secret(const ProtocolDef& def, const EveKnowledge& know,
                                        Backend backend, uint64_t seed, int bit_budget = 24,
                                        int max_rejects = 10000);

// Sampling baseline: after each message, draws single-party executions of
// the sender consistent with (M, I) and asks the oracle every query that
// appears in them. samples_per_round = ceil(c * n * log2 n), floored at 1.
struct SamplingBaselineConfig {
  int samples_per_round = 0;  // 0: derive from c and n
  double c = 1000.0;
  int max_rejects = 10000;
  Backend extract_backend = Backend::exact;
  int bit_budget = 24;
};

int sampling_baseline_samples(const SamplingBaselineConfig& cfg, int n);

AttackResult eve_sampling_run(const ProtocolDef& def, const SamplingBaselineConfig& cfg,
                              uint64_t trial_seed);

// Naive baseline: asks `budget` uniformly random distinct legal queries
// after the protocol finishes, then guesses whatever the transcript and
// those answers determine (protocol-provided guesser), else nothing.
AttackResult eve_naive_run(const ProtocolDef& def, uint64_t budget, uint64_t trial_seed);

// Ground-truth failure classification: round i fails when its query was
// asked earlier by the other party but is outside Eve's I at that moment.
// know_history[r] holds Q(I) just before round r's query. The earliest
// record is marked first.
std::vector<FailureRecord> classify_failures(const ExecutionTrace& trace,
                                             const std::vector<std::set<Bitstring>>& know_history);

// True iff running the heavy-query eavesdropper on the transcript consumes
// exactly the recorded I: every query she asks is answered from I, in
// order, with no extras left over.
bool eve_replay(const ProtocolDef& def, const EveKnowledge& know, const AttackConfig& cfg);

// is_consistent plus replay-consistency of I against Eve's algorithm.
bool is_consistent_with_eve(const ProtocolDef& def, const PartyView& view_a,
                            const PartyView& view_b, const EveKnowledge& know,
                            const AttackConfig& cfg);

}  // namespace romlab
