#pragma once

#include <set>
#include <stdexcept>
#include <utility>

#include "romlab/protocol.hpp"

namespace romlab {

// Eavesdropper knowledge: observed transcript M, recorded query/answer
// pairs I (in acquisition order), and the cut point the knowledge refers
// to. round_cursor counts protocol rounds whose queries are part of the
// conditional state; it is |M| while the eavesdropper evaluates after a
// message and |M|+1 when the next acting party's queries are included.
struct EveKnowledge {
  std::vector<Message> transcript;
  std::vector<QueryAnswer> info;
  int round_cursor = 0;

  std::set<Bitstring> info_queries() const;
  bool knows_query(const Bitstring& q) const;
  std::optional<Bitstring> info_answer(const Bitstring& q) const;
  void validate() const;  // cursor range, no duplicate queries in I
};

// Every intersection query of the two views lies in Q(I).
bool is_good(const PartyView& view_a, const PartyView& view_b, const EveKnowledge& know);

// Shared queries among {A, B, I} agree everywhere, and both views replay
// to exactly the recorded transcript prefix at the knowledge's cut point.
bool is_consistent(const ProtocolDef& def, const PartyView& view_a, const PartyView& view_b,
                   const EveKnowledge& know);

struct ExecEntry {
  PartyView view_a;
  PartyView view_b;
  int weight_exp = 0;  // raw weight 2^-weight_exp (exact backend)
  bool good = false;
};

enum class SetKind { exact, sampled };

// EXEC(M,I) or GEXEC(M,I) over joint view pairs. Exact sets carry dyadic
// raw weights that normalize to rationals summing to exactly 1; sampled
// sets hold equally weighted accepted draws.
struct WeightedExecutionSet {
  SetKind kind = SetKind::exact;
  bool conditioned_on_good = false;
  std::vector<ExecEntry> entries;
  Rat total = 0;  // sum of raw weights (exact backend)

  size_t size() const { return entries.size(); }
  Rat weight(size_t i) const;
  Rat good_mass() const;  // fraction of normalized weight on good entries
};

struct BeliefDiagnostics {
  Rat pr_good = 0;        // Pr[Good(M,I)] under EXEC(M,I)
  bool bad_flag = false;  // pr_good < 1/2
};

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptySupport : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Pr[Good(M,I)] = 0: the conditioned distribution does not exist.
struct GoodSupportEmpty : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The rejection sampler exceeded its consecutive-reject budget.
struct SupportTooThin : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact EXEC(M,I) by forward co-simulation over all tape pairs, branching
// on every fresh oracle answer not fixed by I or an earlier branch and
// pruning branches whose transcript diverges from M.
WeightedExecutionSet enumerate_exec(const ProtocolDef& def, const EveKnowledge& know,
                                    int bit_budget = 24);

// EXEC conditioned on Good and renormalized, plus exact diagnostics.
std::pair<WeightedExecutionSet, BeliefDiagnostics> enumerate_gexec(const ProtocolDef& def,
                                                                   const EveKnowledge& know,
                                                                   int bit_budget = 24);

// Rejection sampling from GEXEC(M,I): fresh tapes and a fresh oracle
// constrained by I, accepted when the transcript reproduces M and the pair
// is good. Throws SupportTooThin after max_rejects consecutive rejections.
WeightedExecutionSet sample_gexec(const ProtocolDef& def, const EveKnowledge& know, int count,
                                  uint64_t seed, int max_rejects = 10000);

// Total weight of entries in which q was asked by either party.
Rat query_mass(const WeightedExecutionSet& dist, const Bitstring& q);

// All queries with mass strictly above threshold, lexicographically sorted.
std::vector<Bitstring> heavy_queries(const WeightedExecutionSet& dist, const Rat& threshold);

// Mass of every query occurring in the distribution, lexicographically
// sorted.
std::vector<std::pair<Bitstring, Rat>> all_query_masses(const WeightedExecutionSet& dist);

// Draws an entry index with probability equal to its normalized weight.
size_t sample_entry_index(const WeightedExecutionSet& dist, Rng& rng);

// Exact belief state with incremental conditioning, used by the attack
// loop: adding (q, answer) to I filters and reweights the existing support
// instead of re-enumerating. Equivalent to a fresh enumeration.
class BeliefState {
 public:
  BeliefState(const ProtocolDef& def, EveKnowledge know, int bit_budget = 24);

  const EveKnowledge& knowledge() const { return know_; }
  BeliefDiagnostics diagnostics() const;
  WeightedExecutionSet exec_set() const;
  WeightedExecutionSet gexec_set() const;  // throws GoodSupportEmpty

  // Good-conditioned masses of queries outside Q(I), lexicographically
  // sorted. Throws GoodSupportEmpty when Pr[Good] = 0.
  std::vector<std::pair<Bitstring, Rat>> good_query_masses() const;

  void observe_eve_query(const Bitstring& q, const Bitstring& answer);

 private:
  void refresh_good_flags();

  const ProtocolDef* def_;
  EveKnowledge know_;
  std::vector<ExecEntry> entries_;
};

}  // namespace romlab
