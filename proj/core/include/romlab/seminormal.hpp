#pragma once

#include "romlab/protocol.hpp"

namespace romlab {

// Expands every round into 2n-1 sub-rounds (n = query bound): the round
// owner asks its j-th query of the round at odd sub-round j and sends Bot
// everywhere except the last sub-round, which carries the original message;
// the other party sends Bot at its sub-rounds. Output behaviour and the
// joint output distribution are preserved exactly.
ProtocolDef to_seminormal(const ProtocolDef& def);

struct SeminormalDiagnostics {
  bool ok = true;
  int first_violating_round = 0;  // 0 when ok
  long executions_checked = 0;
  bool exhaustive = false;  // true when all tape pairs were covered

  explicit operator bool() const { return ok; }
};

// Dynamic check that no execution asks more than one query in a round.
// Exhausts tape pairs when they fit in the probe budget, otherwise samples;
// each execution also varies the oracle seed.
SeminormalDiagnostics validate_seminormal(const ProtocolDef& def, int probes = 64,
                                          uint64_t seed = 0x5e111a11);

}  // namespace romlab
