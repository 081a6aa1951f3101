#pragma once

#include <cstdint>
#include <map>
#include <optional>

#include "romlab/protocol.hpp"

namespace romlab {

NaiveGuessFn merkle_naive_guess(int k, int ell);

struct MerkleParams {
  int k = 2;        // puzzles per party
  uint64_t m = 4;   // puzzle domain size, values 1..m
  int ell = 2;      // oracle bit length, m <= 2^ell

  void validate() const;
  int bits_per_draw() const;  // ceil(log2 m)
  int tape_len() const;       // per party, includes resampling slack for non-power-of-two m
  static MerkleParams scaled(int n_prime);  // k = 2n', m = n'^2, minimal ell
};

// Reads the i-th (0-based) puzzle value in [1, m] from the tape.
uint64_t merkle_draw(const BitTape& tape, const MerkleParams& p, int index);
std::vector<uint64_t> merkle_draws(const BitTape& tape, const MerkleParams& p);

// Merkle's key exchange: each party sends the H-images of k random domain
// values; both pick the lexicographically first index pair (i, j) with
// a_i = b_j and output the matching preimage value. No collision, no output.
ProtocolDef merkle_protocol(const MerkleParams& p);

// Exact probability that two independent k-draw multisets from [m] share at
// least one value, by summing over the distribution of Alice's distinct set.
Rat merkle_collision_probability(int k, uint64_t m);

// One hidden bit behind an oracle image: Alice picks x in {0^ell, 1^ell},
// publishes H(x); Bob queries 1^ell. The canonical example of Alice/Bob
// dependence surviving the transcript.
ProtocolDef hiddenbit_protocol(int ell = 1);

// Both parties query the same fixed point; the shared answer is the secret.
ProtocolDef fixedquery_protocol(int ell = 2);

// No oracle use at all; fixed messages, constant outputs.
ProtocolDef noquery_protocol();

// Named protocol lookup used by the CLI and the verification corpus.
ProtocolDef make_protocol(const std::string& name, const MerkleParams& merkle);

}  // namespace romlab
