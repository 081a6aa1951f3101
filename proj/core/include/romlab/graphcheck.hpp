#pragma once

#include "romlab/beliefs.hpp"

namespace romlab {

// Weighted bipartite disjointness graph over abstract element sets: an edge
// joins u and v exactly when set(u) and set(v) are disjoint. Weights are
// positive and act as vertex multiplicities.
struct WeightedBipartite {
  struct Vertex {
    Rat weight;
    std::vector<int> elems;  // sorted
  };
  std::vector<Vertex> left, right;

  bool adjacent(size_t u, size_t v) const;  // disjointness of elem sets
  Rat side_weight(bool left_side) const;
  Rat edge_mass() const;  // sum of w_u * w_v over edges
};

// Graph realization of GEXEC(M,I): distinct Alice views on the left with
// weight proportional to alpha_A = 2^-|r_a| * 2^-ell|Q(A)\Q(I)|, distinct
// Bob views on the right with beta_B likewise, and an edge exactly when the
// outside-of-I query sets are disjoint. A random weighted edge reproduces
// GEXEC(M,I) exactly.
struct ExecGraph {
  struct Node {
    PartyView view;
    Rat weight;                      // normalized within the side
    Rat alpha;                       // raw alpha_A / beta_B value
    std::vector<Bitstring> outside;  // S = Q(view) \ Q(I), sorted
  };
  std::vector<Node> left, right;
  Rat eps;                            // epsilon in force for the checks
  std::set<Bitstring> info_queries;   // Q(I)

  bool adjacent(size_t u, size_t v) const;
  Rat edge_mass() const;
  WeightedBipartite to_bipartite() const;
};

ExecGraph build_exec_graph(const ProtocolDef& def, const EveKnowledge& know, int bit_budget = 24,
                           const Rat& eps = Rat(1, 10));

// Pairs (edge, weight) of the random-edge distribution, keyed by view pair;
// equals enumerate_gexec weights exactly.
std::vector<std::pair<std::pair<PartyView, PartyView>, Rat>> random_edge_distribution(
    const ExecGraph& g);

// Minimum over all vertices of the weight of the vertex's neighborhood on
// the opposite side (the weighted analogue of d(u) / |V_R|).
Rat min_relative_degree(const ExecGraph& g);
Rat min_relative_degree(const WeightedBipartite& g);

// Hypothesis: nonempty edge set, no isolated vertex, and for every vertex w
// the edge mass among pairs non-adjacent to w is at most eps * |E|.
// Conclusion: every vertex's relative neighborhood weight is >= 1 - 2 eps.
struct DensityVerdict {
  bool hypothesis_holds = false;
  bool conclusion_holds = false;  // meaningful only when the hypothesis holds
  Rat min_rel_degree = 0;
  std::string witness;  // which vertex broke which side, for diagnostics
};

DensityVerdict check_density_claim(const WeightedBipartite& g, const Rat& eps);

// Every query outside Q(I) has random-edge mass Pr[q in S_u or S_v] at most
// eps/n. Holds by construction at the attack's fixed points.
struct LightnessVerdict {
  bool ok = true;
  std::optional<Bitstring> witness;
  Rat worst_mass = 0;
};

LightnessVerdict verify_lightness(const ExecGraph& g, const Rat& eps, int n);

// Exact statistical distance between the uniform-weight neighbor of right
// vertex v and the degree-proportional neighbor of v.
Rat neighbor_sampling_distance(const ExecGraph& g, size_t right_index);

// Secret-extraction side conditions at a fixed point: for every consistent
// Bob view, the independently drawn Alice view collides with it outside I
// with probability at most eps (claim2); swapping the degree-proportional
// neighbor for the uniform one costs statistical distance at most 2 eps
// (claim3).
struct FindSecretCheck {
  Rat claim2_worst = 0;
  Rat claim3_worst = 0;
  bool ok = true;
};

FindSecretCheck check_find_secret_claims(const ExecGraph& g, const Rat& eps);

// Seeded random weighted disjointness graphs for property-testing the
// abstract density claim.
WeightedBipartite random_disjointness_graph(uint64_t seed);

}  // namespace romlab
