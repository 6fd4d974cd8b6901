#pragma once

#include <cstdint>
#include <vector>

#include "ltm/network.hpp"
#include "ltm/statistics.hpp"

namespace ltm {

/// A configuration-model draw together with the seed that produced it;
/// re-running the sampler with the same (statistics, n, seed) reproduces
/// the wiring bit for bit.
struct EnsembleSample {
  Network net;
  std::uint64_t seed = 0;
};

/// Directed configuration model: designed degree/threshold/state vectors
/// realizing the statistics exactly, out-stub h wired to in-stub pi(h) for
/// a uniform permutation pi.  Parallel links and self-loops are kept.
/// Throws std::invalid_argument when (stats, n) are incompatible.
EnsembleSample sample_directed_cm(const NetworkStatistics& stats, std::int64_t n,
                                  std::uint64_t seed);

/// Undirected configuration model: consecutive permuted stubs are paired
/// into undirected edges, stored as reciprocal directed links.  Requires an
/// even stub total.
EnsembleSample sample_undirected_cm(const UndirectedStatistics& stats, std::int64_t n,
                                    std::uint64_t seed);

/// Two-stage branching-process tree truncated at a given depth: the root's
/// (out-degree, threshold, state) triple follows p_{k,r,s}, every other
/// node's follows q_{k,r,s}.  Children of node v sit in the index range
/// [first_child[v], first_child[v] + child_count[v]); nodes are in BFS
/// order.
struct BranchingTree {
  std::vector<std::uint32_t> k, r, depth;
  std::vector<std::uint8_t> s;
  std::vector<std::uint64_t> first_child;
  std::vector<std::uint32_t> child_count;
  std::uint32_t truncation_depth = 0;
  bool cap_reached = false;

  std::size_t size() const { return k.size(); }

  /// Root state of the LTM at time t <= truncation_depth, evaluated bottom
  /// up (the root state at time t depends only on thresholds above
  /// generation t and the initial states of generation t).
  std::uint8_t root_state_at(std::uint32_t t) const;
};

BranchingTree sample_branching(const NetworkStatistics& stats, std::uint32_t depth,
                               std::uint64_t seed, std::size_t node_cap = 10'000'000);

/// Monte Carlo estimate of the root-state expectation at time t over
/// independent trees; matches the recursion output y(t).  Trees that hit
/// the node cap are discarded and counted.
struct RootExpectation {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replicas_used = 0;
  std::size_t discarded = 0;
};

RootExpectation branching_root_expectation(const NetworkStatistics& stats, std::uint32_t t,
                                           std::size_t replicas, std::uint64_t seed,
                                           std::size_t node_cap = 10'000'000);

}  // namespace ltm
