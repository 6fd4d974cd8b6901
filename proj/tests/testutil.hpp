#pragma once

// Shared test helpers: an independent naive simulator used as the oracle
// for the exact dynamics (adjacency lists, no layout or validation shared
// with the library), plus seeded random instance generators.

#include <cstdint>
#include <numeric>
#include <vector>

#include "ltm/network.hpp"
#include "ltm/rng.hpp"

namespace ltm::test {

struct NaiveNet {
  std::vector<std::vector<std::uint32_t>> adjacency;  // out-neighbors
  std::vector<std::uint32_t> rho;                     // may exceed out-degree
  std::vector<std::uint8_t> sigma;

  std::size_t size() const { return adjacency.size(); }
};

inline std::vector<std::uint8_t> naive_step(const NaiveNet& net,
                                            const std::vector<std::uint8_t>& z, bool progressive) {
  std::vector<std::uint8_t> next(net.size());
  for (std::size_t i = 0; i < net.size(); ++i) {
    std::uint64_t sum = 0;
    for (std::uint32_t j : net.adjacency[i]) sum += z[j];
    const std::uint64_t threshold = progressive && z[i] ? 0 : net.rho[i];
    next[i] = sum >= threshold ? 1 : 0;
  }
  return next;
}

inline std::vector<std::vector<std::uint8_t>> naive_trajectory(const NaiveNet& net,
                                                               std::uint32_t horizon,
                                                               bool progressive) {
  std::vector<std::vector<std::uint8_t>> states{net.sigma};
  for (std::uint32_t t = 0; t < horizon; ++t)
    states.push_back(naive_step(net, states.back(), progressive));
  return states;
}

inline NaiveNet naive_of(const Network& net) {
  NaiveNet naive;
  naive.adjacency.resize(net.node_count());
  for (NodeId i = 0; i < net.node_count(); ++i)
    for (NodeId j : net.out_neighbors(i)) naive.adjacency[i].push_back(j);
  naive.rho.assign(net.thresholds().begin(), net.thresholds().end());
  naive.sigma = net.initial_states();
  return naive;
}

/// Random multigraph with valid thresholds (0 <= rho_i <= kappa_i) and
/// Bernoulli(state_bias) initial states.
inline Network random_network(SplitMix64& gen, std::size_t max_nodes,
                              double state_bias = 0.5) {
  const std::size_t n = 1 + gen.next_below(max_nodes);
  const std::size_t m = gen.next_below(3 * n + 1);
  std::vector<Edge> edges;
  edges.reserve(m);
  std::vector<std::uint32_t> kappa(n, 0);
  for (std::size_t e = 0; e < m; ++e) {
    const NodeId tail = static_cast<NodeId>(gen.next_below(n));
    const NodeId head = static_cast<NodeId>(gen.next_below(n));
    edges.emplace_back(tail, head);
    ++kappa[tail];
  }
  std::vector<std::uint32_t> rho(n);
  StateVector sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    rho[i] = static_cast<std::uint32_t>(gen.next_below(kappa[i] + 1));
    sigma[i] = gen.next_unit() < state_bias ? 1 : 0;
  }
  return build_network(edges, std::move(rho), std::move(sigma));
}

/// Random undirected tree (reciprocal directed links) with valid thresholds.
inline Network random_tree(SplitMix64& gen, std::size_t nodes) {
  std::vector<Edge> edges;
  std::vector<std::uint32_t> degree(nodes, 0);
  for (std::size_t i = 1; i < nodes; ++i) {
    const NodeId parent = static_cast<NodeId>(gen.next_below(i));
    edges.emplace_back(static_cast<NodeId>(i), parent);
    edges.emplace_back(parent, static_cast<NodeId>(i));
    ++degree[i];
    ++degree[parent];
  }
  std::vector<std::uint32_t> rho(nodes);
  StateVector sigma(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    rho[i] = static_cast<std::uint32_t>(gen.next_below(degree[i] + 1));
    sigma[i] = gen.next_below(2) ? 1 : 0;
  }
  return build_network(edges, std::move(rho), std::move(sigma));
}

/// Complete graph with self-loops; thresholds rho_i = ceil(n * theta_i) for
/// rational theta_i = theta_num[i] / theta_den[i].
inline Network complete_with_self_loops(const std::vector<std::int64_t>& theta_num,
                                        const std::vector<std::int64_t>& theta_den,
                                        const StateVector& sigma) {
  const std::size_t n = theta_num.size();
  std::vector<Edge> edges;
  edges.reserve(n * n);
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = 0; j < n; ++j) edges.emplace_back(i, j);
  std::vector<std::uint32_t> rho(n);
  for (std::size_t i = 0; i < n; ++i)
    rho[i] = static_cast<std::uint32_t>(
        (theta_num[i] * static_cast<std::int64_t>(n) + theta_den[i] - 1) / theta_den[i]);
  return build_network(edges, std::move(rho), StateVector(sigma));
}

}  // namespace ltm::test
