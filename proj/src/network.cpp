#include "ltm/network.hpp"

#include <stdexcept>
#include <string>

namespace ltm {

namespace {

std::vector<std::uint32_t> derive_in_degrees(std::size_t n, std::span<const NodeId> heads) {
  std::vector<std::uint32_t> in(n, 0);
  for (NodeId head : heads) ++in[head];
  return in;
}

void validate_thresholds(std::span<const std::uint64_t> offsets,
                         std::span<const std::uint32_t> thresholds) {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const std::uint64_t kappa = offsets[i + 1] - offsets[i];
    if (thresholds[i] > kappa) {
      throw std::invalid_argument("threshold " + std::to_string(thresholds[i]) +
                                  " exceeds out-degree " + std::to_string(kappa) + " of node " +
                                  std::to_string(i));
    }
  }
}

}  // namespace

Network Network::from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> heads,
                          std::vector<std::uint32_t> thresholds, StateVector initial_states) {
  const std::size_t n = thresholds.size();
  if (offsets.size() != n + 1 || offsets.front() != 0 || offsets.back() != heads.size())
    throw std::invalid_argument("malformed adjacency offsets");
  if (initial_states.size() != n)
    throw std::invalid_argument("initial state vector length does not match node count");
  for (NodeId head : heads)
    if (head >= n)
      throw std::invalid_argument("head id " + std::to_string(head) + " out of range");
  validate_thresholds(offsets, thresholds);

  Network net;
  net.offsets_ = std::move(offsets);
  net.heads_ = std::move(heads);
  net.in_degrees_ = derive_in_degrees(n, net.heads_);
  net.thresholds_ = std::move(thresholds);
  net.initial_states_ = std::move(initial_states);
  return net;
}

Network build_network(std::span<const Edge> edges, std::vector<std::uint32_t> thresholds,
                      StateVector initial_states) {
  const std::size_t n = thresholds.size();
  std::vector<std::uint64_t> offsets(n + 1, 0);
  for (const auto& [tail, head] : edges) {
    if (tail >= n || head >= n)
      throw std::invalid_argument("edge (" + std::to_string(tail) + "," + std::to_string(head) +
                                  ") references a node id out of range (n=" + std::to_string(n) +
                                  ")");
    ++offsets[tail + 1];
  }
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];

  std::vector<NodeId> heads(edges.size());
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [tail, head] : edges) heads[cursor[tail]++] = head;

  return Network::from_csr(std::move(offsets), std::move(heads), std::move(thresholds),
                           std::move(initial_states));
}

Network Network::with_thresholds(std::vector<std::uint32_t> thresholds) const {
  if (thresholds.size() != node_count())
    throw std::invalid_argument("threshold vector length does not match node count");
  validate_thresholds(offsets_, thresholds);
  Network net(*this);
  net.thresholds_ = std::move(thresholds);
  return net;
}

Network Network::with_initial_states(StateVector states) const {
  if (states.size() != node_count())
    throw std::invalid_argument("state vector length does not match node count");
  Network net(*this);
  net.initial_states_ = std::move(states);
  return net;
}

std::uint64_t neighbor_sum(const Network& net, const StateVector& z, NodeId i) {
  if (i >= net.node_count())
    throw std::invalid_argument("node id " + std::to_string(i) + " out of range");
  std::uint64_t sum = 0;
  for (NodeId j : net.out_neighbors(i)) sum += z[j];
  return sum;
}

}  // namespace ltm
