#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ltm {

using NodeId = std::uint32_t;

/// Directed link (tail, head): the tail node observes the head node.
using Edge = std::pair<NodeId, NodeId>;

/// One entry per node, values 0/1.
using StateVector = std::vector<std::uint8_t>;

/// Directed multigraph with per-node integer threshold and initial state.
///
/// Out-adjacency is stored in a compressed-row layout: the out-neighbors of
/// node i, with multiplicity, are heads()[offsets()[i] .. offsets()[i+1]).
/// Parallel links and self-loops are preserved.  Instances are immutable
/// after construction and safe to share across threads.
class Network {
 public:
  Network() = default;

  std::size_t node_count() const { return thresholds_.size(); }
  std::uint64_t link_count() const { return heads_.size(); }

  std::uint32_t out_degree(NodeId i) const {
    return static_cast<std::uint32_t>(offsets_[i + 1] - offsets_[i]);
  }
  std::uint32_t in_degree(NodeId i) const { return in_degrees_[i]; }
  std::uint32_t threshold(NodeId i) const { return thresholds_[i]; }
  std::uint8_t initial_state(NodeId i) const { return initial_states_[i]; }

  std::span<const NodeId> out_neighbors(NodeId i) const {
    return {heads_.data() + offsets_[i], heads_.data() + offsets_[i + 1]};
  }

  std::span<const std::uint64_t> offsets() const { return offsets_; }
  std::span<const NodeId> heads() const { return heads_; }
  const std::vector<std::uint32_t>& in_degrees() const { return in_degrees_; }
  const std::vector<std::uint32_t>& thresholds() const { return thresholds_; }
  const StateVector& initial_states() const { return initial_states_; }

  /// Copy with thresholds replaced; bounds are revalidated.
  Network with_thresholds(std::vector<std::uint32_t> thresholds) const;
  /// Copy with initial states replaced.
  Network with_initial_states(StateVector states) const;

  /// Assembles a network from a ready compressed-row layout.  In-degrees are
  /// derived from the head array; thresholds are validated against
  /// out-degrees.
  static Network from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> heads,
                          std::vector<std::uint32_t> thresholds, StateVector initial_states);

 private:
  std::vector<std::uint64_t> offsets_;  // size node_count()+1
  std::vector<NodeId> heads_;
  std::vector<std::uint32_t> in_degrees_;
  std::vector<std::uint32_t> thresholds_;
  StateVector initial_states_;
};

/// Builds a Network from an edge list.  The node count is the size of the
/// threshold vector; duplicate pairs become parallel links and self-loops
/// are kept.  Throws std::invalid_argument on out-of-range ids or on a
/// threshold exceeding the node's out-degree, naming the offending node.
Network build_network(std::span<const Edge> edges, std::vector<std::uint32_t> thresholds,
                      StateVector initial_states);

/// Number of state-1 out-neighbors of node i, counted with multiplicity.
std::uint64_t neighbor_sum(const Network& net, const StateVector& z, NodeId i);

}  // namespace ltm
