#include "ltm/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ltm/parallel.hpp"
#include "ltm/rng.hpp"

namespace ltm {

namespace {

struct DesignedVectors {
  std::vector<std::uint32_t> in_degree, out_degree, threshold;
  StateVector state;
  std::uint64_t links = 0;
};

// Materializes the statistics as per-node attribute vectors in cell order
// (any fixed assignment yields the same ensemble law; node-id order keeps
// samples reproducible).
DesignedVectors design_vectors(const NetworkStatistics& stats, std::int64_t n) {
  const CompatibilityReport report = check_compatibility(stats, n);
  if (!report.compatible) {
    std::string message = "statistics incompatible with n = " + std::to_string(n);
    for (const std::string& violation : report.violations) message += "; " + violation;
    throw std::invalid_argument(message);
  }
  DesignedVectors design;
  design.in_degree.reserve(n);
  for (const auto& [key, p] : stats.joint) {
    const std::int64_t count = std::llround(p * static_cast<double>(n));
    for (std::int64_t c = 0; c < count; ++c) {
      design.in_degree.push_back(key.d);
      design.out_degree.push_back(key.k);
      design.threshold.push_back(key.r);
      design.state.push_back(key.s);
      design.links += key.d;
    }
  }
  if (static_cast<std::int64_t>(design.in_degree.size()) != n)
    throw std::invalid_argument("statistics cells do not round to n nodes");
  return design;
}

}  // namespace

EnsembleSample sample_directed_cm(const NetworkStatistics& stats, std::int64_t n,
                                  std::uint64_t seed) {
  DesignedVectors design = design_vectors(stats, n);
  const std::uint64_t l = design.links;

  // In-stub owners nu in node-id order.
  std::vector<NodeId> in_owner;
  in_owner.reserve(l);
  for (std::size_t i = 0; i < design.in_degree.size(); ++i)
    for (std::uint32_t c = 0; c < design.in_degree[i]; ++c)
      in_owner.push_back(static_cast<NodeId>(i));

  // Out-stubs are consecutive per node, so the permuted in-stub owners land
  // directly in the compressed-row head array.
  SplitMix64 gen(seed);
  std::vector<std::uint64_t> pi(l);
  std::iota(pi.begin(), pi.end(), 0);
  shuffle(pi, gen);

  std::vector<std::uint64_t> offsets(design.out_degree.size() + 1, 0);
  for (std::size_t i = 0; i < design.out_degree.size(); ++i)
    offsets[i + 1] = offsets[i] + design.out_degree[i];
  std::vector<NodeId> heads(l);
  for (std::uint64_t h = 0; h < l; ++h) heads[h] = in_owner[pi[h]];

  EnsembleSample sample;
  sample.seed = seed;
  sample.net = Network::from_csr(std::move(offsets), std::move(heads),
                                 std::move(design.threshold), std::move(design.state));
  return sample;
}

EnsembleSample sample_undirected_cm(const UndirectedStatistics& stats, std::int64_t n,
                                    std::uint64_t seed) {
  if (n <= 0) throw std::invalid_argument("network size must be positive");
  std::vector<std::uint32_t> degree, threshold;
  StateVector state;
  std::uint64_t stub_total = 0;
  for (const auto& [key, u] : stats.u) {
    const std::int64_t count = std::llround(u * static_cast<double>(n));
    if (std::abs(u * static_cast<double>(n) - static_cast<double>(count)) > 1e-6)
      throw std::invalid_argument("undirected statistics not integral at n = " +
                                  std::to_string(n));
    if (key.r > key.k) throw std::invalid_argument("undirected cell has threshold above degree");
    for (std::int64_t c = 0; c < count; ++c) {
      degree.push_back(key.k);
      threshold.push_back(key.r);
      state.push_back(key.s);
      stub_total += key.k;
    }
  }
  if (static_cast<std::int64_t>(degree.size()) != n)
    throw std::invalid_argument("undirected statistics cells do not round to n nodes");
  if (stub_total % 2 != 0)
    throw std::invalid_argument("undirected statistics give an odd stub total");

  std::vector<NodeId> owner;
  owner.reserve(stub_total);
  for (std::size_t i = 0; i < degree.size(); ++i)
    for (std::uint32_t c = 0; c < degree[i]; ++c) owner.push_back(static_cast<NodeId>(i));

  SplitMix64 gen(seed);
  std::vector<std::uint64_t> pi(stub_total);
  std::iota(pi.begin(), pi.end(), 0);
  shuffle(pi, gen);

  // Each stub carries exactly one outgoing link of its owner, so out-degrees
  // equal the designed degrees and the adjacency is symmetric.
  std::vector<std::uint64_t> offsets(degree.size() + 1, 0);
  for (std::size_t i = 0; i < degree.size(); ++i) offsets[i + 1] = offsets[i] + degree[i];
  std::vector<std::uint64_t> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<NodeId> heads(stub_total);
  for (std::uint64_t h = 0; h + 1 < stub_total; h += 2) {
    const NodeId a = owner[pi[h]];
    const NodeId b = owner[pi[h + 1]];
    heads[cursor[a]++] = b;
    heads[cursor[b]++] = a;
  }

  EnsembleSample sample;
  sample.seed = seed;
  sample.net =
      Network::from_csr(std::move(offsets), std::move(heads), std::move(threshold), std::move(state));
  return sample;
}

namespace {

// Inverse-CDF sampler over (k,r,s) cells.
struct AttributeSampler {
  std::vector<KrsKey> keys;
  std::vector<double> cumulative;

  explicit AttributeSampler(const std::map<KrsKey, double>& law) {
    double total = 0.0;
    for (const auto& [key, w] : law) {
      if (w <= 0.0) continue;
      total += w;
      keys.push_back(key);
      cumulative.push_back(total);
    }
    if (keys.empty()) throw std::invalid_argument("attribute law has no mass");
    cumulative.back() = std::max(cumulative.back(), 1.0);
  }

  KrsKey draw(SplitMix64& gen) const {
    const double u = gen.next_unit();
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    const std::size_t idx = std::min<std::size_t>(it - cumulative.begin(), keys.size() - 1);
    return keys[idx];
  }
};

}  // namespace

BranchingTree sample_branching(const NetworkStatistics& stats, std::uint32_t depth,
                               std::uint64_t seed, std::size_t node_cap) {
  const AttributeSampler root_law(stats.p_krs);
  // Networks without links have no q-law; they only ever produce the root.
  const bool has_links = !stats.q_krs.empty();

  BranchingTree tree;
  tree.truncation_depth = depth;
  SplitMix64 gen(seed);

  const KrsKey root = root_law.draw(gen);
  tree.k.push_back(root.k);
  tree.r.push_back(root.r);
  tree.s.push_back(root.s);
  tree.depth.push_back(0);
  tree.first_child.push_back(0);
  tree.child_count.push_back(0);

  if (!has_links) return tree;
  const AttributeSampler child_law(stats.q_krs);

  std::size_t cursor = 0;
  while (cursor < tree.size()) {
    if (tree.depth[cursor] >= depth) break;  // BFS order: all deeper nodes follow
    const std::uint32_t children = tree.k[cursor];
    if (tree.size() + children > node_cap) {
      tree.cap_reached = true;
      return tree;
    }
    tree.first_child[cursor] = tree.size();
    tree.child_count[cursor] = children;
    for (std::uint32_t c = 0; c < children; ++c) {
      const KrsKey attr = child_law.draw(gen);
      tree.k.push_back(attr.k);
      tree.r.push_back(attr.r);
      tree.s.push_back(attr.s);
      tree.depth.push_back(tree.depth[cursor] + 1);
      tree.first_child.push_back(0);
      tree.child_count.push_back(0);
    }
    ++cursor;
  }
  return tree;
}

std::uint8_t BranchingTree::root_state_at(std::uint32_t t) const {
  if (t > truncation_depth)
    throw std::invalid_argument("requested time exceeds the tree truncation depth");
  if (t == 0) return s[0];
  std::vector<std::uint8_t> value(size(), 0);
  for (std::size_t idx = size(); idx-- > 0;) {
    if (depth[idx] > t) continue;  // cannot influence the root by time t
    if (depth[idx] == t) {
      value[idx] = s[idx];
      continue;
    }
    std::uint64_t sum = 0;
    for (std::uint64_t c = first_child[idx]; c < first_child[idx] + child_count[idx]; ++c)
      sum += value[c];
    value[idx] = sum >= r[idx] ? 1 : 0;
  }
  return value[0];
}

RootExpectation branching_root_expectation(const NetworkStatistics& stats, std::uint32_t t,
                                           std::size_t replicas, std::uint64_t seed,
                                           std::size_t node_cap) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  std::vector<std::int8_t> outcome(replicas, -1);  // -1 = discarded
  parallel_for(replicas, [&](std::size_t rep) {
    const BranchingTree tree = sample_branching(stats, t, derive_stream(seed, rep), node_cap);
    if (tree.cap_reached) return;
    outcome[rep] = static_cast<std::int8_t>(tree.root_state_at(t));
  });

  RootExpectation result;
  std::uint64_t ones = 0;
  for (std::int8_t o : outcome) {
    if (o < 0) {
      ++result.discarded;
      continue;
    }
    ++result.replicas_used;
    ones += static_cast<std::uint64_t>(o);
  }
  if (result.replicas_used == 0) throw std::runtime_error("all branching replicas hit the node cap");
  result.estimate = static_cast<double>(ones) / static_cast<double>(result.replicas_used);
  result.std_error = std::sqrt(result.estimate * (1.0 - result.estimate) /
                               static_cast<double>(result.replicas_used));
  return result;
}

}  // namespace ltm
