#include "ltm/dynamics.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace ltm {

namespace {

// Core synchronous sweep.  effective_threshold(i, cur) supplies the step's
// threshold; reads hit only the previous buffer so sweeps can be partitioned.
template <typename ThresholdFn>
void step_into(const Network& net, const StateVector& cur, StateVector& next,
               const RunOptions& options, ThresholdFn effective_threshold) {
  const auto offsets = net.offsets();
  const auto heads = net.heads();
  const std::size_t n = net.node_count();
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t begin = offsets[i], end = offsets[i + 1];
    if (options.freeze_zero_outdegree && begin == end) {
      next[i] = net.initial_state(static_cast<NodeId>(i));
      continue;
    }
    std::uint64_t sum = 0;
    for (std::uint64_t idx = begin; idx < end; ++idx) sum += cur[heads[idx]];
    next[i] = sum >= effective_threshold(i) ? 1 : 0;
  }
}

double state_fraction(const StateVector& z) {
  if (z.empty()) return 0.0;
  std::uint64_t count = 0;
  for (std::uint8_t v : z) count += v;
  return static_cast<double>(count) / static_cast<double>(z.size());
}

double link_fraction(const Network& net, const StateVector& z) {
  if (net.link_count() == 0) return 0.0;
  std::uint64_t weighted = 0;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i]) weighted += net.in_degree(static_cast<NodeId>(i));
  return static_cast<double>(weighted) / static_cast<double>(net.link_count());
}

void check_state_length(const Network& net, const StateVector& z) {
  if (z.size() != net.node_count())
    throw std::invalid_argument("state vector length does not match node count");
}

}  // namespace

double TrajectoryRecord::settled_z() const {
  if (period2 && z.size() >= 2) return 0.5 * (z[z.size() - 1] + z[z.size() - 2]);
  return z.empty() ? 0.0 : z.back();
}

double TrajectoryRecord::settled_a() const {
  if (period2 && a.size() >= 2) return 0.5 * (a[a.size() - 1] + a[a.size() - 2]);
  return a.empty() ? 0.0 : a.back();
}

StateVector ltm_step(const Network& net, const StateVector& z) {
  check_state_length(net, z);
  StateVector next(z.size());
  step_into(net, z, next, {}, [&](std::size_t i) { return net.threshold(static_cast<NodeId>(i)); });
  return next;
}

StateVector pltm_step(const Network& net, const StateVector& z) {
  check_state_length(net, z);
  StateVector next(z.size());
  step_into(net, z, next, {}, [&](std::size_t i) {
    return z[i] ? 0u : net.threshold(static_cast<NodeId>(i));
  });
  return next;
}

Network pltm_as_ltm(const Network& net) {
  std::vector<std::uint32_t> thresholds(net.node_count());
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const NodeId id = static_cast<NodeId>(i);
    thresholds[i] = net.initial_state(id) ? 0u : net.threshold(id);
  }
  return net.with_thresholds(std::move(thresholds));
}

namespace {

// Shared driver: next_state(cur, next, t) performs the step-t update;
// may_stop(t) gates fixed-point / cycle detection (always true except while
// a time-varying schedule is still changing).
template <typename StepFn, typename MayStopFn>
TrajectoryRecord run_loop(const Network& net, std::uint32_t horizon, const RunOptions& options,
                          StepFn next_state, MayStopFn may_stop) {
  TrajectoryRecord record;
  StateVector cur = net.initial_states();
  StateVector next(cur.size());
  StateVector prev;

  record.z.push_back(state_fraction(cur));
  record.a.push_back(link_fraction(net, cur));
  if (options.record_states) record.states.push_back(cur);

  for (std::uint32_t t = 0; t < horizon; ++t) {
    next_state(cur, next, t);
    record.z.push_back(state_fraction(next));
    record.a.push_back(link_fraction(net, next));
    if (options.record_states) record.states.push_back(next);
    record.horizon = t + 1;
    if (may_stop(t)) {
      if (next == cur) {
        record.converged_at = t;
        return record;
      }
      if (t >= 1 && next == prev) {
        record.period2 = true;
        return record;
      }
    }
    prev = std::move(cur);
    cur = std::move(next);
    next = StateVector(cur.size());
  }
  record.horizon = static_cast<std::uint32_t>(record.z.size() - 1);
  return record;
}

}  // namespace

TrajectoryRecord run(const Network& net, UpdateRule rule, std::uint32_t horizon,
                     const RunOptions& options) {
  if (rule == UpdateRule::ltm) {
    return run_loop(
        net, horizon, options,
        [&](const StateVector& cur, StateVector& next, std::uint32_t) {
          step_into(net, cur, next, options,
                    [&](std::size_t i) { return net.threshold(static_cast<NodeId>(i)); });
        },
        [](std::uint32_t) { return true; });
  }
  return run_loop(
      net, horizon, options,
      [&](const StateVector& cur, StateVector& next, std::uint32_t) {
        step_into(net, cur, next, options, [&](std::size_t i) {
          return cur[i] ? 0u : net.threshold(static_cast<NodeId>(i));
        });
      },
      [](std::uint32_t) { return true; });
}

TrajectoryRecord run_time_varying(const Network& net, const ThresholdSchedule& schedule,
                                  std::uint32_t horizon, const RunOptions& options) {
  if (schedule.empty()) throw std::invalid_argument("empty threshold schedule");
  const std::size_t n = net.node_count();
  for (std::uint32_t t = 0; t <= std::min(horizon, schedule.settle_time()); ++t) {
    const auto& rho = schedule.at(t);
    if (rho.size() != n)
      throw std::invalid_argument("schedule vector length does not match node count at t=" +
                                  std::to_string(t));
    for (std::size_t i = 0; i < n; ++i)
      if (rho[i] > net.out_degree(static_cast<NodeId>(i)))
        throw std::invalid_argument("schedule threshold " + std::to_string(rho[i]) +
                                    " exceeds out-degree of node " + std::to_string(i) + " at t=" +
                                    std::to_string(t));
  }
  return run_loop(
      net, horizon, options,
      [&](const StateVector& cur, StateVector& next, std::uint32_t t) {
        const auto& rho = schedule.at(t);
        step_into(net, cur, next, options, [&](std::size_t i) { return rho[i]; });
      },
      [&](std::uint32_t t) { return t >= schedule.settle_time(); });
}

std::vector<std::uint8_t> pltm_root_on_undirected_tree(const Network& tree, NodeId root,
                                                       std::uint32_t horizon) {
  const std::size_t n = tree.node_count();
  if (root >= n) throw std::invalid_argument("root id out of range");

  // Undirected tree stored as reciprocal directed links: symmetric link
  // multiset, no self-loops, 2(n-1) links, connected.
  std::map<std::pair<NodeId, NodeId>, std::int64_t> balance;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : tree.out_neighbors(i)) {
      if (i == j) throw std::invalid_argument("tree input has a self-loop at node " + std::to_string(i));
      if (i < j)
        ++balance[{i, j}];
      else
        --balance[{j, i}];
    }
  }
  for (const auto& [pair, diff] : balance)
    if (diff != 0)
      throw std::invalid_argument("link (" + std::to_string(pair.first) + "," +
                                  std::to_string(pair.second) + ") has no reciprocal");
  if (tree.link_count() != 2 * (static_cast<std::uint64_t>(n) - (n > 0 ? 1 : 0)))
    throw std::invalid_argument("link count does not match a tree");
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<NodeId> stack{root};
  seen[root] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const NodeId i = stack.back();
    stack.pop_back();
    for (NodeId j : tree.out_neighbors(i))
      if (!seen[j]) {
        seen[j] = 1;
        ++reached;
        stack.push_back(j);
      }
  }
  if (reached != n) throw std::invalid_argument("tree input is not connected");

  RunOptions options;
  options.record_states = true;
  const TrajectoryRecord record = run(tree, UpdateRule::pltm, horizon, options);
  std::vector<std::uint8_t> sequence;
  sequence.reserve(horizon + 1);
  for (const StateVector& state : record.states) sequence.push_back(state[root]);
  // The run may stop early at the (guaranteed) fixed point; extend it.
  while (sequence.size() < horizon + 1) sequence.push_back(sequence.back());
  return sequence;
}

}  // namespace ltm
