#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ltm/network.hpp"
#include "ltm/schedule.hpp"

namespace ltm {

enum class UpdateRule { ltm, pltm };

struct RunOptions {
  /// Keep nodes with out-degree 0 at their initial state instead of letting
  /// the empty sum trigger adoption (sensitivity flag; off by default).
  bool freeze_zero_outdegree = false;
  bool record_states = false;
};

/// Per-time fractions recorded along an exact simulation: z(t) is the
/// fraction of state-1 adopters, a(t) the fraction of links pointing to
/// state-1 adopters.
struct TrajectoryRecord {
  std::vector<double> z;
  std::vector<double> a;
  std::vector<StateVector> states;  // filled when record_states was set
  std::uint32_t horizon = 0;        // last recorded time index
  std::optional<std::uint32_t> converged_at;  // first t with Z(t+1) == Z(t)
  bool period2 = false;                       // Z(t+1) == Z(t-1) detected

  /// Settling value: final z, or the average of the two cycle values when a
  /// period-2 cycle was detected.
  double settled_z() const;
  double settled_a() const;
};

/// One synchronous step Z'_i = [neighbor_sum(i) >= rho_i].
StateVector ltm_step(const Network& net, const StateVector& z);

/// Progressive step: effective threshold (1 - Z_i) * rho_i, so state 1 is
/// absorbing.  Output dominates the input entrywise.
StateVector pltm_step(const Network& net, const StateVector& z);

/// Copy of the network with thresholds (1 - sigma_i) * rho_i.  The LTM on
/// the result reproduces the PLTM on the original at every time.
Network pltm_as_ltm(const Network& net);

/// Iterates the chosen rule up to the horizon, recording z(t) and a(t).
/// Stops early at a fixed point (full state comparison) or when a period-2
/// cycle is detected; longer cycles run to the horizon.
TrajectoryRecord run(const Network& net, UpdateRule rule, std::uint32_t horizon,
                     const RunOptions& options = {});

/// LTM with the step-t threshold vector taken from the schedule.  Each
/// step's thresholds are validated against out-degrees.
TrajectoryRecord run_time_varying(const Network& net, const ThresholdSchedule& schedule,
                                  std::uint32_t horizon, const RunOptions& options = {});

/// Root-state sequence of the PLTM on an undirected tree (each undirected
/// edge stored as a pair of reciprocal directed links).  Throws on non-tree
/// input.  By the directed-rooting reduction this sequence equals the PLTM
/// root states on the tree oriented away from the root.
std::vector<std::uint8_t> pltm_root_on_undirected_tree(const Network& tree, NodeId root,
                                                       std::uint32_t horizon);

}  // namespace ltm
