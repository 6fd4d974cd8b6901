#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ltm/dynamics.hpp"
#include "ltm/ensembles.hpp"
#include "ltm/ingest.hpp"
#include "ltm/meanfield.hpp"
#include "ltm/statistics.hpp"

namespace ltm {

/// Asymptotic-activation sweep over a fixed topology: for each seed
/// fraction and replica, thresholds/states are assigned from independently
/// derived streams and the exact dynamics run to the horizon.  Replica
/// seeds split off the master seed, so adding grid points or replicas never
/// perturbs earlier runs.
std::vector<SweepRow> sweep_graph(std::span<const Edge> edges, std::size_t n,
                                  const ThresholdCdf& cdf, std::span<const double> upsilon_grid,
                                  std::uint32_t replicas, std::uint32_t horizon,
                                  std::uint64_t master_seed, UpdateRule rule,
                                  bool freeze_zero_outdegree = false);

/// Sweep over configuration-model draws from (d,k,r) cell fractions; each
/// grid point re-splits the seed fraction and samples a fresh wiring.
std::vector<SweepRow> sweep_statistics(const std::vector<CellFraction>& cells, std::int64_t n,
                                       std::span<const double> upsilon_grid, std::uint32_t replicas,
                                       std::uint32_t horizon, std::uint64_t master_seed,
                                       UpdateRule rule);

/// Recursion staircase for overlaying a sweep: x*(xi), y*(xi) per grid seed.
std::vector<LimitRow> limit_table(const LimitProfile& profile, std::span<const double> xi_grid);

/// Uniform midpoint grid (i + 1/2)/points on [0,1].
std::vector<double> midpoint_grid(std::uint32_t points);

/// Per-replica deviation max_{s<=t} |z(s) - y(s)| between configuration
/// model simulations and the recursion, for a row of network sizes, plus
/// the theoretical pair (gamma_t / n, tail bound) for comparison.
struct ConcentrationRow {
  std::int64_t n = 0;
  std::uint32_t rep = 0;
  double max_deviation = 0.0;
  double gamma_t_over_n = 0.0;
  double tail_bound = 0.0;
};

std::vector<ConcentrationRow> measure_concentration(const std::vector<CellFraction>& cells,
                                                    double upsilon,
                                                    std::span<const std::int64_t> n_grid,
                                                    std::uint32_t t, std::uint32_t replicas,
                                                    std::uint64_t master_seed, double epsilon);

/// Branching-process Monte Carlo of the root expectation against the
/// recursion output, one row per time.
struct BranchingRow {
  std::uint32_t t = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double y_t = 0.0;
  std::size_t replicas_used = 0;
  std::size_t discarded = 0;
};

std::vector<BranchingRow> branching_comparison(const NetworkStatistics& stats, std::uint32_t t_max,
                                               std::size_t replicas, std::uint64_t master_seed,
                                               std::size_t node_cap = 10'000'000);

void write_concentration_table(const std::vector<ConcentrationRow>& rows, std::ostream& out,
                               OutputFormat format);
void write_branching_table(const std::vector<BranchingRow>& rows, std::ostream& out,
                           OutputFormat format);

/// Experiment configuration mirrored by the CLI's --config JSON file.
struct ExperimentConfig {
  std::string experiment;
  std::optional<std::string> input;       // edge-list path
  std::optional<std::string> stats_path;  // statistics JSON path
  std::optional<std::string> threshold_cdf;
  std::optional<double> upsilon;
  std::optional<std::uint32_t> upsilon_grid;
  std::optional<double> xi;
  std::optional<std::uint32_t> horizon;
  std::optional<std::uint32_t> replicas;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> format;
  std::optional<std::string> out;
  std::optional<std::int64_t> n;
  std::optional<std::uint32_t> t;
  std::optional<bool> freeze_zero_outdegree;
  std::optional<std::string> mode;

  static ExperimentConfig load(const std::string& path);
};

}  // namespace ltm
