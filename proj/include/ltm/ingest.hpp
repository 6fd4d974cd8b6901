#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ltm/dynamics.hpp"
#include "ltm/meanfield.hpp"
#include "ltm/network.hpp"
#include "ltm/statistics.hpp"

namespace ltm {

/// Edge list with ids remapped to dense 0..n-1 in first-appearance order.
struct ParsedEdgeList {
  std::vector<Edge> edges;
  std::vector<std::int64_t> original_ids;  // original_ids[dense] = external id
  std::size_t node_count = 0;
};

/// SNAP-style edge list: '#' comment lines, whitespace-separated integer
/// pairs.  Duplicate pairs are preserved.  Throws std::runtime_error with
/// the line number on malformed input.
ParsedEdgeList parse_edge_list(std::istream& in);
ParsedEdgeList parse_edge_list_file(const std::string& path);

/// Threshold/initial-state assignment: the normalized-threshold vector gets
/// exact atom counts (largest remainder on n * mass) permuted by pi', the
/// state vector exactly round(n * upsilon) ones permuted independently by
/// pi''; rho_i = ceil(Theta_{pi'(i)} * kappa_i) in integer arithmetic.
struct AssignmentSpec {
  ThresholdCdf cdf;
  double upsilon = 0.0;
  std::uint64_t seed = 0;
};

Network assign(std::span<const Edge> edges, std::size_t n, const AssignmentSpec& spec);

/// Parses "theta:mass,..." with theta a fraction like 1/2 or a decimal.
ThresholdCdf parse_threshold_cdf(const std::string& text);

enum class OutputFormat { csv, json };
OutputFormat parse_format(const std::string& text);

struct LimitRow {
  double xi = 0.0, x_star = 0.0, y_star = 0.0;
};

struct SweepRow {
  double upsilon = 0.0;
  std::uint32_t rep = 0;
  double z_T = 0.0, a_T = 0.0;
};

// Writers are bit-stable given identical inputs: '.' decimals, '\n' line
// ends, no quoting; numbers carry 17 significant digits.
void write_trajectory(const TrajectoryRecord& record, std::ostream& out, OutputFormat format);
void write_recursion(const RecursionTrajectory& trajectory, std::ostream& out,
                     OutputFormat format);
void write_limit_table(const std::vector<LimitRow>& rows, std::ostream& out, OutputFormat format);
void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out, OutputFormat format);
void write_statistics(const NetworkStatistics& stats, std::ostream& out, OutputFormat format);

/// Path-based wrapper; failures mention the path.
template <typename Record>
void write_results(const Record& record, const std::string& path, OutputFormat format);

/// Statistics back from the nested JSON layout written above.
NetworkStatistics read_statistics_json(const std::string& path);

/// Edge list in parser-compatible form plus a JSON sidecar holding the
/// thresholds, initial states, and sampler seed.
void export_edge_list(const Network& net, std::ostream& out);
void write_sample_sidecar(const Network& net, std::uint64_t seed, std::ostream& out);

std::string format_double(double value);

}  // namespace ltm
