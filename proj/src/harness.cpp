#include "ltm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "ltm/parallel.hpp"
#include "ltm/rng.hpp"

namespace ltm {

std::vector<double> midpoint_grid(std::uint32_t points) {
  std::vector<double> grid(points);
  for (std::uint32_t i = 0; i < points; ++i)
    grid[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(points);
  return grid;
}

std::vector<SweepRow> sweep_graph(std::span<const Edge> edges, std::size_t n,
                                  const ThresholdCdf& cdf, std::span<const double> upsilon_grid,
                                  std::uint32_t replicas, std::uint32_t horizon,
                                  std::uint64_t master_seed, UpdateRule rule,
                                  bool freeze_zero_outdegree) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  const std::size_t tasks = upsilon_grid.size() * replicas;
  std::vector<SweepRow> rows(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const std::size_t g = task / replicas;
    const std::uint32_t rep = static_cast<std::uint32_t>(task % replicas);
    AssignmentSpec spec;
    spec.cdf = cdf;
    spec.upsilon = upsilon_grid[g];
    spec.seed = derive_stream(master_seed, task);
    const Network net = assign(edges, n, spec);
    RunOptions options;
    options.freeze_zero_outdegree = freeze_zero_outdegree;
    const TrajectoryRecord record = run(net, rule, horizon, options);
    rows[task] = {upsilon_grid[g], rep, record.settled_z(), record.settled_a()};
  });
  return rows;
}

std::vector<SweepRow> sweep_statistics(const std::vector<CellFraction>& cells, std::int64_t n,
                                       std::span<const double> upsilon_grid, std::uint32_t replicas,
                                       std::uint32_t horizon, std::uint64_t master_seed,
                                       UpdateRule rule) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  const std::size_t tasks = upsilon_grid.size() * replicas;
  std::vector<SweepRow> rows(tasks);
  parallel_for(tasks, [&](std::size_t task) {
    const std::size_t g = task / replicas;
    const std::uint32_t rep = static_cast<std::uint32_t>(task % replicas);
    const NetworkStatistics stats = seeded_statistics(cells, n, upsilon_grid[g]);
    const EnsembleSample sample = sample_directed_cm(stats, n, derive_stream(master_seed, task));
    const TrajectoryRecord record = run(sample.net, rule, horizon);
    rows[task] = {upsilon_grid[g], rep, record.settled_z(), record.settled_a()};
  });
  return rows;
}

std::vector<LimitRow> limit_table(const LimitProfile& profile, std::span<const double> xi_grid) {
  std::vector<LimitRow> rows(xi_grid.size());
  parallel_for(xi_grid.size(), [&](std::size_t i) {
    const double x = profile.x_star(xi_grid[i]);
    rows[i] = {xi_grid[i], x, profile.y_star(xi_grid[i])};
  });
  return rows;
}

std::vector<ConcentrationRow> measure_concentration(const std::vector<CellFraction>& cells,
                                                    double upsilon,
                                                    std::span<const std::int64_t> n_grid,
                                                    std::uint32_t t, std::uint32_t replicas,
                                                    std::uint64_t master_seed, double epsilon) {
  if (replicas == 0) throw std::invalid_argument("need at least one replica");
  std::vector<ConcentrationRow> rows(n_grid.size() * replicas);
  for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
    const std::int64_t n = n_grid[gi];
    const NetworkStatistics stats = seeded_statistics(cells, n, upsilon);
    const MeanFieldMaps maps = build_maps(stats);
    const RecursionTrajectory recursion = iterate(maps, stats.xi, stats.upsilon, t);
    const ConcentrationBounds bounds = concentration_constants(stats, t, epsilon);
    const double gamma_over_n = std::exp(bounds.log_gamma_t - std::log(static_cast<double>(n)));
    const double tail = bounds.tail(static_cast<double>(n));

    parallel_for(replicas, [&](std::size_t rep) {
      const std::size_t task = gi * replicas + rep;
      const EnsembleSample sample = sample_directed_cm(stats, n, derive_stream(master_seed, task));
      const TrajectoryRecord record = run(sample.net, UpdateRule::ltm, t);
      double deviation = 0.0;
      for (std::uint32_t s = 0; s <= t; ++s) {
        const double z = s < record.z.size() ? record.z[s] : record.z.back();
        const double y = s < recursion.y.size() ? recursion.y[s] : recursion.y.back();
        deviation = std::max(deviation, std::abs(z - y));
      }
      rows[task] = {n, static_cast<std::uint32_t>(rep), deviation, gamma_over_n, tail};
    });
  }
  return rows;
}

std::vector<BranchingRow> branching_comparison(const NetworkStatistics& stats, std::uint32_t t_max,
                                               std::size_t replicas, std::uint64_t master_seed,
                                               std::size_t node_cap) {
  const MeanFieldMaps maps = build_maps(stats);
  const RecursionTrajectory recursion = iterate(maps, stats.xi, stats.upsilon, t_max);
  std::vector<BranchingRow> rows;
  rows.reserve(t_max + 1);
  for (std::uint32_t t = 0; t <= t_max; ++t) {
    const RootExpectation mc =
        branching_root_expectation(stats, t, replicas, derive_stream(master_seed, t), node_cap);
    BranchingRow row;
    row.t = t;
    row.estimate = mc.estimate;
    row.std_error = mc.std_error;
    row.y_t = t < recursion.y.size() ? recursion.y[t] : recursion.y.back();
    row.replicas_used = mc.replicas_used;
    row.discarded = mc.discarded;
    rows.push_back(row);
  }
  return rows;
}

void write_concentration_table(const std::vector<ConcentrationRow>& rows, std::ostream& out,
                               OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "n,rep,max_dev,gamma_t_over_n,tail_bound\n";
    for (const ConcentrationRow& row : rows)
      out << row.n << ',' << row.rep << ',' << format_double(row.max_deviation) << ','
          << format_double(row.gamma_t_over_n) << ',' << format_double(row.tail_bound) << '\n';
    return;
  }
  out << "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    out << "{\"n\":" << rows[i].n << ",\"rep\":" << rows[i].rep
        << ",\"max_dev\":" << format_double(rows[i].max_deviation)
        << ",\"gamma_t_over_n\":" << format_double(rows[i].gamma_t_over_n)
        << ",\"tail_bound\":" << format_double(rows[i].tail_bound) << '}';
  }
  out << "]}\n";
}

void write_branching_table(const std::vector<BranchingRow>& rows, std::ostream& out,
                           OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "t,estimate,std_error,y_t,replicas,discarded\n";
    for (const BranchingRow& row : rows)
      out << row.t << ',' << format_double(row.estimate) << ',' << format_double(row.std_error)
          << ',' << format_double(row.y_t) << ',' << row.replicas_used << ',' << row.discarded
          << '\n';
    return;
  }
  out << "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    out << "{\"t\":" << rows[i].t << ",\"estimate\":" << format_double(rows[i].estimate)
        << ",\"std_error\":" << format_double(rows[i].std_error)
        << ",\"y_t\":" << format_double(rows[i].y_t) << ",\"replicas\":" << rows[i].replicas_used
        << ",\"discarded\":" << rows[i].discarded << '}';
  }
  out << "]}\n";
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse config " + path + ": " + e.what());
  }
  ExperimentConfig config;
  auto get_string = [&doc](const char* key) -> std::optional<std::string> {
    if (doc.contains(key)) return doc.at(key).get<std::string>();
    return std::nullopt;
  };
  if (doc.contains("experiment")) config.experiment = doc.at("experiment").get<std::string>();
  config.input = get_string("input");
  config.stats_path = get_string("stats");
  config.threshold_cdf = get_string("threshold_cdf");
  config.format = get_string("format");
  config.out = get_string("out");
  config.mode = get_string("mode");
  if (doc.contains("upsilon")) config.upsilon = doc.at("upsilon").get<double>();
  if (doc.contains("upsilon_grid")) config.upsilon_grid = doc.at("upsilon_grid").get<std::uint32_t>();
  if (doc.contains("xi")) config.xi = doc.at("xi").get<double>();
  if (doc.contains("horizon")) config.horizon = doc.at("horizon").get<std::uint32_t>();
  if (doc.contains("replicas")) config.replicas = doc.at("replicas").get<std::uint32_t>();
  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("n")) config.n = doc.at("n").get<std::int64_t>();
  if (doc.contains("t")) config.t = doc.at("t").get<std::uint32_t>();
  if (doc.contains("freeze_zero_outdegree"))
    config.freeze_zero_outdegree = doc.at("freeze_zero_outdegree").get<bool>();
  return config;
}

}  // namespace ltm
