// Command-line front end: stats, recursion, simulate, sweep, concentration,
// branching, sample.  Validation failures exit nonzero with a one-line JSON
// error record on stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltm/dynamics.hpp"
#include "ltm/ensembles.hpp"
#include "ltm/harness.hpp"
#include "ltm/ingest.hpp"
#include "ltm/meanfield.hpp"
#include "ltm/network.hpp"
#include "ltm/rng.hpp"
#include "ltm/statistics.hpp"

namespace {

using namespace ltm;

struct CommonOptions {
  std::string input;
  std::string stats_path;
  std::string threshold_cdf;
  std::string mode = "ltm";
  std::string format = "csv";
  std::string out;
  double upsilon = -1.0;
  double xi = -1.0;
  std::uint32_t upsilon_grid = 0;
  std::uint32_t horizon = 100;
  std::uint32_t replicas = 10;
  std::uint64_t seed = 1;
  std::int64_t n = 0;
  std::uint32_t t = 3;
  bool freeze_zero_outdegree = false;
};

UpdateRule parse_mode(const std::string& mode) {
  if (mode == "ltm") return UpdateRule::ltm;
  if (mode == "pltm") return UpdateRule::pltm;
  throw std::invalid_argument("unknown mode: " + mode + " (expected ltm or pltm)");
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  return out;
}

template <typename WriteFn>
void emit(const std::string& path, WriteFn write) {
  if (path.empty()) {
    write(std::cout);
  } else {
    auto out = open_output(path);
    write(out);
    if (!out) throw std::runtime_error("write failed: " + path);
  }
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
  std::vector<std::int64_t> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) values.push_back(std::stoll(item));
  return values;
}

// (d,k,r) cells of a statistics object with the seed split removed.
std::vector<CellFraction> cells_of(const NetworkStatistics& stats) {
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, double> merged;
  for (const auto& [key, p] : stats.joint) merged[{key.d, key.k, key.r}] += p;
  std::vector<CellFraction> cells;
  cells.reserve(merged.size());
  for (const auto& [dkr, p] : merged)
    cells.push_back({std::get<0>(dkr), std::get<1>(dkr), std::get<2>(dkr), p});
  return cells;
}

NetworkStatistics load_stats(const CommonOptions& options) {
  if (options.stats_path.empty())
    throw std::invalid_argument("this command needs --stats <statistics.json>");
  return read_statistics_json(options.stats_path);
}

void degree_marginals(const NetworkStatistics& stats, std::map<std::uint32_t, double>& p_k,
                      std::map<std::uint32_t, double>& q_k) {
  for (const auto& [key, p] : stats.joint) {
    p_k[key.k] += p;
    if (stats.mean_degree > 0.0)
      q_k[key.k] += static_cast<double>(key.d) * p / stats.mean_degree;
  }
}

int cmd_stats(const CommonOptions& options, const std::string& marginals_out) {
  if (options.input.empty()) throw std::invalid_argument("stats needs --input <edge list>");
  const ParsedEdgeList parsed = parse_edge_list_file(options.input);

  Network net;
  if (!options.threshold_cdf.empty()) {
    AssignmentSpec spec;
    spec.cdf = parse_threshold_cdf(options.threshold_cdf);
    spec.upsilon = options.upsilon < 0.0 ? 0.0 : options.upsilon;
    spec.seed = options.seed;
    net = assign(parsed.edges, parsed.node_count, spec);
  } else {
    // Topology-only: zero thresholds and states.
    net = build_network(parsed.edges, std::vector<std::uint32_t>(parsed.node_count, 0),
                        StateVector(parsed.node_count, 0));
  }
  const NetworkStatistics stats = extract(net);
  const OutputFormat format = parse_format(options.format);
  emit(options.out, [&](std::ostream& out) { write_statistics(stats, out, format); });

  if (!marginals_out.empty()) {
    std::map<std::uint32_t, double> in_marginal, out_marginal;
    for (const auto& [key, p] : stats.joint) {
      in_marginal[key.d] += p;
      out_marginal[key.k] += p;
    }
    auto out = open_output(marginals_out);
    out << "kind,degree,fraction\n";
    for (const auto& [d, p] : in_marginal) out << "in," << d << ',' << format_double(p) << '\n';
    for (const auto& [k, p] : out_marginal) out << "out," << k << ',' << format_double(p) << '\n';
  }
  return 0;
}

int cmd_recursion(const CommonOptions& options, const std::string& limit_out,
                  const std::string& fixed_points_out, std::uint32_t grid) {
  const NetworkStatistics stats = load_stats(options);
  const MeanFieldMaps maps = build_maps(stats);
  const double xi = options.xi >= 0.0 ? options.xi : stats.xi;
  const double upsilon = options.upsilon >= 0.0 ? options.upsilon : stats.upsilon;

  const RecursionTrajectory trajectory = iterate(maps, xi, upsilon, options.horizon);
  const OutputFormat format = parse_format(options.format);
  emit(options.out, [&](std::ostream& out) { write_recursion(trajectory, out, format); });

  if (!limit_out.empty() || !fixed_points_out.empty()) {
    const LimitProfile profile = fixed_points(maps);
    if (!limit_out.empty()) {
      const std::vector<double> xi_grid = midpoint_grid(grid);
      const std::vector<LimitRow> rows = limit_table(profile, xi_grid);
      emit(limit_out, [&](std::ostream& out) { write_limit_table(rows, out, format); });
    }
    if (!fixed_points_out.empty()) {
      auto out = open_output(fixed_points_out);
      out << "x,phi_prime,stability\n";
      for (const FixedPoint& fp : profile.fixed_points()) {
        const char* tag = fp.tag == Stability::stable
                              ? "stable"
                              : fp.tag == Stability::unstable ? "unstable" : "marginal";
        out << format_double(fp.x) << ',' << format_double(fp.phi_prime) << ',' << tag << '\n';
      }
    }
  }
  return 0;
}

int cmd_simulate(const CommonOptions& options, const std::string& sigma_file) {
  Network net;
  if (!options.input.empty()) {
    const ParsedEdgeList parsed = parse_edge_list_file(options.input);
    if (options.threshold_cdf.empty())
      throw std::invalid_argument("simulate on a graph needs --threshold-cdf");
    AssignmentSpec spec;
    spec.cdf = parse_threshold_cdf(options.threshold_cdf);
    spec.upsilon = options.upsilon < 0.0 ? 0.0 : options.upsilon;
    spec.seed = options.seed;
    net = assign(parsed.edges, parsed.node_count, spec);
    if (!sigma_file.empty()) {
      std::ifstream in(sigma_file);
      if (!in) throw std::runtime_error("cannot open state file: " + sigma_file);
      StateVector sigma;
      int bit = 0;
      while (in >> bit) sigma.push_back(bit ? 1 : 0);
      if (sigma.size() != parsed.node_count)
        throw std::invalid_argument("state file holds " + std::to_string(sigma.size()) +
                                    " entries for " + std::to_string(parsed.node_count) +
                                    " nodes");
      net = net.with_initial_states(std::move(sigma));
    }
  } else {
    const NetworkStatistics stats = load_stats(options);
    if (options.n <= 0) throw std::invalid_argument("simulate from statistics needs --n");
    net = sample_directed_cm(stats, options.n, options.seed).net;
  }

  RunOptions run_options;
  run_options.freeze_zero_outdegree = options.freeze_zero_outdegree;
  const TrajectoryRecord record = run(net, parse_mode(options.mode), options.horizon, run_options);
  const OutputFormat format = parse_format(options.format);
  emit(options.out, [&](std::ostream& out) { write_trajectory(record, out, format); });
  return 0;
}

int cmd_sweep(const CommonOptions& options, const std::string& staircase_out) {
  if (options.upsilon_grid == 0) throw std::invalid_argument("sweep needs --upsilon-grid");
  const std::vector<double> grid = midpoint_grid(options.upsilon_grid);
  const OutputFormat format = parse_format(options.format);
  const UpdateRule rule = parse_mode(options.mode);

  std::vector<SweepRow> rows;
  std::optional<MeanFieldMaps> maps;
  if (!options.input.empty()) {
    if (options.threshold_cdf.empty())
      throw std::invalid_argument("sweep on a graph needs --threshold-cdf");
    const ParsedEdgeList parsed = parse_edge_list_file(options.input);
    const ThresholdCdf cdf = parse_threshold_cdf(options.threshold_cdf);
    rows = sweep_graph(parsed.edges, parsed.node_count, cdf, grid, options.replicas,
                       options.horizon, options.seed, rule, options.freeze_zero_outdegree);
    // A-priori maps for the staircase overlay: topology degree marginals
    // split by the CDF.
    const Network topo =
        build_network(parsed.edges, std::vector<std::uint32_t>(parsed.node_count, 0),
                      StateVector(parsed.node_count, 0));
    const NetworkStatistics stats = extract(topo);
    std::map<std::uint32_t, double> p_k, q_k;
    degree_marginals(stats, p_k, q_k);
    maps = maps_from_threshold_cdf(cdf, p_k, q_k);
  } else {
    const NetworkStatistics stats = load_stats(options);
    if (options.n <= 0) throw std::invalid_argument("sweep from statistics needs --n");
    rows = sweep_statistics(cells_of(stats), options.n, grid, options.replicas, options.horizon,
                            options.seed, rule);
    maps = build_maps(stats);
  }

  emit(options.out, [&](std::ostream& out) { write_sweep_table(rows, out, format); });
  if (!staircase_out.empty()) {
    const LimitProfile profile = fixed_points(*maps);
    const std::vector<LimitRow> stair = limit_table(profile, grid);
    emit(staircase_out, [&](std::ostream& out) { write_limit_table(stair, out, format); });
  }
  return 0;
}

int cmd_concentration(const CommonOptions& options, const std::string& n_grid_text,
                      double epsilon) {
  const NetworkStatistics stats = load_stats(options);
  const std::vector<std::int64_t> n_grid = parse_int_list(n_grid_text);
  if (n_grid.empty()) throw std::invalid_argument("concentration needs --n-grid");
  const double xi = options.xi >= 0.0 ? options.xi : stats.xi;
  const std::vector<ConcentrationRow> rows = measure_concentration(
      cells_of(stats), xi, n_grid, options.t, options.replicas, options.seed, epsilon);
  const OutputFormat format = parse_format(options.format);
  emit(options.out, [&](std::ostream& out) { write_concentration_table(rows, out, format); });
  return 0;
}

int cmd_branching(const CommonOptions& options) {
  const NetworkStatistics stats = load_stats(options);
  const std::vector<BranchingRow> rows =
      branching_comparison(stats, options.t, options.replicas, options.seed);
  const OutputFormat format = parse_format(options.format);
  emit(options.out, [&](std::ostream& out) { write_branching_table(rows, out, format); });
  return 0;
}

int cmd_sample(const CommonOptions& options, const std::string& sidecar_out) {
  const NetworkStatistics stats = load_stats(options);
  if (options.n <= 0) throw std::invalid_argument("sample needs --n");
  const EnsembleSample sample = sample_directed_cm(stats, options.n, options.seed);
  emit(options.out, [&](std::ostream& out) { export_edge_list(sample.net, out); });
  if (!sidecar_out.empty()) {
    auto out = open_output(sidecar_out);
    write_sample_sidecar(sample.net, sample.seed, out);
  }
  return 0;
}

// Config values fill anything still at its default; explicit flags win.
void merge_config(const std::string& path, CommonOptions& options) {
  const ExperimentConfig config = ExperimentConfig::load(path);
  const CommonOptions defaults;
  auto fill = [](auto& slot, const auto& from_config, const auto& default_value) {
    if (from_config && slot == default_value) slot = *from_config;
  };
  fill(options.input, config.input, defaults.input);
  fill(options.stats_path, config.stats_path, defaults.stats_path);
  fill(options.threshold_cdf, config.threshold_cdf, defaults.threshold_cdf);
  fill(options.mode, config.mode, defaults.mode);
  fill(options.format, config.format, defaults.format);
  fill(options.out, config.out, defaults.out);
  fill(options.upsilon, config.upsilon, defaults.upsilon);
  fill(options.upsilon_grid, config.upsilon_grid, defaults.upsilon_grid);
  fill(options.xi, config.xi, defaults.xi);
  fill(options.horizon, config.horizon, defaults.horizon);
  fill(options.replicas, config.replicas, defaults.replicas);
  fill(options.seed, config.seed, defaults.seed);
  fill(options.n, config.n, defaults.n);
  fill(options.t, config.t, defaults.t);
  fill(options.freeze_zero_outdegree, config.freeze_zero_outdegree,
       defaults.freeze_zero_outdegree);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear threshold cascade toolkit: exact dynamics, ensemble sampling, and the "
               "one-dimensional mean-field recursion"};
  app.require_subcommand(1);

  CommonOptions options;
  std::string config_path;
  std::string marginals_out, limit_out, fixed_points_out, staircase_out, sigma_file, sidecar_out;
  std::string n_grid_text;
  std::uint32_t grid = 101;
  double epsilon = 0.05;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config mirroring the experiment fields");
    cmd->add_option("--input", options.input, "edge-list file (SNAP format)");
    cmd->add_option("--stats", options.stats_path, "statistics JSON file");
    cmd->add_option("--threshold-cdf", options.threshold_cdf,
                    "normalized-threshold atoms, e.g. 1/2:1 or 0.25:0.4,0.75:0.6");
    cmd->add_option("--mode", options.mode, "ltm or pltm");
    cmd->add_option("--upsilon", options.upsilon, "seed fraction of state-1 nodes");
    cmd->add_option("--upsilon-grid", options.upsilon_grid, "number of midpoint grid seeds");
    cmd->add_option("--xi", options.xi, "recursion seed (link-weighted)");
    cmd->add_option("--horizon", options.horizon, "time horizon T");
    cmd->add_option("--replicas", options.replicas, "replicas per grid point");
    cmd->add_option("--seed", options.seed, "master RNG seed");
    cmd->add_option("--format", options.format, "csv or json");
    cmd->add_option("--out", options.out, "output path (stdout when omitted)");
    cmd->add_option("--n", options.n, "network size for ensemble draws");
    cmd->add_option("--t", options.t, "time for concentration/branching commands");
    cmd->add_flag("--freeze-zero-outdegree", options.freeze_zero_outdegree,
                  "keep out-degree-0 nodes at their initial state");
  };

  CLI::App* stats_cmd = app.add_subcommand("stats", "extract and serialize network statistics");
  add_common(stats_cmd);
  stats_cmd->add_option("--marginals-out", marginals_out, "degree-marginal table output path");

  CLI::App* recursion_cmd =
      app.add_subcommand("recursion", "run the mean-field recursion and limit profile");
  add_common(recursion_cmd);
  recursion_cmd->add_option("--limit-out", limit_out, "limit profile output path");
  recursion_cmd->add_option("--fixed-points-out", fixed_points_out, "fixed point table path");
  recursion_cmd->add_option("--grid", grid, "limit profile grid size");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "run exact dynamics");
  add_common(simulate_cmd);
  simulate_cmd->add_option("--sigma-file", sigma_file, "explicit 0/1 initial states, one per line");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "asymptotic-activation sweep over seeds");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--staircase-out", staircase_out, "recursion staircase overlay path");

  CLI::App* concentration_cmd =
      app.add_subcommand("concentration", "simulation-vs-recursion deviation over sizes");
  add_common(concentration_cmd);
  concentration_cmd->add_option("--n-grid", n_grid_text, "comma-separated network sizes");
  concentration_cmd->add_option("--epsilon", epsilon, "tolerance for the theoretical bounds");

  CLI::App* branching_cmd =
      app.add_subcommand("branching", "branching-process root expectation vs recursion");
  add_common(branching_cmd);

  CLI::App* sample_cmd = app.add_subcommand("sample", "export one configuration-model draw");
  add_common(sample_cmd);
  sample_cmd->add_option("--sidecar-out", sidecar_out, "JSON sidecar path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!config_path.empty()) merge_config(config_path, options);

    if (stats_cmd->parsed()) return cmd_stats(options, marginals_out);
    if (recursion_cmd->parsed()) return cmd_recursion(options, limit_out, fixed_points_out, grid);
    if (simulate_cmd->parsed()) return cmd_simulate(options, sigma_file);
    if (sweep_cmd->parsed()) return cmd_sweep(options, staircase_out);
    if (concentration_cmd->parsed()) return cmd_concentration(options, n_grid_text, epsilon);
    if (branching_cmd->parsed()) return cmd_branching(options);
    if (sample_cmd->parsed()) return cmd_sample(options, sidecar_out);
  } catch (const std::exception& e) {
    std::string message = e.what();
    for (char& c : message)
      if (c == '"') c = '\'';
    std::cerr << "{\"error\":\"" << message << "\"}" << std::endl;
    return 1;
  }
  return 0;
}
