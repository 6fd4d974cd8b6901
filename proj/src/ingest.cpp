#include "ltm/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <unordered_map>

#include <json.hpp>

#include "ltm/rng.hpp"

namespace ltm {

namespace {

const char* skip_ws(const char* p, const char* end) {
  while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
  return p;
}

}  // namespace

ParsedEdgeList parse_edge_list(std::istream& in) {
  ParsedEdgeList parsed;
  std::unordered_map<std::int64_t, NodeId> remap;
  std::string line;
  std::size_t lineno = 0;

  auto dense_id = [&](std::int64_t external) {
    const auto [it, inserted] = remap.emplace(external, static_cast<NodeId>(parsed.original_ids.size()));
    if (inserted) parsed.original_ids.push_back(external);
    return it->second;
  };

  while (std::getline(in, line)) {
    ++lineno;
    const char* p = line.data();
    const char* end = line.data() + line.size();
    p = skip_ws(p, end);
    if (p == end || *p == '#') continue;

    std::int64_t tail = 0, head = 0;
    auto r1 = std::from_chars(p, end, tail);
    if (r1.ec != std::errc{} || tail < 0)
      throw std::runtime_error("edge list line " + std::to_string(lineno) + ": malformed tail id");
    p = skip_ws(r1.ptr, end);
    auto r2 = std::from_chars(p, end, head);
    if (r2.ec != std::errc{} || head < 0)
      throw std::runtime_error("edge list line " + std::to_string(lineno) + ": malformed head id");
    p = skip_ws(r2.ptr, end);
    if (p != end)
      throw std::runtime_error("edge list line " + std::to_string(lineno) + ": trailing characters");

    const NodeId dense_tail = dense_id(tail);  // first-appearance order
    const NodeId dense_head = dense_id(head);
    parsed.edges.emplace_back(dense_tail, dense_head);
  }
  parsed.node_count = parsed.original_ids.size();
  return parsed;
}

ParsedEdgeList parse_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list: " + path);
  return parse_edge_list(in);
}

Network assign(std::span<const Edge> edges, std::size_t n, const AssignmentSpec& spec) {
  spec.cdf.validate();
  if (spec.upsilon < 0.0 || spec.upsilon > 1.0)
    throw std::invalid_argument("seed fraction outside [0,1]");

  std::vector<std::uint32_t> kappa(n, 0);
  for (const auto& [tail, head] : edges) {
    if (tail >= n || head >= n) throw std::invalid_argument("edge references id out of range");
    ++kappa[tail];
  }

  // Designed normalized-threshold vector: exact atom counts.
  std::vector<double> masses;
  masses.reserve(spec.cdf.atoms.size());
  for (const auto& atom : spec.cdf.atoms) masses.push_back(atom.mass);
  const std::vector<std::int64_t> atom_counts =
      apportion_largest_remainder(masses, static_cast<std::int64_t>(n));
  std::vector<std::uint32_t> theta_index;
  theta_index.reserve(n);
  for (std::size_t j = 0; j < atom_counts.size(); ++j)
    for (std::int64_t c = 0; c < atom_counts[j]; ++c)
      theta_index.push_back(static_cast<std::uint32_t>(j));

  // pi' and pi'' come from disjoint substreams of the spec seed.
  SplitMix64 gen_theta(derive_stream(spec.seed, 0));
  shuffle(theta_index, gen_theta);

  std::vector<std::uint32_t> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = spec.cdf.ceil_threshold(theta_index[i], kappa[i]);

  const std::int64_t ones = std::llround(static_cast<double>(n) * spec.upsilon);
  StateVector sigma(n, 0);
  std::fill(sigma.begin(), sigma.begin() + ones, 1);
  SplitMix64 gen_sigma(derive_stream(spec.seed, 1));
  shuffle(sigma, gen_sigma);

  return build_network(edges, std::move(rho), std::move(sigma));
}

ThresholdCdf parse_threshold_cdf(const std::string& text) {
  ThresholdCdf cdf;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto colon = item.find(':');
    std::string value_text = colon == std::string::npos ? item : item.substr(0, colon);
    std::string mass_text = colon == std::string::npos ? "" : item.substr(colon + 1);

    ThresholdCdf::Atom atom;
    const auto slash = value_text.find('/');
    if (slash != std::string::npos) {
      atom.num = std::stoll(value_text.substr(0, slash));
      atom.den = std::stoll(value_text.substr(slash + 1));
    } else {
      // Decimal to exact rational by digit count.
      const auto dot = value_text.find('.');
      if (dot == std::string::npos) {
        atom.num = std::stoll(value_text);
        atom.den = 1;
      } else {
        const std::string digits = value_text.substr(0, dot) + value_text.substr(dot + 1);
        const std::size_t places = value_text.size() - dot - 1;
        atom.num = std::stoll(digits);
        atom.den = 1;
        for (std::size_t i = 0; i < places; ++i) atom.den *= 10;
      }
    }
    atom.mass = mass_text.empty() ? 1.0 : std::stod(mass_text);
    cdf.atoms.push_back(atom);
  }
  cdf.validate();
  return cdf;
}

OutputFormat parse_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw std::invalid_argument("unknown output format: " + text);
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

namespace {

void json_array(std::ostream& out, const std::vector<double>& values) {
  out << '[';
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out << ',';
    out << format_double(values[i]);
  }
  out << ']';
}

}  // namespace

void write_trajectory(const TrajectoryRecord& record, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "t,z,a\n";
    for (std::size_t t = 0; t < record.z.size(); ++t)
      out << t << ',' << format_double(record.z[t]) << ',' << format_double(record.a[t]) << '\n';
    return;
  }
  out << "{\"horizon\":" << record.horizon << ",\"converged_at\":";
  if (record.converged_at)
    out << *record.converged_at;
  else
    out << "null";
  out << ",\"period2\":" << (record.period2 ? "true" : "false") << ",\"z\":";
  json_array(out, record.z);
  out << ",\"a\":";
  json_array(out, record.a);
  out << "}\n";
}

void write_recursion(const RecursionTrajectory& trajectory, std::ostream& out,
                     OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "t,x,y\n";
    for (std::size_t t = 0; t < trajectory.x.size(); ++t)
      out << t << ',' << format_double(trajectory.x[t]) << ',' << format_double(trajectory.y[t])
          << '\n';
    return;
  }
  out << "{\"converged_at\":";
  if (trajectory.converged_at)
    out << *trajectory.converged_at;
  else
    out << "null";
  out << ",\"x\":";
  json_array(out, trajectory.x);
  out << ",\"y\":";
  json_array(out, trajectory.y);
  out << "}\n";
}

void write_limit_table(const std::vector<LimitRow>& rows, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "xi,x_star,y_star\n";
    for (const LimitRow& row : rows)
      out << format_double(row.xi) << ',' << format_double(row.x_star) << ','
          << format_double(row.y_star) << '\n';
    return;
  }
  out << "{\"points\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    out << "{\"xi\":" << format_double(rows[i].xi) << ",\"x_star\":" << format_double(rows[i].x_star)
        << ",\"y_star\":" << format_double(rows[i].y_star) << '}';
  }
  out << "]}\n";
}

void write_sweep_table(const std::vector<SweepRow>& rows, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "upsilon,rep,z_T,a_T\n";
    for (const SweepRow& row : rows)
      out << format_double(row.upsilon) << ',' << row.rep << ',' << format_double(row.z_T) << ','
          << format_double(row.a_T) << '\n';
    return;
  }
  out << "{\"rows\":[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i) out << ',';
    out << "{\"upsilon\":" << format_double(rows[i].upsilon) << ",\"rep\":" << rows[i].rep
        << ",\"z_T\":" << format_double(rows[i].z_T) << ",\"a_T\":" << format_double(rows[i].a_T)
        << '}';
  }
  out << "]}\n";
}

void write_statistics(const NetworkStatistics& stats, std::ostream& out, OutputFormat format) {
  if (format == OutputFormat::csv) {
    out << "d,k,r,s,p\n";
    for (const auto& [key, p] : stats.joint)
      out << key.d << ',' << key.k << ',' << key.r << ',' << static_cast<int>(key.s) << ','
          << format_double(p) << '\n';
    return;
  }
  // Nested sparse map d -> k -> r -> s -> fraction.
  out << "{\"n\":" << stats.n << ",\"mean_degree\":" << format_double(stats.mean_degree)
      << ",\"upsilon\":" << format_double(stats.upsilon) << ",\"xi\":" << format_double(stats.xi)
      << ",\"joint\":{";
  std::uint32_t last_d = 0, last_k = 0, last_r = 0;
  bool open_d = false, open_k = false, open_r = false;
  for (const auto& [key, p] : stats.joint) {
    if (!open_d || key.d != last_d) {
      if (open_r) out << '}';
      if (open_k) out << '}';
      if (open_d) out << "},";
      out << '"' << key.d << "\":{";
      open_d = true;
      open_k = open_r = false;
    }
    if (!open_k || key.k != last_k) {
      if (open_r) out << '}';
      if (open_k) out << "},";
      out << '"' << key.k << "\":{";
      open_k = true;
      open_r = false;
    }
    if (!open_r || key.r != last_r) {
      if (open_r) out << "},";
      out << '"' << key.r << "\":{";
      open_r = true;
    } else {
      out << ',';
    }
    out << '"' << static_cast<int>(key.s) << "\":" << format_double(p);
    last_d = key.d;
    last_k = key.k;
    last_r = key.r;
  }
  if (open_r) out << '}';
  if (open_k) out << '}';
  if (open_d) out << '}';
  out << "}}\n";
}

template <typename Record>
void write_results(const Record& record, const std::string& path, OutputFormat format) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  if constexpr (std::is_same_v<Record, TrajectoryRecord>)
    write_trajectory(record, out, format);
  else if constexpr (std::is_same_v<Record, RecursionTrajectory>)
    write_recursion(record, out, format);
  else if constexpr (std::is_same_v<Record, std::vector<LimitRow>>)
    write_limit_table(record, out, format);
  else if constexpr (std::is_same_v<Record, std::vector<SweepRow>>)
    write_sweep_table(record, out, format);
  else
    write_statistics(record, out, format);
  if (!out) throw std::runtime_error("write failed: " + path);
}

template void write_results<TrajectoryRecord>(const TrajectoryRecord&, const std::string&,
                                              OutputFormat);
template void write_results<RecursionTrajectory>(const RecursionTrajectory&, const std::string&,
                                                 OutputFormat);
template void write_results<std::vector<LimitRow>>(const std::vector<LimitRow>&,
                                                   const std::string&, OutputFormat);
template void write_results<std::vector<SweepRow>>(const std::vector<SweepRow>&,
                                                   const std::string&, OutputFormat);
template void write_results<NetworkStatistics>(const NetworkStatistics&, const std::string&,
                                               OutputFormat);

NetworkStatistics read_statistics_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open statistics file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("cannot parse statistics JSON " + path + ": " + e.what());
  }
  NetworkStatistics stats;
  stats.n = doc.at("n").get<std::int64_t>();
  for (const auto& [d_key, by_k] : doc.at("joint").items())
    for (const auto& [k_key, by_r] : by_k.items())
      for (const auto& [r_key, by_s] : by_r.items())
        for (const auto& [s_key, p] : by_s.items()) {
          JointKey key;
          key.d = static_cast<std::uint32_t>(std::stoul(d_key));
          key.k = static_cast<std::uint32_t>(std::stoul(k_key));
          key.r = static_cast<std::uint32_t>(std::stoul(r_key));
          key.s = static_cast<std::uint8_t>(std::stoul(s_key));
          stats.joint[key] = p.get<double>();
        }
  stats.finalize();
  return stats;
}

void export_edge_list(const Network& net, std::ostream& out) {
  out << "# directed edge list: tail head\n";
  for (NodeId i = 0; i < net.node_count(); ++i)
    for (NodeId j : net.out_neighbors(i)) out << i << ' ' << j << '\n';
}

void write_sample_sidecar(const Network& net, std::uint64_t seed, std::ostream& out) {
  out << "{\"seed\":" << seed << ",\"thresholds\":[";
  for (NodeId i = 0; i < net.node_count(); ++i) {
    if (i) out << ',';
    out << net.threshold(i);
  }
  out << "],\"initial_states\":[";
  for (NodeId i = 0; i < net.node_count(); ++i) {
    if (i) out << ',';
    out << static_cast<int>(net.initial_state(i));
  }
  out << "]}\n";
}

}  // namespace ltm
