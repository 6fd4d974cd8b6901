#include "ltm/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ltm {

namespace {

std::string cell_name(const JointKey& key) {
  return "(" + std::to_string(key.d) + "," + std::to_string(key.k) + "," + std::to_string(key.r) +
         "," + std::to_string(key.s) + ")";
}

}  // namespace

void NetworkStatistics::finalize() {
  p_kr.clear();
  q_kr.clear();
  p_krs.clear();
  q_krs.clear();
  upsilon = 0.0;
  xi = 0.0;
  d_max = 0;
  k_max = 0;

  double total_in = 0.0, total_out = 0.0;
  for (const auto& [key, p] : joint) {
    total_in += static_cast<double>(key.d) * p;
    total_out += static_cast<double>(key.k) * p;
    d_max = std::max(d_max, key.d);
    k_max = std::max(k_max, key.k);
  }
  mean_degree = total_in;

  for (const auto& [key, p] : joint) {
    p_kr[{key.k, key.r}] += p;
    p_krs[{key.k, key.r, key.s}] += p;
    if (key.s == 1) upsilon += p;
    if (mean_degree > 0.0) {
      const double q = static_cast<double>(key.d) * p / mean_degree;
      q_kr[{key.k, key.r}] += q;
      q_krs[{key.k, key.r, key.s}] += q;
      if (key.s == 1) xi += q;
    }
  }
}

NetworkStatistics extract(const Network& net) {
  std::map<JointKey, std::int64_t> counts;
  for (NodeId i = 0; i < net.node_count(); ++i)
    ++counts[{net.in_degree(i), net.out_degree(i), net.threshold(i), net.initial_state(i)}];
  NetworkStatistics stats = statistics_from_counts(counts);
  if (net.node_count() > 0)
    stats.mean_degree = static_cast<double>(net.link_count()) / static_cast<double>(net.node_count());
  return stats;
}

NetworkStatistics statistics_from_counts(const std::map<JointKey, std::int64_t>& counts) {
  NetworkStatistics stats;
  std::int64_t total = 0;
  for (const auto& [key, c] : counts) {
    if (c < 0) throw std::invalid_argument("negative count for cell " + cell_name(key));
    total += c;
  }
  stats.n = total;
  if (total > 0)
    for (const auto& [key, c] : counts)
      if (c > 0) stats.joint[key] = static_cast<double>(c) / static_cast<double>(total);
  stats.finalize();
  return stats;
}

CompatibilityReport check_compatibility(const NetworkStatistics& stats, std::int64_t n) {
  CompatibilityReport report;
  auto flag = [&report](std::string message) {
    report.compatible = false;
    report.violations.push_back(std::move(message));
  };

  if (n <= 0) flag("network size must be positive");
  double total = 0.0, total_in = 0.0, total_out = 0.0;
  for (const auto& [key, p] : stats.joint) {
    if (p < 0.0) flag("negative fraction at cell " + cell_name(key));
    if (key.r > key.k) flag("cell " + cell_name(key) + " has threshold above out-degree");
    const double scaled = p * static_cast<double>(n);
    if (std::abs(scaled - std::llround(scaled)) > 1e-6)
      flag("cell " + cell_name(key) + ": n*p = " + std::to_string(scaled) + " is not integral");
    total += p;
    total_in += static_cast<double>(key.d) * p;
    total_out += static_cast<double>(key.k) * p;
  }
  if (std::abs(total - 1.0) > 1e-9) flag("joint fractions sum to " + std::to_string(total));
  if (std::abs(total_in - total_out) > 1e-9 * std::max(1.0, total_in))
    flag("in/out degree balance broken: sum d*p = " + std::to_string(total_in) +
         ", sum k*p = " + std::to_string(total_out));
  return report;
}

bool pltm_precondition(const NetworkStatistics& stats) {
  for (const auto& [key, p] : stats.joint)
    if (key.s == 1 && key.r >= 1 && p > 0.0) return false;
  return true;
}

double ThresholdCdf::value(double theta) const {
  double total = 0.0;
  for (const Atom& atom : atoms)
    if (static_cast<double>(atom.num) / static_cast<double>(atom.den) <= theta) total += atom.mass;
  return total;
}

double ThresholdCdf::value_at_ratio(std::int64_t r, std::int64_t k) const {
  if (r < 0) return 0.0;
  if (k <= 0 || r >= k) return 1.0;
  double total = 0.0;
  for (const Atom& atom : atoms)
    if (atom.num * k <= atom.den * r) total += atom.mass;
  return total;
}

double ThresholdCdf::mass_at(std::int64_t r, std::int64_t k) const {
  return value_at_ratio(r, k) - value_at_ratio(r - 1, k);
}

std::uint32_t ThresholdCdf::ceil_threshold(std::size_t atom_index, std::uint32_t kappa) const {
  const Atom& atom = atoms.at(atom_index);
  const std::int64_t num = atom.num * static_cast<std::int64_t>(kappa);
  return static_cast<std::uint32_t>((num + atom.den - 1) / atom.den);
}

void ThresholdCdf::validate() const {
  if (atoms.empty()) throw std::invalid_argument("threshold CDF needs at least one atom");
  double total = 0.0;
  double previous = -1.0;
  for (const Atom& atom : atoms) {
    if (atom.den <= 0) throw std::invalid_argument("threshold atom has nonpositive denominator");
    const double value = static_cast<double>(atom.num) / static_cast<double>(atom.den);
    if (value < 0.0 || value > 1.0)
      throw std::invalid_argument("threshold atom outside [0,1]");
    if (value <= previous) throw std::invalid_argument("threshold atoms must be strictly increasing");
    if (atom.mass < 0.0) throw std::invalid_argument("negative atom mass");
    previous = value;
    total += atom.mass;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("threshold atom masses sum to " + std::to_string(total));
}

DegreeLaw DegreeLaw::homogeneous(std::uint32_t d, std::uint32_t k) {
  DegreeLaw law;
  law.joint_dk[{d, k}] = 1.0;
  return law;
}

DegreeLaw DegreeLaw::product(const std::map<std::uint32_t, double>& in_marginal,
                             const std::map<std::uint32_t, double>& out_marginal) {
  DegreeLaw law;
  for (const auto& [d, pd] : in_marginal)
    for (const auto& [k, pk] : out_marginal)
      if (pd * pk > 0.0) law.joint_dk[{d, k}] = pd * pk;
  return law;
}

DegreeLaw DegreeLaw::from_statistics(const NetworkStatistics& stats) {
  DegreeLaw law;
  for (const auto& [key, p] : stats.joint) law.joint_dk[{key.d, key.k}] += p;
  return law;
}

std::vector<std::int64_t> apportion_largest_remainder(const std::vector<double>& weights,
                                                      std::int64_t total) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::int64_t> counts(weights.size(), 0);
  if (total <= 0 || weights.empty()) return counts;
  if (sum <= 0.0) throw std::invalid_argument("apportionment weights sum to zero");

  std::int64_t assigned = 0;
  std::vector<std::pair<double, std::size_t>> remainders;
  remainders.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative apportionment weight");
    const double share = weights[i] / sum * static_cast<double>(total);
    counts[i] = static_cast<std::int64_t>(std::floor(share));
    assigned += counts[i];
    remainders.emplace_back(share - static_cast<double>(counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::int64_t leftover = total - assigned;
  for (std::size_t j = 0; leftover > 0 && j < remainders.size(); ++j) {
    ++counts[remainders[j].second];
    --leftover;
  }
  if (leftover != 0) throw std::runtime_error("apportionment failed to place all units");
  return counts;
}

namespace {

// Splits exactly round(n * upsilon) state-1 nodes across cells in
// proportion to their counts, capped by cell capacity.
std::map<JointKey, std::int64_t> split_states(const std::map<JointKey, std::int64_t>& drk_counts,
                                              std::int64_t n, double upsilon) {
  if (upsilon < 0.0 || upsilon > 1.0) throw std::invalid_argument("seed fraction outside [0,1]");
  const std::int64_t ones_total = std::llround(static_cast<double>(n) * upsilon);

  std::vector<JointKey> keys;
  std::vector<double> weights;
  for (const auto& [key, c] : drk_counts) {
    keys.push_back(key);
    weights.push_back(static_cast<double>(c));
  }
  std::vector<std::int64_t> ones(keys.size(), 0);
  if (ones_total > 0) {
    ones = apportion_largest_remainder(weights, ones_total);
    // Capacity repair: shift any excess to cells with room (largest first).
    std::int64_t excess = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::int64_t cap = drk_counts.at(keys[i]);
      if (ones[i] > cap) {
        excess += ones[i] - cap;
        ones[i] = cap;
      }
    }
    for (std::size_t i = 0; excess > 0 && i < keys.size(); ++i) {
      const std::int64_t room = drk_counts.at(keys[i]) - ones[i];
      const std::int64_t take = std::min(room, excess);
      ones[i] += take;
      excess -= take;
    }
    if (excess != 0) throw std::runtime_error("cannot place requested seed count");
  }

  std::map<JointKey, std::int64_t> counts;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::int64_t c = drk_counts.at(keys[i]);
    JointKey zero = keys[i];
    zero.s = 0;
    JointKey one = keys[i];
    one.s = 1;
    if (c - ones[i] > 0) counts[zero] += c - ones[i];
    if (ones[i] > 0) counts[one] += ones[i];
  }
  return counts;
}

}  // namespace

NetworkStatistics synthesize(const ThresholdCdf& cdf, const DegreeLaw& degrees, double upsilon,
                             std::int64_t n) {
  cdf.validate();
  if (n <= 0) throw std::invalid_argument("network size must be positive");

  // Stage 1: apportion n over (d,k) cells.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> dk_keys;
  std::vector<double> dk_weights;
  for (const auto& [dk, p] : degrees.joint_dk) {
    dk_keys.push_back(dk);
    dk_weights.push_back(p);
  }
  const std::vector<std::int64_t> dk_counts = apportion_largest_remainder(dk_weights, n);
  std::int64_t in_total = 0, out_total = 0;
  for (std::size_t i = 0; i < dk_keys.size(); ++i) {
    in_total += static_cast<std::int64_t>(dk_keys[i].first) * dk_counts[i];
    out_total += static_cast<std::int64_t>(dk_keys[i].second) * dk_counts[i];
  }
  if (in_total != out_total)
    throw std::invalid_argument("degree law rounds to an unbalanced profile (sum d = " +
                                std::to_string(in_total) + ", sum k = " + std::to_string(out_total) +
                                "); impossible to repair");

  // Stage 2: split each (d,k) cell over thresholds by the CDF increments.
  std::map<JointKey, std::int64_t> drk_counts;
  for (std::size_t i = 0; i < dk_keys.size(); ++i) {
    const auto [d, k] = dk_keys[i];
    const std::int64_t c = dk_counts[i];
    if (c == 0) continue;
    if (k == 0) {
      drk_counts[{d, k, 0, 0}] += c;
      continue;
    }
    std::vector<double> masses(k + 1);
    for (std::uint32_t r = 0; r <= k; ++r) masses[r] = cdf.mass_at(r, k);
    const std::vector<std::int64_t> by_r = apportion_largest_remainder(masses, c);
    for (std::uint32_t r = 0; r <= k; ++r)
      if (by_r[r] > 0) drk_counts[{d, k, r, 0}] += by_r[r];
  }

  // Stage 3: seed split.
  return statistics_from_counts(split_states(drk_counts, n, upsilon));
}

NetworkStatistics seeded_statistics(const std::vector<CellFraction>& cells, std::int64_t n,
                                    double upsilon) {
  if (n <= 0) throw std::invalid_argument("network size must be positive");
  std::vector<double> weights;
  weights.reserve(cells.size());
  for (const CellFraction& cell : cells) {
    if (cell.r > cell.k) throw std::invalid_argument("cell threshold above out-degree");
    weights.push_back(cell.fraction);
  }
  const std::vector<std::int64_t> counts = apportion_largest_remainder(weights, n);
  std::map<JointKey, std::int64_t> drk_counts;
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (counts[i] > 0) drk_counts[{cells[i].d, cells[i].k, cells[i].r, 0}] += counts[i];
  std::int64_t in_total = 0, out_total = 0;
  for (const auto& [key, c] : drk_counts) {
    in_total += static_cast<std::int64_t>(key.d) * c;
    out_total += static_cast<std::int64_t>(key.k) * c;
  }
  if (in_total != out_total)
    throw std::invalid_argument("cell fractions round to an unbalanced profile");
  return statistics_from_counts(split_states(drk_counts, n, upsilon));
}

UndirectedStatistics extract_undirected(const Network& net) {
  UndirectedStatistics stats;
  stats.n = static_cast<std::int64_t>(net.node_count());
  if (stats.n == 0) return stats;
  std::map<KrsKey, std::int64_t> counts;
  for (NodeId i = 0; i < net.node_count(); ++i) {
    if (net.in_degree(i) != net.out_degree(i))
      throw std::invalid_argument("node " + std::to_string(i) +
                                  " has unequal in/out degree; network is not undirected");
    ++counts[{net.out_degree(i), net.threshold(i), net.initial_state(i)}];
  }
  for (const auto& [key, c] : counts) {
    const double u = static_cast<double>(c) / static_cast<double>(stats.n);
    stats.u[key] = u;
    stats.mean_degree += static_cast<double>(key.k) * u;
  }
  return stats;
}

}  // namespace ltm
