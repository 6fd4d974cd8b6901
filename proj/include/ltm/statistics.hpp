#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ltm/network.hpp"

namespace ltm {

struct JointKey {
  std::uint32_t d = 0;  // in-degree
  std::uint32_t k = 0;  // out-degree
  std::uint32_t r = 0;  // threshold
  std::uint8_t s = 0;   // initial state
  auto operator<=>(const JointKey&) const = default;
};

struct KrKey {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  auto operator<=>(const KrKey&) const = default;
};

struct KrsKey {
  std::uint32_t k = 0;
  std::uint32_t r = 0;
  std::uint8_t s = 0;
  auto operator<=>(const KrsKey&) const = default;
};

/// Joint (d,k,r,s) node fractions of a network together with every marginal
/// the mean-field recursion needs.  q-marginals weight each cell by d/d_mean
/// (fractions of links pointing to such nodes).
struct NetworkStatistics {
  std::map<JointKey, double> joint;
  std::int64_t n = 0;
  double mean_degree = 0.0;

  std::map<KrKey, double> p_kr, q_kr;
  std::map<KrsKey, double> p_krs, q_krs;
  double upsilon = 0.0;  // fraction of nodes with initial state 1
  double xi = 0.0;       // fraction of links pointing to such nodes
  std::uint32_t d_max = 0, k_max = 0;

  /// Recomputes every derived field from `joint` and `n`.
  void finalize();
};

/// Empirical statistics of a network (counts divided by n).
NetworkStatistics extract(const Network& net);

/// Statistics from integer cell counts; n is the total count.
NetworkStatistics statistics_from_counts(const std::map<JointKey, std::int64_t>& counts);

struct CompatibilityReport {
  bool compatible = true;
  std::vector<std::string> violations;
};

/// Verifies that n * p is integral on every cell, fractions sum to one, the
/// in/out degree balance holds, and r <= k everywhere.
CompatibilityReport check_compatibility(const NetworkStatistics& stats, std::int64_t n);

/// True iff p_{d,k,r,1} = 0 for all r >= 1, i.e. rho_i <= kappa_i (1 - sigma_i)
/// for every node of the source network (the progressive-reduction premise).
bool pltm_precondition(const NetworkStatistics& stats);

/// Finite atomic normalized-threshold CDF.  Atoms are exact rationals so
/// that ceil(theta * k) and comparisons at r/k fences never go through
/// floating point.
struct ThresholdCdf {
  struct Atom {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double mass = 0.0;
  };
  std::vector<Atom> atoms;  // sorted by value

  /// F(theta) for real theta.
  double value(double theta) const;
  /// F(r/k) by exact rational comparison.
  double value_at_ratio(std::int64_t r, std::int64_t k) const;
  /// Threshold mass F(r/k) - F((r-1)/k).
  double mass_at(std::int64_t r, std::int64_t k) const;
  /// ceil(theta_j * kappa) for atom j, in integer arithmetic.
  std::uint32_t ceil_threshold(std::size_t atom_index, std::uint32_t kappa) const;

  void validate() const;  // masses sum to one, atoms in [0,1], sorted
};

/// Sparse joint (in-degree, out-degree) fractions.
struct DegreeLaw {
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> joint_dk;

  static DegreeLaw homogeneous(std::uint32_t d, std::uint32_t k);
  /// Independent product of the two marginals.
  static DegreeLaw product(const std::map<std::uint32_t, double>& in_marginal,
                           const std::map<std::uint32_t, double>& out_marginal);
  static DegreeLaw from_statistics(const NetworkStatistics& stats);
};

/// Builds n-compatible statistics p_{d,k,r,s} = p_{d,k} (F(r/k)-F((r-1)/k))
/// (v 1_{s=1} + (1-v) 1_{s=0}), with all threshold mass of out-degree-0
/// nodes at r = 0.  Cell counts are rounded by largest-remainder
/// apportionment, which preserves the (d,k) marginals exactly and places
/// exactly round(n*v) initial adopters.
NetworkStatistics synthesize(const ThresholdCdf& cdf, const DegreeLaw& degrees, double upsilon,
                             std::int64_t n);

/// Statistics for an explicit list of (d,k,r) cell fractions plus a seed
/// fraction split, for populations not expressible through a single CDF.
struct CellFraction {
  std::uint32_t d = 0, k = 0, r = 0;
  double fraction = 0.0;
};
NetworkStatistics seeded_statistics(const std::vector<CellFraction>& cells, std::int64_t n,
                                    double upsilon);

/// Degree/threshold/state fractions of an undirected network (delta_i ==
/// kappa_i for every node).
struct UndirectedStatistics {
  std::map<KrsKey, double> u;
  std::int64_t n = 0;
  double mean_degree = 0.0;
};

UndirectedStatistics extract_undirected(const Network& net);

/// Largest-remainder apportionment of `total` units proportional to
/// `weights` (deterministic: ties broken by lower index).
std::vector<std::int64_t> apportion_largest_remainder(const std::vector<double>& weights,
                                                      std::int64_t total);

}  // namespace ltm
