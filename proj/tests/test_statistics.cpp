#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ltm/statistics.hpp"
#include "testutil.hpp"

using namespace ltm;

TEST_CASE("extract on the two-cycle") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}};
  const Network net = build_network(edges, {1, 1}, {1, 0});
  const NetworkStatistics stats = extract(net);
  CHECK(stats.n == 2);
  CHECK(stats.mean_degree == doctest::Approx(1.0));
  CHECK(stats.joint.at({1, 1, 1, 1}) == doctest::Approx(0.5));
  CHECK(stats.joint.at({1, 1, 1, 0}) == doctest::Approx(0.5));
  CHECK(stats.upsilon == doctest::Approx(0.5));
  CHECK(stats.xi == doctest::Approx(0.5));
}

TEST_CASE("constant in-degrees make q equal p") {
  // 3-cycle topology plus varying thresholds: every in-degree is 1.
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {2, 0}};
  const Network net = build_network(edges, {1, 0, 1}, {0, 1, 0});
  const NetworkStatistics stats = extract(net);
  for (const auto& [key, p] : stats.p_kr) CHECK(stats.q_kr.at(key) == doctest::Approx(p));
  CHECK(stats.xi == doctest::Approx(stats.upsilon));
}

TEST_CASE("compatibility checks") {
  SplitMix64 gen(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Network net = test::random_network(gen, 15);
    const NetworkStatistics stats = extract(net);
    const CompatibilityReport report =
        check_compatibility(stats, static_cast<std::int64_t>(net.node_count()));
    CHECK(report.compatible);
  }

  NetworkStatistics bad;
  bad.joint[{1, 1, 1, 1}] = 1.0 / 3.0;
  bad.joint[{1, 1, 0, 0}] = 2.0 / 3.0;
  bad.finalize();
  const CompatibilityReport report = check_compatibility(bad, 10);
  CHECK_FALSE(report.compatible);
  CHECK(!report.violations.empty());
}

TEST_CASE("homogeneous design is compatible") {
  const NetworkStatistics stats =
      seeded_statistics({{7, 7, 3, 1.0}}, 2000, 0.246);
  CHECK(check_compatibility(stats, 2000).compatible);
  CHECK(stats.upsilon == doctest::Approx(0.246));
  CHECK(stats.xi == doctest::Approx(0.246));
}

TEST_CASE("synthesize with a step CDF concentrates threshold mass") {
  ThresholdCdf cdf;
  cdf.atoms.push_back({1, 2, 1.0});
  const NetworkStatistics stats = synthesize(cdf, DegreeLaw::homogeneous(7, 7), 0.3, 1000);
  // ceil(3.5) = 4: the only (k,r) cell is (7,4).
  CHECK(stats.p_kr.size() == 1);
  CHECK(stats.p_kr.begin()->first.k == 7);
  CHECK(stats.p_kr.begin()->first.r == 4);
  CHECK(stats.upsilon == doctest::Approx(0.3));
}

TEST_CASE("synthesize with zero seed fraction") {
  ThresholdCdf cdf;
  cdf.atoms.push_back({1, 4, 0.4});
  cdf.atoms.push_back({3, 4, 0.6});
  const NetworkStatistics stats = synthesize(cdf, DegreeLaw::homogeneous(5, 5), 0.0, 500);
  CHECK(stats.upsilon == 0.0);
  CHECK(stats.xi == 0.0);
  for (const auto& [key, p] : stats.joint) CHECK(key.s == 0);
  CHECK(check_compatibility(stats, 500).compatible);
}

TEST_CASE("synthesize keeps out-degree-0 mass at threshold 0") {
  ThresholdCdf cdf;
  cdf.atoms.push_back({3, 4, 1.0});
  DegreeLaw law;
  law.joint_dk[{2, 0}] = 0.5;
  law.joint_dk[{0, 2}] = 0.5;
  const NetworkStatistics stats = synthesize(cdf, law, 0.0, 100);
  CHECK(stats.p_kr.at({0, 0}) == doctest::Approx(0.5));
  CHECK(stats.p_kr.at({2, 2}) == doctest::Approx(0.5));  // ceil(3/4 * 2) = 2
}

TEST_CASE("synthesize over a product law preserves marginal counts") {
  // Example-2-style degrees: out-classes 45/55, in-degrees independent.
  std::map<std::uint32_t, double> in_marginal{{14, 0.45}, {11, 0.55}};
  std::map<std::uint32_t, double> out_marginal{{14, 0.45}, {11, 0.55}};
  ThresholdCdf cdf;
  cdf.atoms.push_back({1, 5, 1.0});
  const NetworkStatistics stats =
      synthesize(cdf, DegreeLaw::product(in_marginal, out_marginal), 0.25, 2000);
  CHECK(check_compatibility(stats, 2000).compatible);
  double out14 = 0.0;
  for (const auto& [key, p] : stats.joint)
    if (key.k == 14) out14 += p;
  CHECK(out14 == doctest::Approx(0.45));
  CHECK(stats.upsilon == doctest::Approx(0.25));
}

TEST_CASE("PLTM precondition detection") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}};
  const Network holds = build_network(edges, {1, 1}, {0, 0});
  CHECK(pltm_precondition(extract(holds)));
  const Network violated = build_network(edges, {1, 1}, {1, 0});
  CHECK_FALSE(pltm_precondition(extract(violated)));
  // Thresholds of seeded nodes set to zero restore the premise.
  const Network repaired = build_network(edges, {0, 1}, {1, 0});
  CHECK(pltm_precondition(extract(repaired)));
}

TEST_CASE("threshold CDF exact fence behavior") {
  ThresholdCdf cdf;
  cdf.atoms.push_back({1, 2, 1.0});
  // F(r/k) jumps exactly when r/k reaches 1/2; k = 7 puts it at r = 4.
  CHECK(cdf.value_at_ratio(3, 7) == doctest::Approx(0.0));
  CHECK(cdf.value_at_ratio(4, 7) == doctest::Approx(1.0));
  // Even denominators land exactly on the fence: r/k = 1/2 includes the atom.
  CHECK(cdf.value_at_ratio(3, 6) == doctest::Approx(1.0));
  CHECK(cdf.value_at_ratio(2, 6) == doctest::Approx(0.0));
  CHECK(cdf.ceil_threshold(0, 7) == 4);
  CHECK(cdf.ceil_threshold(0, 6) == 3);
}

TEST_CASE("largest remainder apportionment") {
  const auto counts = apportion_largest_remainder({0.3, 0.3, 0.4}, 10);
  CHECK(counts == std::vector<std::int64_t>{3, 3, 4});
  const auto uneven = apportion_largest_remainder({1.0, 1.0, 1.0}, 10);
  CHECK(uneven[0] + uneven[1] + uneven[2] == 10);
  // Deterministic tie-breaking by index.
  CHECK(uneven == std::vector<std::int64_t>{4, 3, 3});
}

TEST_CASE("undirected statistics extraction") {
  const std::vector<Edge> edges{{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  const Network net = build_network(edges, {1, 2, 1}, {1, 0, 0});
  const UndirectedStatistics stats = extract_undirected(net);
  CHECK(stats.n == 3);
  CHECK(stats.u.at({1, 1, 1}) == doctest::Approx(1.0 / 3.0));
  CHECK(stats.u.at({2, 2, 0}) == doctest::Approx(1.0 / 3.0));
  CHECK(stats.mean_degree == doctest::Approx(4.0 / 3.0));

  const std::vector<Edge> asym{{0, 1}};
  const Network directed = build_network(asym, {1, 0}, {0, 0});
  CHECK_THROWS_AS(extract_undirected(directed), std::invalid_argument);
}
