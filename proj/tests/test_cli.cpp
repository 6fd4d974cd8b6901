// End-to-end checks of the command-line tool: exit codes, output schemas,
// and byte-identical reruns under a fixed master seed.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int run_cli(const std::string& args) {
  const std::string command = std::string(LTM_CLI_PATH) + " " + args + " >/dev/null 2>cli_stderr.txt";
  return std::system(command.c_str());
}

void write_fixture_graph(const std::string& path) {
  std::ofstream out(path);
  REQUIRE(out);
  out << "# toy graph\n";
  for (int i = 0; i < 40; ++i)
    for (int step = 1; step <= 4; ++step) out << i << ' ' << (i + step) % 40 << '\n';
}

}  // namespace

TEST_CASE("stats command emits the nested JSON layout") {
  write_fixture_graph("cli_graph.txt");
  REQUIRE(run_cli("stats --input cli_graph.txt --format json --out cli_stats.json "
                  "--marginals-out cli_marginals.csv") == 0);
  const std::string stats = slurp("cli_stats.json");
  CHECK(stats.find("\"n\":40") != std::string::npos);
  CHECK(stats.find("\"joint\"") != std::string::npos);
  const std::string marginals = slurp("cli_marginals.csv");
  CHECK(marginals.rfind("kind,degree,fraction\n", 0) == 0);
}

TEST_CASE("recursion command consumes stats files") {
  REQUIRE(run_cli("stats --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon 0.5 --seed 4 "
                  "--format json --out cli_stats_seeded.json") == 0);
  REQUIRE(run_cli("recursion --stats cli_stats_seeded.json --horizon 40 --out cli_rec.csv "
                  "--limit-out cli_limit.csv --fixed-points-out cli_fp.csv --grid 21") == 0);
  CHECK(slurp("cli_rec.csv").rfind("t,x,y\n", 0) == 0);
  CHECK(slurp("cli_limit.csv").rfind("xi,x_star,y_star\n", 0) == 0);
  CHECK(slurp("cli_fp.csv").rfind("x,phi_prime,stability\n", 0) == 0);
}

TEST_CASE("simulate and sweep produce schema-stable tables") {
  REQUIRE(run_cli("simulate --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon 0.4 --seed 9 "
                  "--horizon 30 --out cli_traj.csv") == 0);
  CHECK(slurp("cli_traj.csv").rfind("t,z,a\n", 0) == 0);

  REQUIRE(run_cli("sweep --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon-grid 5 "
                  "--replicas 2 --horizon 20 --seed 11 --out cli_sweep.csv "
                  "--staircase-out cli_stair.csv") == 0);
  CHECK(slurp("cli_sweep.csv").rfind("upsilon,rep,z_T,a_T\n", 0) == 0);
  CHECK(slurp("cli_stair.csv").rfind("xi,x_star,y_star\n", 0) == 0);
}

TEST_CASE("identical seeds give byte-identical outputs") {
  REQUIRE(run_cli("sweep --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon-grid 4 "
                  "--replicas 2 --horizon 15 --seed 77 --out cli_sweep_a.csv") == 0);
  REQUIRE(run_cli("sweep --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon-grid 4 "
                  "--replicas 2 --horizon 15 --seed 77 --out cli_sweep_b.csv") == 0);
  CHECK(slurp("cli_sweep_a.csv") == slurp("cli_sweep_b.csv"));

  REQUIRE(run_cli("sweep --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon-grid 4 "
                  "--replicas 2 --horizon 15 --seed 78 --out cli_sweep_c.csv") == 0);
  CHECK(slurp("cli_sweep_a.csv") != slurp("cli_sweep_c.csv"));
}

TEST_CASE("sample exports a parseable draw with sidecar") {
  REQUIRE(run_cli("stats --input cli_graph.txt --threshold-cdf 1/2:1 --upsilon 0.25 --seed 2 "
                  "--format json --out cli_stats_sample.json") == 0);
  REQUIRE(run_cli("sample --stats cli_stats_sample.json --n 40 --seed 13 --out cli_draw.txt "
                  "--sidecar-out cli_sidecar.json") == 0);
  const std::string sidecar = slurp("cli_sidecar.json");
  CHECK(sidecar.find("\"seed\":13") != std::string::npos);
  CHECK(sidecar.find("\"thresholds\"") != std::string::npos);
  REQUIRE(run_cli("stats --input cli_draw.txt --format csv --out cli_redraw.csv") == 0);
}

TEST_CASE("branching and concentration commands run") {
  REQUIRE(run_cli("branching --stats cli_stats_sample.json --t 2 --replicas 200 --seed 3 "
                  "--out cli_branch.csv") == 0);
  CHECK(slurp("cli_branch.csv").rfind("t,estimate,std_error,y_t,replicas,discarded\n", 0) == 0);

  REQUIRE(run_cli("concentration --stats cli_stats_sample.json --n-grid 40,80 --t 2 "
                  "--replicas 3 --seed 5 --out cli_conc.csv") == 0);
  CHECK(slurp("cli_conc.csv").rfind("n,rep,max_dev,gamma_t_over_n,tail_bound\n", 0) == 0);
}

TEST_CASE("config file supplies defaults") {
  {
    std::ofstream config("cli_config.json");
    config << "{\"input\":\"cli_graph.txt\",\"threshold_cdf\":\"1/2:1\",\"upsilon\":0.4,"
           << "\"horizon\":25,\"seed\":21,\"out\":\"cli_cfg_traj.csv\"}\n";
  }
  REQUIRE(run_cli("simulate --config cli_config.json") == 0);
  CHECK(slurp("cli_cfg_traj.csv").rfind("t,z,a\n", 0) == 0);
}

TEST_CASE("validation failures exit nonzero with a JSON error record") {
  CHECK(run_cli("simulate --input does_not_exist.txt --threshold-cdf 1/2:1") != 0);
  const std::string err = slurp("cli_stderr.txt");
  CHECK(err.find("{\"error\":") != std::string::npos);

  CHECK(run_cli("recursion") != 0);
  CHECK(run_cli("sweep --input cli_graph.txt") != 0);
  CHECK(run_cli("simulate --input cli_graph.txt --threshold-cdf 1/2:1 --mode bogus") != 0);
}
