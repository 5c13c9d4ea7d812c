#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <functional>
#include <set>

#include "doctest.h"
#include "gridshock/csv.hpp"
#include "gridshock/error.hpp"
#include "gridshock/scenario.hpp"
#include "support/synthetic.hpp"
#include "support/tmpdir.hpp"

using namespace gridshock;
using namespace gridshock::testsupport;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

FailureProbabilities uniform_probs(const AssetNetwork& net, double p) {
  FailureProbabilities out;
  for (const AssetEdge& e : net.edges()) out.p[e.id] = p;
  return out;
}

}  // namespace

TEST_CASE("matched removal count rounds half up") {
  CHECK(matched_removal_count(0.0) == 0);
  CHECK(matched_removal_count(0.4) == 0);
  CHECK(matched_removal_count(0.5) == 1);
  CHECK(matched_removal_count(3.4) == 3);
  CHECK(matched_removal_count(3.5) == 4);
  CHECK(matched_removal_count(3.6) == 4);
  CHECK(code_of([] { matched_removal_count(-0.1); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("degenerate climate probabilities") {
  AssetNetwork net = cycle4_net();
  ScenarioSet all_fail = sample_climate_scenarios(uniform_probs(net, 1.0), 5, 1);
  for (const FailureScenario& s : all_fail.scenarios) CHECK(s.failed_count() == 4);
  ScenarioSet none_fail = sample_climate_scenarios(uniform_probs(net, 0.0), 5, 1);
  for (const FailureScenario& s : none_fail.scenarios) CHECK(s.failed_count() == 0);
}

TEST_CASE("single asset at p=0.5 fails about half the time") {
  AssetNetwork net = single_edge_net();
  ScenarioSet set = sample_climate_scenarios(uniform_probs(net, 0.5), 10000, 7);
  int failures = 0;
  for (const FailureScenario& s : set.scenarios) failures += s.failed_count();
  double freq = failures / 10000.0;
  CHECK(freq > 0.485);  // binomial 3 sigma
  CHECK(freq < 0.515);
}

TEST_CASE("climate sampling is deterministic and keying separates runs") {
  AssetNetwork net = cycle4_net();
  FailureProbabilities p = uniform_probs(net, 0.5);
  ScenarioSet a = sample_climate_scenarios(p, 20, 42, "2031-07-15");
  ScenarioSet b = sample_climate_scenarios(p, 20, 42, "2031-07-15");
  REQUIRE(a.scenarios.size() == 20);
  CHECK(a.event_ref == "2031-07-15");
  for (int j = 0; j < 20; ++j) {
    CHECK(a.scenarios[j].run_index == j);
    CHECK(a.scenarios[j].states == b.scenarios[j].states);
    CHECK(a.scenarios[j].strategy == Strategy::Climate);
  }
  // a longer set extends, never rewrites, earlier runs
  ScenarioSet c = sample_climate_scenarios(p, 40, 42, "2031-07-15");
  for (int j = 0; j < 20; ++j) CHECK(c.scenarios[j].states == a.scenarios[j].states);
  // different seed decorrelates
  ScenarioSet d = sample_climate_scenarios(p, 20, 43, "2031-07-15");
  int same = 0;
  for (int j = 0; j < 20; ++j) same += d.scenarios[j].states == a.scenarios[j].states;
  CHECK(same < 20);
}

TEST_CASE("climate failed counts converge on the expected total") {
  // heterogeneous probabilities over a 10-edge line graph
  std::string nodes = "id,lat,lon\n";
  std::string edges = "id,u,v,length_km,daily_traffic\n";
  for (int i = 0; i <= 10; ++i)
    nodes += "N" + std::to_string(i) + "," + std::to_string(47.0 + 0.01 * i) + ",7\n";
  for (int i = 0; i < 10; ++i)
    edges += "E" + std::to_string(i) + ",N" + std::to_string(i) + ",N" +
             std::to_string(i + 1) + ",5,10\n";
  AssetNetwork net = net_from_csv(nodes, edges);
  FailureProbabilities probs;
  double psi = 0.0, var = 0.0;
  int k = 0;
  for (const AssetEdge& e : net.edges()) {
    double p = 0.05 + 0.09 * k++;
    probs.p[e.id] = p;
    psi += p;
    var += p * (1 - p);
  }
  const int runs = 10000;
  ScenarioSet set = sample_climate_scenarios(probs, runs, 5);
  double total = 0.0;
  for (const FailureScenario& s : set.scenarios) total += double(s.failed_count());
  double mean = total / runs;
  CHECK(std::abs(mean - psi) <= 3.0 * std::sqrt(var) / std::sqrt(double(runs)));
}

TEST_CASE("climate rejects out-of-range probabilities") {
  AssetNetwork net = single_edge_net();
  FailureProbabilities bad;
  bad.p = {{"AB", 1.5}};
  CHECK(code_of([&] { sample_climate_scenarios(bad, 1, 0); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("random scenarios remove exactly the matched count") {
  AssetNetwork net = cycle4_net();
  SUBCASE("psi below half removes nothing") {
    for (const FailureScenario& s : generate_random_scenarios(net, 0.4, 10, 3).scenarios)
      CHECK(s.failed_count() == 0);
  }
  SUBCASE("fractional psi rounds") {
    for (const FailureScenario& s : generate_random_scenarios(net, 3.4, 50, 3).scenarios) {
      CHECK(s.failed_count() == 3);
      CHECK(s.failed_ids().size() == 3);  // distinct by construction
    }
  }
  SUBCASE("psi equal to the edge count empties the network") {
    for (const FailureScenario& s : generate_random_scenarios(net, 4.0, 5, 3).scenarios)
      CHECK(s.failed_count() == 4);
  }
  SUBCASE("too many removals") {
    CHECK(code_of([&] { generate_random_scenarios(net, 4.6, 1, 3); }) ==
          ErrorCode::TooManyRemovals);
  }
}

TEST_CASE("random selection is uniform across edges") {
  AssetNetwork net = cycle4_net();
  std::map<std::string, int> hits;
  const int runs = 20000;
  for (const FailureScenario& s : generate_random_scenarios(net, 1.0, runs, 11).scenarios)
    for (const std::string& id : s.failed_ids()) ++hits[id];
  // each edge picked runs/4 times within 5 sigma
  for (const AssetEdge& e : net.edges()) {
    double expect = runs / 4.0;
    double sigma = std::sqrt(runs * 0.25 * 0.75);
    CHECK(std::abs(hits[e.id] - expect) < 5 * sigma);
  }
}

TEST_CASE("targeted removes the top traffic edges with id tie-break") {
  AssetNetwork net = net_from_csv(
      "id,lat,lon\nA,47,7\nB,47,8\nC,48,8\n",
      "id,u,v,length_km,daily_traffic\ne1,A,B,5,100\ne2,B,C,5,50\ne3,A,C,5,10\n");
  FailureScenario two = generate_targeted_scenario(net, 2.0);
  CHECK(two.failed_ids() == std::vector<std::string>{"e1", "e2"});
  CHECK(generate_targeted_scenario(net, 0.0).failed_count() == 0);

  AssetNetwork tied = net_from_csv(
      "id,lat,lon\nA,47,7\nB,47,8\nC,48,8\n",
      "id,u,v,length_km,daily_traffic\ne1,A,B,5,5\ne2,B,C,5,5\n");
  CHECK(generate_targeted_scenario(tied, 1.0).failed_ids() ==
        std::vector<std::string>{"e1"});
}

TEST_CASE("repeat_scenario replicates with distinct run indices") {
  AssetNetwork net = cycle4_net();
  ScenarioSet set = repeat_scenario(generate_targeted_scenario(net, 2.0), 4, "2031-07-15");
  REQUIRE(set.scenarios.size() == 4);
  for (int j = 0; j < 4; ++j) {
    CHECK(set.scenarios[j].run_index == j);
    CHECK(set.scenarios[j].failed_ids() == set.scenarios[0].failed_ids());
  }
}

TEST_CASE("scenario jsonl dump") {
  AssetNetwork net = cycle4_net();
  TempDir dir("jsonl");
  ScenarioSet set = repeat_scenario(generate_targeted_scenario(net, 1.0), 2);
  write_scenarios_jsonl(set, dir.path() / "s.jsonl");
  std::string text = read_file(dir.path() / "s.jsonl");
  CHECK(text ==
        "{\"run_index\":0,\"strategy\":\"targeted\",\"failed_edges\":[\"AB\"]}\n"
        "{\"run_index\":1,\"strategy\":\"targeted\",\"failed_edges\":[\"AB\"]}\n");
}

TEST_CASE("strategy names round trip") {
  CHECK(strategy_from_string("climate") == Strategy::Climate);
  CHECK(strategy_from_string("random") == Strategy::Random);
  CHECK(strategy_from_string("targeted") == Strategy::Targeted);
  CHECK(std::string(to_string(Strategy::Climate)) == "climate");
  CHECK(code_of([] { strategy_from_string("weird"); }) == ErrorCode::InvalidConfig);
}
