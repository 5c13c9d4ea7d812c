#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "gridshock/error.hpp"
#include "gridshock/rng.hpp"
#include "gridshock/simulate.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

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

FailureScenario make_scenario(const AssetNetwork& net, const std::set<std::string>& failed) {
  auto ids = std::make_shared<std::vector<std::string>>();
  for (const AssetEdge& e : net.edges()) ids->push_back(e.id);
  FailureScenario s;
  s.asset_ids = ids;
  s.states.assign(ids->size(), 1);
  for (std::size_t i = 0; i < ids->size(); ++i)
    if (failed.count((*ids)[i])) s.states[i] = 0;
  return s;
}

const ReroutePolicy kOpenPolicy{5, 2.0, 0.0, 0.0};

}  // namespace

TEST_CASE("quality of service is the satisfied share") {
  CHECK(quality_of_service(100, 100) == 1.0);
  CHECK(quality_of_service(0, 100) == 0.0);
  CHECK(quality_of_service(70, 100) == 0.7);
  CHECK(code_of([] { quality_of_service(0, 0); }) == ErrorCode::DegenerateDemand);
}

TEST_CASE("recovery sweep basics") {
  RecoveryModel certain{1.0};
  SplitMix64 rng(1);
  CHECK(step_recovery({"a", "b", "c"}, certain, rng).empty());

  RecoveryModel never{1e-12};
  std::set<std::string> failed{"a", "b", "c", "d"};
  CHECK(step_recovery(failed, never, rng) == failed);

  RecoveryModel half{0.5};
  SplitMix64 r1(7), r2(7);
  auto a = step_recovery(failed, half, r1);
  auto b = step_recovery(failed, half, r2);
  CHECK(a == b);
  for (const std::string& id : a) CHECK(failed.count(id) == 1);

  SplitMix64 r3(7);
  CHECK(code_of([&] { step_recovery(failed, RecoveryModel{0.0}, r3); }) ==
        ErrorCode::InvalidConfig);
  CHECK(code_of([&] { step_recovery(failed, RecoveryModel{1.5}, r3); }) ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("half probability repairs in two days on average") {
  std::set<std::string> failed;
  for (int i = 0; i < 10000; ++i) failed.insert("E" + std::to_string(i));
  RecoveryModel half{0.5};
  SplitMix64 rng(substream(99, 3, 0).next());
  long long total_days = 0;
  int day = 0;
  std::size_t remaining = failed.size();
  while (!failed.empty()) {
    ++day;
    failed = step_recovery(failed, half, rng);
    total_days += static_cast<long long>(remaining - failed.size()) * day;
    remaining = failed.size();
    REQUIRE(day < 100);
  }
  double mean = double(total_days) / 10000.0;
  CHECK(mean > 1.95);
  CHECK(mean < 2.05);
}

TEST_CASE("no failures means one perfect day") {
  AssetNetwork net = cycle4_net();
  FlowLayer flow = cycle4_flow(net);
  ScenarioOutcome out =
      run_scenario(net, flow, make_scenario(net, {}), kOpenPolicy, RecoveryModel{0.5}, 1);
  CHECK(out.q_series == std::vector<double>{1.0});
  CHECK(out.los == 0.0);
  CHECK(out.recovery_day == 0);
}

TEST_CASE("hand-traced single-edge outage") {
  AssetNetwork net = single_edge_net(0.5);
  FlowLayer flow = single_edge_flow(net);
  ScenarioOutcome out = run_scenario(net, flow, make_scenario(net, {"AB"}), kOpenPolicy,
                                     RecoveryModel{1.0}, 123);
  CHECK(out.q_series == std::vector<double>{0.0, 0.75, 1.0});
  CHECK(out.los == 1.25);
  CHECK(out.recovery_day == 2);
}

TEST_CASE("hand-traced reroute day with audit log") {
  AssetNetwork net = net_from_csv("id,lat,lon\nA,47,7\nB,47,8\n",
                                  "id,u,v,length_km,daily_traffic\n"
                                  "e1,A,B,10,20\ne2,A,B,15,10\n");
  FlowLayer flow = flow_from_csv("origin,destination,demand,path\nA,B,10,e1\n", net);
  std::vector<RerouteLogEntry> log;
  FailureScenario sc = make_scenario(net, {"e1"});
  sc.run_index = 3;
  ScenarioOutcome out =
      run_scenario(net, flow, sc, kOpenPolicy, RecoveryModel{1.0}, 5, {}, &log);
  CHECK(out.q_series == std::vector<double>{0.5, 1.0});
  CHECK(out.los == 0.5);
  CHECK(out.recovery_day == 1);
  REQUIRE(log.size() == 1);
  CHECK(log[0].run_index == 3);
  CHECK(log[0].day == 0);
  CHECK(log[0].od == "A->B");
  CHECK(log[0].path == std::vector<std::string>{"e2"});
  CHECK(log[0].flow == 5.0);
}

TEST_CASE("total outage follows the closed-form drain") {
  for (double s : {0.5, 0.25}) {
    AssetNetwork net = cycle4_net(s);
    FlowLayer flow = cycle4_flow(net);
    ScenarioOutcome out = run_scenario(net, flow, make_scenario(net, {"AB", "BC", "CD", "DA"}),
                                       kOpenPolicy, RecoveryModel{1.0}, 9);
    auto [expect_q, expect_los] = oracle_full_outage({20.0, 8.0}, s);
    REQUIRE(out.q_series.size() == expect_q.size());
    for (std::size_t t = 0; t < expect_q.size(); ++t)
      CHECK(out.q_series[t] == doctest::Approx(expect_q[t]).epsilon(1e-12));
    CHECK(out.los == doctest::Approx(expect_los).epsilon(1e-12));
  }
}

TEST_CASE("zero spare capacity never drains the backlog") {
  AssetNetwork net = cycle4_net(0.0);
  FlowLayer flow = cycle4_flow(net);
  CHECK(code_of([&] {
          run_scenario(net, flow, make_scenario(net, {"AB", "BC", "CD", "DA"}), kOpenPolicy,
                       RecoveryModel{1.0}, 9, SimulationLimits{50});
        }) == ErrorCode::HorizonExceeded);
}

TEST_CASE("vanishing repair probability hits the horizon guard") {
  AssetNetwork net = single_edge_net();
  FlowLayer flow = single_edge_flow(net);
  CHECK(code_of([&] {
          run_scenario(net, flow, make_scenario(net, {"AB"}), kOpenPolicy,
                       RecoveryModel{1e-9}, 11, SimulationLimits{20});
        }) == ErrorCode::HorizonExceeded);
}

TEST_CASE("scenario must reference network edges") {
  AssetNetwork big = cycle4_net();
  AssetNetwork small = single_edge_net();
  FlowLayer flow = single_edge_flow(small);
  CHECK(code_of([&] {
          run_scenario(small, flow, make_scenario(big, {"BC"}), kOpenPolicy,
                       RecoveryModel{0.5}, 1);
        }) == ErrorCode::UnknownEdge);
}

TEST_CASE("demand is conserved over the whole run") {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    SmallCase c = make_small_case(seed);
    double daily = c.flow.total_daily_demand();
    ScenarioOutcome out = run_scenario(c.net, c.flow, make_scenario(c.net, c.removed),
                                       kOpenPolicy, RecoveryModel{0.5}, seed);

    double shortfall_sum = 0.0;
    for (double q : out.q_series) {
      CHECK(q >= 0.0);
      CHECK(q <= 1.0);
      shortfall_sum += 1.0 - q;
    }
    CHECK(out.q_series.back() == 1.0);
    CHECK(out.los == doctest::Approx(shortfall_sum).epsilon(1e-12));
    CHECK(out.recovery_day == int(out.q_series.size()) - 1);

    // reconstruct the demand ledger: next day's demand is the daily demand
    // plus whatever was left short today
    double demanded = daily;
    double delivered_total = 0.0;
    double shortfall = 0.0;
    for (double q : out.q_series) {
      demanded = daily + shortfall;
      delivered_total += demanded * q;
      shortfall = demanded * (1.0 - q);
    }
    CHECK(shortfall == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(delivered_total ==
          doctest::Approx(daily * double(out.q_series.size())).epsilon(1e-9));
  }
}

TEST_CASE("event assessment degenerate cases") {
  AssetNetwork net = cycle4_net();
  FlowLayer flow = cycle4_flow(net);
  FailureProbabilities zero;
  for (const AssetEdge& e : net.edges()) zero.p[e.id] = 0.0;

  LosDistribution d = assess_event(net, flow, zero, 5, kOpenPolicy, RecoveryModel{0.5}, 3);
  REQUIRE(d.samples.size() == 5);
  for (double v : d.samples) CHECK(v == 0.0);
  CHECK(d.mean() == 0.0);

  LosDistribution one = assess_event(net, flow, zero, 1, kOpenPolicy, RecoveryModel{0.5}, 3);
  CHECK(one.samples.size() == 1);
}

TEST_CASE("fixed seeds reproduce bit-identical samples") {
  AssetNetwork net = cycle4_net();
  FlowLayer flow = cycle4_flow(net);
  FailureProbabilities p;
  for (const AssetEdge& e : net.edges()) p.p[e.id] = 0.4;

  LosDistribution a = assess_event(net, flow, p, 40, kOpenPolicy, RecoveryModel{0.5}, 77);
  LosDistribution b = assess_event(net, flow, p, 40, kOpenPolicy, RecoveryModel{0.5}, 77);
  CHECK(a.samples == b.samples);
  CHECK(a.recovery_days == b.recovery_days);
  LosDistribution c = assess_event(net, flow, p, 40, kOpenPolicy, RecoveryModel{0.5}, 78);
  CHECK(a.samples != c.samples);
}

TEST_CASE("results do not depend on the worker count") {
  AssetNetwork net = cycle4_net();
  FlowLayer flow = cycle4_flow(net);
  FailureProbabilities p;
  for (const AssetEdge& e : net.edges()) p.p[e.id] = 0.5;

  setenv("GRIDSHOCK_THREADS", "1", 1);
  LosDistribution serial = assess_event(net, flow, p, 30, kOpenPolicy, RecoveryModel{0.5}, 5);
  setenv("GRIDSHOCK_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  LosDistribution parallel =
      assess_event(net, flow, p, 30, kOpenPolicy, RecoveryModel{0.5}, 5);
  unsetenv("GRIDSHOCK_THREADS");
  CHECK(serial.samples == parallel.samples);
  CHECK(serial.recovery_days == parallel.recovery_days);
}

TEST_CASE("worker count env validation") {
  setenv("GRIDSHOCK_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("GRIDSHOCK_THREADS", "0", 1);
  CHECK(code_of([] { worker_count(); }) == ErrorCode::InvalidConfig);
  setenv("GRIDSHOCK_THREADS", "abc", 1);
  CHECK(code_of([] { worker_count(); }) == ErrorCode::InvalidConfig);
  unsetenv("GRIDSHOCK_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("distribution summaries") {
  LosDistribution d;
  d.samples = {3.0, 1.0, 4.0, 2.0};
  d.recovery_days = {2, 4};
  CHECK(d.mean() == 2.5);
  CHECK(d.quantile(0.0) == 1.0);
  CHECK(d.quantile(0.025) == 1.0);
  CHECK(d.quantile(0.5) == 2.0);
  CHECK(d.quantile(0.51) == 3.0);
  CHECK(d.quantile(0.975) == 4.0);
  CHECK(d.quantile(1.0) == 4.0);
  CHECK(d.mean_recovery_days() == 3.0);
  CHECK(code_of([&] { d.quantile(1.5); }) == ErrorCode::InvalidConfig);

  LosDistribution empty;
  CHECK(code_of([&] { empty.mean(); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { empty.quantile(0.5); }) == ErrorCode::EmptySample);
  CHECK(code_of([&] { empty.mean_recovery_days(); }) == ErrorCode::EmptySample);
}

TEST_CASE("an empty scenario set is rejected") {
  AssetNetwork net = cycle4_net();
  FlowLayer flow = cycle4_flow(net);
  ScenarioSet empty;
  CHECK(code_of([&] {
          assess_scenario_set(net, flow, empty, kOpenPolicy, RecoveryModel{0.5}, 1);
        }) == ErrorCode::InvalidConfig);
}
