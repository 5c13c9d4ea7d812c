#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gridshock/hazard.hpp"
#include "gridshock/network.hpp"

namespace gridshock::testsupport {

AssetNetwork net_from_csv(const std::string& nodes_csv, const std::string& edges_csv,
                          double spare_fraction = 0.5);
FlowLayer flow_from_csv(const std::string& od_csv, const AssetNetwork& net);

// 4-node cycle A-B-C-D, unit spare fraction semantics as loaded; two ods.
AssetNetwork cycle4_net(double spare_fraction = 0.5);
FlowLayer cycle4_flow(const AssetNetwork& net);

// One od of demand 10 riding a single edge; the hand-traced fixture.
AssetNetwork single_edge_net(double spare_fraction = 0.5);
FlowLayer single_edge_flow(const AssetNetwork& net);

// Random connected graph with 2..8 nodes, integer lengths, one od whose
// original path is severed by removed. Deterministic in seed.
struct SmallCase {
  AssetNetwork net;
  FlowLayer flow;  // exactly one od
  std::string od_id;
  std::set<std::string> removed;
};
SmallCase make_small_case(std::uint64_t seed);

// 100 nodes, 150 edges, 500 ods with power-law demands routed over shortest
// paths; edge traffic is the od load plus a base. Built once per process.
struct Benchmark {
  AssetNetwork net;
  FlowLayer flow;
};
const Benchmark& benchmark_network();

// Failure probabilities from a Gaussian blob over the busiest edge, scaled
// so the expected failed count equals target_psi exactly.
FailureProbabilities scaled_blob_probabilities(const AssetNetwork& net, double target_psi);

// Constant-valued wind grid with cell centers at lat0 + r*d, lon0 + c*d.
WeatherGrid uniform_grid(double value, int nrows = 4, int ncols = 4, double lat0 = 47.0,
                         double lon0 = 7.0, double d = 0.5);

}  // namespace gridshock::testsupport
