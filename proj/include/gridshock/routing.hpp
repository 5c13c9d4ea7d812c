#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridshock/network.hpp"

namespace gridshock {

// Integer-indexed view of an AssetNetwork for repeated shortest-path work.
// Positions follow the network's id-sorted order, so index comparisons agree
// with lexicographic id comparisons.
class GraphIndex {
 public:
  explicit GraphIndex(const AssetNetwork& net);

  int num_nodes() const { return static_cast<int>(node_ids_.size()); }
  int num_edges() const { return static_cast<int>(edge_ids_.size()); }

  int node_index(const std::string& id) const;  // UnknownNode if absent
  int edge_index(const std::string& id) const;  // UnknownEdge if absent
  const std::string& node_id(int i) const { return node_ids_[i]; }
  const std::string& edge_id(int i) const { return edge_ids_[i]; }

  double edge_length(int e) const { return length_[e]; }
  double edge_traffic(int e) const { return traffic_[e]; }
  double edge_spare(int e) const { return spare_[e]; }
  int edge_u(int e) const { return eu_[e]; }
  int edge_v(int e) const { return ev_[e]; }
  int edge_other(int e, int from) const { return eu_[e] == from ? ev_[e] : eu_[e]; }

  struct Arc {
    int edge;
    int to;
  };
  // Arcs leaving a node, sorted by edge index.
  const std::vector<Arc>& arcs(int node) const { return arcs_[node]; }

 private:
  std::vector<std::string> node_ids_;
  std::vector<std::string> edge_ids_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<double> length_, traffic_, spare_;
  std::vector<int> eu_, ev_;
  std::vector<std::vector<Arc>> arcs_;
};

// Lazy k-shortest loopless path enumeration (Yen). Successive next() calls
// yield paths in (length, lexicographic edge sequence) order; with positive
// edge lengths and the lexicographic tie rule the order is a total order, so
// enumeration is deterministic.
class KspEnumerator {
 public:
  // removed_mask: 1 blocks the edge; must outlive the enumerator.
  KspEnumerator(const GraphIndex& g, const std::vector<std::uint8_t>& removed_mask, int origin,
                int destination);
  ~KspEnumerator();
  KspEnumerator(const KspEnumerator&) = delete;
  KspEnumerator& operator=(const KspEnumerator&) = delete;

  // false once the path space is exhausted.
  bool next(std::vector<int>& out_edges, double& out_length);

 private:
  struct Impl;
  Impl* impl_;
};

struct ReroutePolicy {
  int max_paths = 5;          // candidate paths per relation
  double detour_factor = 2;   // admissible length <= factor * original length
  double min_trips = 15;      // relations below either floor are skipped
  double min_length_km = 30;
};

// Reusable rerouting engine for one (network, flow layer) pair. All methods
// are const and touch only locals, so one engine may serve many threads.
class RerouteEngine {
 public:
  RerouteEngine(const AssetNetwork& net, const FlowLayer& flow, const ReroutePolicy& policy);

  const GraphIndex& graph() const { return graph_; }

  struct Query {
    int od = 0;  // ordinal into flow.pairs()
    double demand = 0;
  };
  struct Assignment {
    int od = 0;
    std::vector<int> path;  // edge indices
    double flow = 0;
  };
  struct Outcome {
    std::vector<Query> order;           // queries in processing order
    std::vector<double> delivered;      // aligned with order
    std::vector<std::uint8_t> skipped;  // aligned with order
    std::vector<Assignment> assignments;
  };

  // Greedy shortest-first assignment against the residual spare capacities.
  // Queries are processed by descending demand, ties by od id; residual is
  // consumed in place. Set want_assignments when the per-path split matters.
  Outcome reroute(const std::vector<std::uint8_t>& removed_mask, std::vector<double>& residual,
                  std::vector<Query> queries, bool want_assignments = false) const;

  double od_original_length(int od) const { return od_length_[od]; }
  const std::vector<int>& od_path(int od) const { return od_path_[od]; }
  int od_origin(int od) const { return od_origin_[od]; }
  int od_destination(int od) const { return od_destination_[od]; }

 private:
  GraphIndex graph_;
  ReroutePolicy policy_;
  std::vector<int> od_origin_, od_destination_;
  std::vector<double> od_length_;
  std::vector<std::vector<int>> od_path_;  // edge indices
};

// Relations whose original path crosses a removed edge.
std::set<std::string> find_interrupted(const FlowLayer& flow,
                                       const std::set<std::string>& removed);

// Up to k shortest loopless paths in the surviving graph, as edge-id
// sequences. pre: origin != destination, k >= 1.
std::vector<std::vector<std::string>> k_shortest_paths(const AssetNetwork& net,
                                                       const std::set<std::string>& removed,
                                                       const std::string& origin,
                                                       const std::string& destination, int k);

struct RerouteResult {
  std::map<std::string, double> delivered;  // od id -> trips placed
  std::map<std::string, std::vector<std::pair<std::vector<std::string>, double>>> paths;
  std::set<std::string> skipped;  // filtered by the policy floors
};

// One-shot wrapper around RerouteEngine for explicit demand maps.
RerouteResult reroute_interrupted(const AssetNetwork& net, const std::set<std::string>& removed,
                                  const FlowLayer& flow,
                                  const std::map<std::string, double>& demands,
                                  const ReroutePolicy& policy);

// Fraction of daily demand whose original path is severed, before rerouting.
double immediate_disruption(const FlowLayer& flow, const std::set<std::string>& removed);

}  // namespace gridshock
