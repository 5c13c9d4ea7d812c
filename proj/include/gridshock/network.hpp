#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gridshock/csv.hpp"

namespace gridshock {

struct AssetNode {
  std::string id;
  double lat = 0;
  double lon = 0;
};

struct AssetEdge {
  std::string id;
  std::string u;
  std::string v;
  double length_km = 0;      // > 0
  double daily_traffic = 0;  // >= 0, trips per day under normal operation
  double spare_capacity_fraction = 0.5;

  // Extra trips per day the edge can absorb during rerouting.
  double spare_capacity() const { return spare_capacity_fraction * daily_traffic; }
};

// Undirected multigraph of physical assets. Nodes and edges are kept sorted
// by id; that order is the canonical order used everywhere randomness or
// serialization needs a stable iteration sequence.
class AssetNetwork {
 public:
  static AssetNetwork from_tables(const CsvTable& nodes, const CsvTable& edges,
                                  double spare_capacity_fraction);

  const std::vector<AssetNode>& nodes() const { return nodes_; }
  const std::vector<AssetEdge>& edges() const { return edges_; }

  bool has_node(const std::string& id) const;
  bool has_edge(const std::string& id) const;
  const AssetNode& node(const std::string& id) const;  // UnknownNode if absent
  const AssetEdge& edge(const std::string& id) const;  // UnknownEdge if absent

  // Edge ids incident to a node, sorted.
  const std::vector<std::string>& incident_edges(const std::string& node_id) const;
  std::size_t degree(const std::string& node_id) const { return incident_edges(node_id).size(); }

  // Unweighted midpoint of the edge's endpoints, (lat, lon).
  std::pair<double, double> edge_midpoint(const std::string& edge_id) const;

  // The fraction all edges were loaded with (uniform across the network).
  double spare_capacity_fraction() const { return spare_capacity_fraction_; }

 private:
  std::vector<AssetNode> nodes_;  // sorted by id
  std::vector<AssetEdge> edges_;  // sorted by id
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<std::vector<std::string>> adjacency_;  // by node position, sorted edge ids
  double spare_capacity_fraction_ = 0.5;

  friend class GraphIndex;
  int node_pos(const std::string& id) const;  // UnknownNode if absent
  int edge_pos(const std::string& id) const;  // UnknownEdge if absent
};

// One origin-destination relation of the flow layer. The id is
// "origin->destination", unique within a layer.
struct OdPair {
  std::string id;
  std::string origin;
  std::string destination;
  double demand = 0;  // trips per day
  std::vector<std::string> original_path;  // edge ids, a walk origin -> destination
  double original_length = 0;              // km, sum over original_path
};

class FlowLayer {
 public:
  static FlowLayer from_table(const CsvTable& od, const AssetNetwork& net);

  const std::vector<OdPair>& pairs() const { return pairs_; }
  const OdPair& pair(const std::string& id) const;
  bool has_pair(const std::string& id) const;
  int ordinal(const std::string& id) const;  // position within pairs()
  double total_daily_demand() const { return total_demand_; }

 private:
  std::vector<OdPair> pairs_;  // sorted by id
  std::unordered_map<std::string, int> index_;
  double total_demand_ = 0;
};

AssetNetwork load_asset_network(const std::filesystem::path& nodes_csv,
                                const std::filesystem::path& edges_csv,
                                double spare_capacity_fraction = 0.5);
FlowLayer load_flow_layer(const std::filesystem::path& od_csv, const AssetNetwork& net);

// Canonical byte-stable serialization: rows sorted by id, shortest round-trip
// numbers, '\n' line endings. load(serialize(x)) == x.
std::string serialize_nodes(const AssetNetwork& net);
std::string serialize_edges(const AssetNetwork& net);
std::string serialize_od(const FlowLayer& flow);
void save_asset_network(const AssetNetwork& net, const std::filesystem::path& nodes_csv,
                        const std::filesystem::path& edges_csv);
void save_flow_layer(const FlowLayer& flow, const std::filesystem::path& od_csv);

// Total length of a walk given as edge ids; empty walk has length 0.
double path_length(const std::vector<std::string>& path, const AssetNetwork& net);

// Union of edges touching any of the given nodes, sorted, deduplicated.
// This is how node outages translate into edge removals.
std::vector<std::string> edges_incident_to_nodes(const AssetNetwork& net,
                                                 const std::vector<std::string>& node_ids);

}  // namespace gridshock
