#include "gridshock/network.hpp"

#include <algorithm>
#include <set>

#include "gridshock/error.hpp"

namespace gridshock {

namespace {

const std::vector<std::string> kNodeHeader = {"id", "lat", "lon"};
const std::vector<std::string> kEdgeHeader = {"id", "u", "v", "length_km", "daily_traffic"};
const std::vector<std::string> kOdHeader = {"origin", "destination", "demand", "path"};

std::vector<std::string> split_path(const std::string& cell) {
  std::vector<std::string> ids;
  if (cell.empty()) return ids;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = cell.find('|', start);
    if (bar == std::string::npos) {
      ids.push_back(cell.substr(start));
      return ids;
    }
    ids.push_back(cell.substr(start, bar - start));
    start = bar + 1;
  }
}

std::string join_path(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += '|';
    out += ids[i];
  }
  return out;
}

}  // namespace

AssetNetwork AssetNetwork::from_tables(const CsvTable& nodes, const CsvTable& edges,
                                       double spare_capacity_fraction) {
  if (!(spare_capacity_fraction >= 0.0 && spare_capacity_fraction <= 1.0))
    fail(ErrorCode::InvalidConfig, "spare_capacity_fraction must be in [0,1], got " +
                                       fmt_double(spare_capacity_fraction));
  AssetNetwork net;
  net.spare_capacity_fraction_ = spare_capacity_fraction;

  for (const auto& row : nodes.rows) {
    AssetNode n;
    n.id = row[0];
    if (n.id.empty()) fail(ErrorCode::ParseError, nodes.source + ": empty node id");
    n.lat = to_double(row[1], nodes.source + ": node '" + n.id + "' lat");
    n.lon = to_double(row[2], nodes.source + ": node '" + n.id + "' lon");
    if (n.lat < -90.0 || n.lat > 90.0 || n.lon < -180.0 || n.lon > 180.0)
      fail(ErrorCode::InvalidGeometry, "node '" + n.id + "' has coordinates outside WGS84 range");
    net.nodes_.push_back(std::move(n));
  }
  std::sort(net.nodes_.begin(), net.nodes_.end(),
            [](const AssetNode& a, const AssetNode& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
    if (i && net.nodes_[i].id == net.nodes_[i - 1].id)
      fail(ErrorCode::DuplicateId, "node id '" + net.nodes_[i].id + "' appears more than once");
    net.node_index_[net.nodes_[i].id] = static_cast<int>(i);
  }
  net.adjacency_.resize(net.nodes_.size());

  for (const auto& row : edges.rows) {
    AssetEdge e;
    e.id = row[0];
    if (e.id.empty()) fail(ErrorCode::ParseError, edges.source + ": empty edge id");
    e.u = row[1];
    e.v = row[2];
    if (!net.node_index_.count(e.u))
      fail(ErrorCode::UnknownNode, "edge '" + e.id + "' references unknown node '" + e.u + "'");
    if (!net.node_index_.count(e.v))
      fail(ErrorCode::UnknownNode, "edge '" + e.id + "' references unknown node '" + e.v + "'");
    if (e.u == e.v)
      fail(ErrorCode::InvalidGeometry, "edge '" + e.id + "' is a self-loop on '" + e.u + "'");
    e.length_km = to_double(row[3], edges.source + ": edge '" + e.id + "' length_km");
    if (!(e.length_km > 0.0))
      fail(ErrorCode::InvalidGeometry, "edge '" + e.id + "' has non-positive length");
    e.daily_traffic = to_double(row[4], edges.source + ": edge '" + e.id + "' daily_traffic");
    if (e.daily_traffic < 0.0)
      fail(ErrorCode::InvalidGeometry, "edge '" + e.id + "' has negative daily_traffic");
    e.spare_capacity_fraction = spare_capacity_fraction;
    net.edges_.push_back(std::move(e));
  }
  std::sort(net.edges_.begin(), net.edges_.end(),
            [](const AssetEdge& a, const AssetEdge& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < net.edges_.size(); ++i) {
    const AssetEdge& e = net.edges_[i];
    if (i && e.id == net.edges_[i - 1].id)
      fail(ErrorCode::DuplicateId, "edge id '" + e.id + "' appears more than once");
    net.edge_index_[e.id] = static_cast<int>(i);
    net.adjacency_[net.node_index_[e.u]].push_back(e.id);
    net.adjacency_[net.node_index_[e.v]].push_back(e.id);
  }
  // incident lists come out sorted because edges_ was iterated in id order
  return net;
}

int AssetNetwork::node_pos(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) fail(ErrorCode::UnknownNode, "unknown node '" + id + "'");
  return it->second;
}

int AssetNetwork::edge_pos(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) fail(ErrorCode::UnknownEdge, "unknown edge '" + id + "'");
  return it->second;
}

bool AssetNetwork::has_node(const std::string& id) const { return node_index_.count(id) > 0; }
bool AssetNetwork::has_edge(const std::string& id) const { return edge_index_.count(id) > 0; }

const AssetNode& AssetNetwork::node(const std::string& id) const { return nodes_[node_pos(id)]; }
const AssetEdge& AssetNetwork::edge(const std::string& id) const { return edges_[edge_pos(id)]; }

const std::vector<std::string>& AssetNetwork::incident_edges(const std::string& node_id) const {
  return adjacency_[node_pos(node_id)];
}

std::pair<double, double> AssetNetwork::edge_midpoint(const std::string& edge_id) const {
  const AssetEdge& e = edge(edge_id);
  const AssetNode& a = node(e.u);
  const AssetNode& b = node(e.v);
  return {0.5 * (a.lat + b.lat), 0.5 * (a.lon + b.lon)};
}

FlowLayer FlowLayer::from_table(const CsvTable& od, const AssetNetwork& net) {
  FlowLayer flow;
  for (const auto& row : od.rows) {
    OdPair p;
    p.origin = row[0];
    p.destination = row[1];
    if (!net.has_node(p.origin))
      fail(ErrorCode::UnknownNode, od.source + ": unknown origin '" + p.origin + "'");
    if (!net.has_node(p.destination))
      fail(ErrorCode::UnknownNode, od.source + ": unknown destination '" + p.destination + "'");
    p.id = p.origin + "->" + p.destination;
    if (p.origin == p.destination)
      fail(ErrorCode::BrokenPath, od.source + ": degenerate relation '" + p.id +
                                      "' (origin equals destination)");
    p.demand = to_double(row[2], od.source + ": relation '" + p.id + "' demand");
    if (p.demand < 0.0)
      fail(ErrorCode::ParseError, od.source + ": relation '" + p.id + "' has negative demand");
    p.original_path = split_path(row[3]);
    if (p.original_path.empty())
      fail(ErrorCode::BrokenPath, od.source + ": relation '" + p.id + "' has an empty path");

    // walk check: consecutive edges must chain from origin to destination
    std::set<std::string> seen;
    std::string at = p.origin;
    for (const std::string& eid : p.original_path) {
      if (!net.has_edge(eid))
        fail(ErrorCode::UnknownEdge, od.source + ": relation '" + p.id + "' uses unknown edge '" +
                                         eid + "'");
      if (!seen.insert(eid).second)
        fail(ErrorCode::BrokenPath, od.source + ": relation '" + p.id + "' repeats edge '" + eid +
                                        "'");
      const AssetEdge& e = net.edge(eid);
      if (e.u == at)
        at = e.v;
      else if (e.v == at)
        at = e.u;
      else
        fail(ErrorCode::BrokenPath, od.source + ": relation '" + p.id + "' breaks at edge '" +
                                        eid + "' (not incident to '" + at + "')");
      p.original_length += e.length_km;
    }
    if (at != p.destination)
      fail(ErrorCode::BrokenPath, od.source + ": relation '" + p.id + "' path ends at '" + at +
                                      "', not at its destination");
    flow.pairs_.push_back(std::move(p));
  }
  std::sort(flow.pairs_.begin(), flow.pairs_.end(),
            [](const OdPair& a, const OdPair& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < flow.pairs_.size(); ++i) {
    if (i && flow.pairs_[i].id == flow.pairs_[i - 1].id)
      fail(ErrorCode::DuplicateId, "relation '" + flow.pairs_[i].id + "' appears more than once");
    flow.index_[flow.pairs_[i].id] = static_cast<int>(i);
    flow.total_demand_ += flow.pairs_[i].demand;
  }
  return flow;
}

const OdPair& FlowLayer::pair(const std::string& id) const { return pairs_[ordinal(id)]; }

int FlowLayer::ordinal(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) fail(ErrorCode::InvalidConfig, "unknown od relation '" + id + "'");
  return it->second;
}

bool FlowLayer::has_pair(const std::string& id) const { return index_.count(id) > 0; }

AssetNetwork load_asset_network(const std::filesystem::path& nodes_csv,
                                const std::filesystem::path& edges_csv,
                                double spare_capacity_fraction) {
  return AssetNetwork::from_tables(read_csv(nodes_csv, kNodeHeader),
                                   read_csv(edges_csv, kEdgeHeader), spare_capacity_fraction);
}

FlowLayer load_flow_layer(const std::filesystem::path& od_csv, const AssetNetwork& net) {
  return FlowLayer::from_table(read_csv(od_csv, kOdHeader), net);
}

std::string serialize_nodes(const AssetNetwork& net) {
  std::string out = "id,lat,lon\n";
  for (const AssetNode& n : net.nodes())
    out += n.id + "," + fmt_double(n.lat) + "," + fmt_double(n.lon) + "\n";
  return out;
}

std::string serialize_edges(const AssetNetwork& net) {
  std::string out = "id,u,v,length_km,daily_traffic\n";
  for (const AssetEdge& e : net.edges())
    out += e.id + "," + e.u + "," + e.v + "," + fmt_double(e.length_km) + "," +
           fmt_double(e.daily_traffic) + "\n";
  return out;
}

std::string serialize_od(const FlowLayer& flow) {
  std::string out = "origin,destination,demand,path\n";
  for (const OdPair& p : flow.pairs())
    out += p.origin + "," + p.destination + "," + fmt_double(p.demand) + "," +
           join_path(p.original_path) + "\n";
  return out;
}

void save_asset_network(const AssetNetwork& net, const std::filesystem::path& nodes_csv,
                        const std::filesystem::path& edges_csv) {
  write_file(nodes_csv, serialize_nodes(net));
  write_file(edges_csv, serialize_edges(net));
}

void save_flow_layer(const FlowLayer& flow, const std::filesystem::path& od_csv) {
  write_file(od_csv, serialize_od(flow));
}

double path_length(const std::vector<std::string>& path, const AssetNetwork& net) {
  double total = 0;
  for (const std::string& eid : path) total += net.edge(eid).length_km;
  return total;
}

std::vector<std::string> edges_incident_to_nodes(const AssetNetwork& net,
                                                 const std::vector<std::string>& node_ids) {
  std::set<std::string> out;
  for (const std::string& nid : node_ids) {
    const auto& inc = net.incident_edges(nid);
    out.insert(inc.begin(), inc.end());
  }
  return {out.begin(), out.end()};
}

}  // namespace gridshock
