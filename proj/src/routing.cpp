#include "gridshock/routing.hpp"

#include <algorithm>
#include <queue>

#include "gridshock/error.hpp"

namespace gridshock {

GraphIndex::GraphIndex(const AssetNetwork& net) {
  const auto& nodes = net.nodes();
  const auto& edges = net.edges();
  node_ids_.reserve(nodes.size());
  for (const AssetNode& n : nodes) {
    node_index_[n.id] = static_cast<int>(node_ids_.size());
    node_ids_.push_back(n.id);
  }
  edge_ids_.reserve(edges.size());
  length_.reserve(edges.size());
  traffic_.reserve(edges.size());
  spare_.reserve(edges.size());
  eu_.reserve(edges.size());
  ev_.reserve(edges.size());
  arcs_.resize(nodes.size());
  for (const AssetEdge& e : edges) {
    int idx = static_cast<int>(edge_ids_.size());
    edge_index_[e.id] = idx;
    edge_ids_.push_back(e.id);
    length_.push_back(e.length_km);
    traffic_.push_back(e.daily_traffic);
    spare_.push_back(e.spare_capacity());
    int u = node_index_.at(e.u);
    int v = node_index_.at(e.v);
    eu_.push_back(u);
    ev_.push_back(v);
    arcs_[u].push_back({idx, v});  // edges arrive in id order, lists stay sorted
    arcs_[v].push_back({idx, u});
  }
}

int GraphIndex::node_index(const std::string& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) fail(ErrorCode::UnknownNode, "unknown node '" + id + "'");
  return it->second;
}

int GraphIndex::edge_index(const std::string& id) const {
  auto it = edge_index_.find(id);
  if (it == edge_index_.end()) fail(ErrorCode::UnknownEdge, "unknown edge '" + id + "'");
  return it->second;
}

namespace {

// Dijkstra with a deterministic tie rule: among equal-length paths the
// lexicographically smallest edge-index sequence wins. With strictly positive
// lengths an equal-length relaxation can only come from an already finalised
// node, so comparing full reconstructed sequences at tie time is sound.
struct DijkstraBuffers {
  std::vector<double> dist;
  std::vector<int> prev_edge, prev_node;
  std::vector<std::uint8_t> done;
  std::vector<int> seq_a, seq_b;

  void resize(int n) {
    dist.resize(n);
    prev_edge.resize(n);
    prev_node.resize(n);
    done.resize(n);
  }
};

void reconstruct(const DijkstraBuffers& buf, int node, std::vector<int>& out) {
  out.clear();
  for (int at = node; buf.prev_edge[at] >= 0; at = buf.prev_node[at])
    out.push_back(buf.prev_edge[at]);
  std::reverse(out.begin(), out.end());
}

bool dijkstra(const GraphIndex& g, int s, int t, const std::vector<std::uint8_t>& edge_block,
              const std::vector<std::uint8_t>& node_block, DijkstraBuffers& buf,
              std::vector<int>& out_edges, double& out_length) {
  const double inf = std::numeric_limits<double>::infinity();
  int n = g.num_nodes();
  buf.resize(n);
  std::fill(buf.dist.begin(), buf.dist.end(), inf);
  std::fill(buf.prev_edge.begin(), buf.prev_edge.end(), -1);
  std::fill(buf.prev_node.begin(), buf.prev_node.end(), -1);
  std::fill(buf.done.begin(), buf.done.end(), 0);
  if (node_block[s] || node_block[t]) return false;

  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  buf.dist[s] = 0;
  heap.push({0.0, s});
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (buf.done[u]) continue;
    buf.done[u] = 1;
    if (u == t) break;
    for (const GraphIndex::Arc& arc : g.arcs(u)) {
      if (edge_block[arc.edge] || node_block[arc.to] || buf.done[arc.to]) continue;
      double nd = d + g.edge_length(arc.edge);
      if (nd < buf.dist[arc.to]) {
        buf.dist[arc.to] = nd;
        buf.prev_edge[arc.to] = arc.edge;
        buf.prev_node[arc.to] = u;
        heap.push({nd, arc.to});
      } else if (nd == buf.dist[arc.to]) {
        // tie: keep the lexicographically smaller edge sequence
        reconstruct(buf, u, buf.seq_a);
        buf.seq_a.push_back(arc.edge);
        reconstruct(buf, arc.to, buf.seq_b);
        if (buf.seq_a < buf.seq_b) {
          buf.prev_edge[arc.to] = arc.edge;
          buf.prev_node[arc.to] = u;
        }
      }
    }
  }
  if (!buf.done[t]) return false;
  out_length = buf.dist[t];
  reconstruct(buf, t, out_edges);
  return true;
}

}  // namespace

struct KspEnumerator::Impl {
  const GraphIndex& g;
  int s, t;
  bool exhausted = false;

  std::vector<std::vector<int>> accepted;
  std::vector<double> accepted_len;

  struct Cand {
    double len;
    std::vector<int> edges;
    bool operator<(const Cand& o) const {
      if (len != o.len) return len < o.len;
      return edges < o.edges;
    }
  };
  std::set<Cand> pool;

  std::vector<std::uint8_t> edge_block;  // removed edges plus spur overlays
  std::vector<std::uint8_t> node_block;
  DijkstraBuffers buf;

  Impl(const GraphIndex& graph, const std::vector<std::uint8_t>& removed, int origin,
       int destination)
      : g(graph), s(origin), t(destination), edge_block(removed) {
    edge_block.resize(g.num_edges(), 0);
    node_block.assign(g.num_nodes(), 0);
  }

  // Generates the spur candidates of the most recently accepted path.
  void spawn_candidates() {
    const std::vector<int>& path = accepted.back();
    std::vector<int> node_seq(path.size() + 1);
    std::vector<double> prefix_len(path.size() + 1, 0.0);
    node_seq[0] = s;
    for (std::size_t i = 0; i < path.size(); ++i) {
      node_seq[i + 1] = g.edge_other(path[i], node_seq[i]);
      prefix_len[i + 1] = prefix_len[i] + g.edge_length(path[i]);
    }

    std::vector<int> overlay;
    std::vector<int> spur_path;
    double spur_len = 0;
    for (std::size_t j = 0; j < path.size(); ++j) {
      // block the next edge of every accepted path sharing this root
      overlay.clear();
      for (const std::vector<int>& a : accepted) {
        if (a.size() <= j) continue;
        if (!std::equal(path.begin(), path.begin() + j, a.begin())) continue;
        if (!edge_block[a[j]]) {
          edge_block[a[j]] = 1;
          overlay.push_back(a[j]);
        }
      }
      if (dijkstra(g, node_seq[j], t, edge_block, node_block, buf, spur_path, spur_len)) {
        Cand cand;
        cand.len = prefix_len[j] + spur_len;
        cand.edges.assign(path.begin(), path.begin() + j);
        cand.edges.insert(cand.edges.end(), spur_path.begin(), spur_path.end());
        pool.insert(std::move(cand));
      }
      for (int e : overlay) edge_block[e] = 0;
      node_block[node_seq[j]] = 1;  // root grows by one node for the next spur
    }
    for (std::size_t j = 0; j < path.size(); ++j) node_block[node_seq[j]] = 0;
  }

  bool next(std::vector<int>& out_edges, double& out_length) {
    if (exhausted) return false;
    if (accepted.empty()) {
      std::vector<int> path;
      double len = 0;
      if (!dijkstra(g, s, t, edge_block, node_block, buf, path, len)) {
        exhausted = true;
        return false;
      }
      accepted.push_back(std::move(path));
      accepted_len.push_back(len);
    } else {
      spawn_candidates();
      if (pool.empty()) {
        exhausted = true;
        return false;
      }
      auto head = pool.extract(pool.begin());
      accepted.push_back(std::move(head.value().edges));
      accepted_len.push_back(head.value().len);
    }
    out_edges = accepted.back();
    out_length = accepted_len.back();
    return true;
  }
};

KspEnumerator::KspEnumerator(const GraphIndex& g, const std::vector<std::uint8_t>& removed_mask,
                             int origin, int destination)
    : impl_(new Impl(g, removed_mask, origin, destination)) {}

KspEnumerator::~KspEnumerator() { delete impl_; }

bool KspEnumerator::next(std::vector<int>& out_edges, double& out_length) {
  return impl_->next(out_edges, out_length);
}

namespace {

void validate_policy(const ReroutePolicy& policy) {
  if (policy.max_paths < 1) fail(ErrorCode::InvalidConfig, "max_paths must be >= 1");
  if (!(policy.detour_factor >= 1.0))
    fail(ErrorCode::InvalidConfig, "detour_factor must be >= 1");
  if (policy.min_trips < 0 || policy.min_length_km < 0)
    fail(ErrorCode::InvalidConfig, "policy floors must be non-negative");
}

}  // namespace

RerouteEngine::RerouteEngine(const AssetNetwork& net, const FlowLayer& flow,
                             const ReroutePolicy& policy)
    : graph_(net), policy_(policy) {
  validate_policy(policy_);
  const auto& pairs = flow.pairs();
  od_origin_.reserve(pairs.size());
  od_destination_.reserve(pairs.size());
  od_length_.reserve(pairs.size());
  od_path_.reserve(pairs.size());
  for (const OdPair& p : pairs) {
    od_origin_.push_back(graph_.node_index(p.origin));
    od_destination_.push_back(graph_.node_index(p.destination));
    od_length_.push_back(p.original_length);
    std::vector<int> path;
    path.reserve(p.original_path.size());
    for (const std::string& eid : p.original_path) path.push_back(graph_.edge_index(eid));
    od_path_.push_back(std::move(path));
  }
}

RerouteEngine::Outcome RerouteEngine::reroute(const std::vector<std::uint8_t>& removed_mask,
                                              std::vector<double>& residual,
                                              std::vector<Query> queries,
                                              bool want_assignments) const {
  // fixed processing order: descending demand, ties by od id (== ordinal)
  std::sort(queries.begin(), queries.end(), [](const Query& a, const Query& b) {
    if (a.demand != b.demand) return a.demand > b.demand;
    return a.od < b.od;
  });

  Outcome out;
  out.delivered.assign(queries.size(), 0.0);
  out.skipped.assign(queries.size(), 0);

  std::vector<int> path;
  double len = 0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const Query& q = queries[qi];
    if (q.demand < policy_.min_trips || od_length_[q.od] < policy_.min_length_km) {
      out.skipped[qi] = 1;
      continue;
    }
    double bound = policy_.detour_factor * od_length_[q.od];
    double remaining = q.demand;
    KspEnumerator ksp(graph_, removed_mask, od_origin_[q.od], od_destination_[q.od]);
    for (int tried = 0; tried < policy_.max_paths && remaining > 0; ++tried) {
      if (!ksp.next(path, len)) break;
      if (len > bound) break;  // lengths are non-decreasing, nothing later fits
      double bottleneck = std::numeric_limits<double>::infinity();
      for (int e : path) bottleneck = std::min(bottleneck, residual[e]);
      double f = std::min(remaining, bottleneck);
      if (f <= 0) continue;  // saturated candidate still consumes a slot
      for (int e : path) residual[e] -= f;
      remaining -= f;
      out.delivered[qi] += f;
      if (want_assignments) out.assignments.push_back({q.od, path, f});
    }
  }
  out.order = std::move(queries);
  return out;
}

std::set<std::string> find_interrupted(const FlowLayer& flow,
                                       const std::set<std::string>& removed) {
  std::set<std::string> out;
  if (removed.empty()) return out;
  for (const OdPair& p : flow.pairs())
    for (const std::string& eid : p.original_path)
      if (removed.count(eid)) {
        out.insert(p.id);
        break;
      }
  return out;
}

std::vector<std::vector<std::string>> k_shortest_paths(const AssetNetwork& net,
                                                       const std::set<std::string>& removed,
                                                       const std::string& origin,
                                                       const std::string& destination, int k) {
  if (k < 1) fail(ErrorCode::InvalidConfig, "k must be >= 1");
  if (origin == destination)
    fail(ErrorCode::InvalidConfig, "origin and destination must differ, got '" + origin + "'");
  GraphIndex g(net);
  int s = g.node_index(origin);
  int t = g.node_index(destination);
  std::vector<std::uint8_t> mask(g.num_edges(), 0);
  for (const std::string& eid : removed) mask[g.edge_index(eid)] = 1;

  std::vector<std::vector<std::string>> out;
  KspEnumerator ksp(g, mask, s, t);
  std::vector<int> path;
  double len = 0;
  while (static_cast<int>(out.size()) < k && ksp.next(path, len)) {
    std::vector<std::string>& ids = out.emplace_back();
    ids.reserve(path.size());
    for (int e : path) ids.push_back(g.edge_id(e));
  }
  return out;
}

RerouteResult reroute_interrupted(const AssetNetwork& net, const std::set<std::string>& removed,
                                  const FlowLayer& flow,
                                  const std::map<std::string, double>& demands,
                                  const ReroutePolicy& policy) {
  RerouteEngine engine(net, flow, policy);
  const GraphIndex& g = engine.graph();

  std::vector<std::uint8_t> mask(g.num_edges(), 0);
  for (const std::string& eid : removed) mask[g.edge_index(eid)] = 1;
  std::vector<double> residual(g.num_edges(), 0.0);
  for (int e = 0; e < g.num_edges(); ++e)
    if (!mask[e]) residual[e] = g.edge_spare(e);

  std::vector<RerouteEngine::Query> queries;
  queries.reserve(demands.size());
  for (const auto& [id, demand] : demands) {
    if (demand < 0) fail(ErrorCode::InvalidConfig, "negative demand for relation '" + id + "'");
    queries.push_back({flow.ordinal(id), demand});
  }

  RerouteEngine::Outcome outcome = engine.reroute(mask, residual, std::move(queries), true);

  RerouteResult result;
  for (std::size_t i = 0; i < outcome.order.size(); ++i) {
    const std::string& id = flow.pairs()[outcome.order[i].od].id;
    result.delivered[id] = outcome.delivered[i];
    if (outcome.skipped[i]) result.skipped.insert(id);
  }
  for (const RerouteEngine::Assignment& a : outcome.assignments) {
    std::vector<std::string> ids;
    ids.reserve(a.path.size());
    for (int e : a.path) ids.push_back(g.edge_id(e));
    result.paths[flow.pairs()[a.od].id].emplace_back(std::move(ids), a.flow);
  }
  return result;
}

double immediate_disruption(const FlowLayer& flow, const std::set<std::string>& removed) {
  double total = flow.total_daily_demand();
  if (!(total > 0))
    fail(ErrorCode::DegenerateDemand, "flow layer carries no demand");
  double hit = 0;
  for (const OdPair& p : flow.pairs())
    for (const std::string& eid : p.original_path)
      if (removed.count(eid)) {
        hit += p.demand;
        break;
      }
  return hit / total;
}

}  // namespace gridshock
