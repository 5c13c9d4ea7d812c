#include "gridshock/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "gridshock/error.hpp"

namespace gridshock {

double quality_of_service(double delivered, double demanded) {
  if (!(demanded > 0))
    fail(ErrorCode::DegenerateDemand, "quality of service undefined without positive demand");
  return delivered / demanded;
}

std::set<std::string> step_recovery(const std::set<std::string>& failed,
                                    const RecoveryModel& recovery, SplitMix64& rng) {
  if (!(recovery.per_step_recovery_prob > 0.0 && recovery.per_step_recovery_prob <= 1.0))
    fail(ErrorCode::InvalidConfig, "per_step_recovery_prob must be in (0,1]");
  std::set<std::string> still_failed;
  for (const std::string& id : failed)  // sorted order fixes the draw sequence
    if (!(rng.next_double() < recovery.per_step_recovery_prob)) still_failed.insert(id);
  return still_failed;
}

namespace {

// Immutable per-assessment state shared by all runs (and threads).
struct SimContext {
  RerouteEngine engine;
  std::vector<double> daily;               // by od ordinal
  std::vector<std::vector<int>> edge_ods;  // edge -> ods whose original path uses it
  double spare_fraction;
  int n_ods;
  int n_edges;

  SimContext(const AssetNetwork& net, const FlowLayer& flow, const ReroutePolicy& policy)
      : engine(net, flow, policy), spare_fraction(net.spare_capacity_fraction()) {
    n_ods = static_cast<int>(flow.pairs().size());
    n_edges = engine.graph().num_edges();
    daily.reserve(n_ods);
    for (const OdPair& p : flow.pairs()) daily.push_back(p.demand);
    edge_ods.resize(n_edges);
    for (int od = 0; od < n_ods; ++od)
      for (int e : engine.od_path(od)) edge_ods[e].push_back(od);
  }
};

struct RunWorkspace {
  std::vector<std::uint8_t> failed;
  std::vector<double> residual;
  std::vector<double> backlog;
  std::vector<double> delivered;
  std::vector<int> broken;  // failed edges on the od's original path
  std::vector<RerouteEngine::Query> queries;
};

// Failed edge indices of a scenario, translated through the graph index.
std::vector<int> failed_edge_indices(const FailureScenario& scenario, const GraphIndex& g) {
  std::vector<int> out;
  for (std::size_t i = 0; i < scenario.states.size(); ++i)
    if (!scenario.states[i]) out.push_back(g.edge_index((*scenario.asset_ids)[i]));
  return out;
}

ScenarioOutcome simulate_one(const SimContext& ctx, const std::vector<int>& failed_edges,
                             const RecoveryModel& recovery, std::uint64_t seed, int run_index,
                             const SimulationLimits& limits, RunWorkspace& ws,
                             std::vector<RerouteLogEntry>* log) {
  if (!(recovery.per_step_recovery_prob > 0.0 && recovery.per_step_recovery_prob <= 1.0))
    fail(ErrorCode::InvalidConfig, "per_step_recovery_prob must be in (0,1]");
  if (limits.horizon_days < 1) fail(ErrorCode::InvalidConfig, "horizon_days must be >= 1");

  ws.failed.assign(ctx.n_edges, 0);
  ws.backlog.assign(ctx.n_ods, 0.0);
  ws.delivered.assign(ctx.n_ods, 0.0);
  ws.broken.assign(ctx.n_ods, 0);
  int n_failed = 0;
  for (int e : failed_edges)
    if (!ws.failed[e]) {
      ws.failed[e] = 1;
      ++n_failed;
      for (int od : ctx.edge_ods[e]) ++ws.broken[od];
    }

  SplitMix64 recovery_rng =
      substream(seed, rng_domain::kRecovery, static_cast<std::uint64_t>(run_index));
  ScenarioOutcome outcome;

  while (true) {
    int day = static_cast<int>(outcome.q_series.size());

    // demand snapshot and intact-side delivery; backlog drains through the
    // spare fraction of the od's own daily demand
    double total_demand = 0;
    ws.queries.clear();
    for (int od = 0; od < ctx.n_ods; ++od) {
      double demand = ctx.daily[od] + ws.backlog[od];
      total_demand += demand;
      if (ws.broken[od] > 0) {
        ws.delivered[od] = 0;
        ws.queries.push_back({od, demand});
      } else {
        double drain = std::min(ws.backlog[od], ctx.spare_fraction * ctx.daily[od]);
        ws.delivered[od] = ctx.daily[od] + drain;
        ws.backlog[od] -= drain;
      }
    }
    if (!(total_demand > 0))
      fail(ErrorCode::DegenerateDemand, "flow layer carries no demand");

    if (!ws.queries.empty()) {
      ws.residual.assign(ctx.n_edges, 0.0);
      for (int e = 0; e < ctx.n_edges; ++e)
        if (!ws.failed[e]) ws.residual[e] = ctx.engine.graph().edge_spare(e);
      RerouteEngine::Outcome rerouted =
          ctx.engine.reroute(ws.failed, ws.residual, ws.queries, log != nullptr);
      for (std::size_t i = 0; i < rerouted.order.size(); ++i) {
        int od = rerouted.order[i].od;
        ws.delivered[od] = rerouted.delivered[i];
        ws.backlog[od] = rerouted.order[i].demand - rerouted.delivered[i];
      }
      if (log) {
        const GraphIndex& g = ctx.engine.graph();
        for (const RerouteEngine::Assignment& a : rerouted.assignments) {
          RerouteLogEntry entry;
          entry.run_index = run_index;
          entry.day = day;
          entry.od = std::to_string(a.od);  // ordinal; the caller maps it to the od id
          entry.flow = a.flow;
          entry.path.reserve(a.path.size());
          for (int e : a.path) entry.path.push_back(g.edge_id(e));
          log->push_back(std::move(entry));
        }
      }
    }

    double total_delivered = 0;
    for (int od = 0; od < ctx.n_ods; ++od) total_delivered += ws.delivered[od];
    double q = total_delivered / total_demand;
    q = std::min(1.0, std::max(0.0, q));
    outcome.q_series.push_back(q);
    outcome.los += 1.0 - q;

    bool any_backlog = false;
    for (int od = 0; od < ctx.n_ods; ++od)
      if (ws.backlog[od] > 0) {
        any_backlog = true;
        break;
      }
    if (n_failed == 0 && !any_backlog) break;

    if (static_cast<int>(outcome.q_series.size()) >= limits.horizon_days)
      fail(ErrorCode::HorizonExceeded, "no full recovery within " +
                                           std::to_string(limits.horizon_days) + " days");

    // overnight repairs, drawn in canonical edge order
    for (int e = 0; e < ctx.n_edges; ++e) {
      if (!ws.failed[e]) continue;
      if (recovery_rng.next_double() < recovery.per_step_recovery_prob) {
        ws.failed[e] = 0;
        --n_failed;
        for (int od : ctx.edge_ods[e]) --ws.broken[od];
      }
    }
  }

  outcome.recovery_day = static_cast<int>(outcome.q_series.size()) - 1;
  return outcome;
}

}  // namespace

ScenarioOutcome run_scenario(const AssetNetwork& net, const FlowLayer& flow,
                             const FailureScenario& scenario, const ReroutePolicy& policy,
                             const RecoveryModel& recovery, std::uint64_t seed,
                             const SimulationLimits& limits,
                             std::vector<RerouteLogEntry>* reroute_log) {
  SimContext ctx(net, flow, policy);
  RunWorkspace ws;
  std::vector<RerouteLogEntry> local_log;
  ScenarioOutcome outcome =
      simulate_one(ctx, failed_edge_indices(scenario, ctx.engine.graph()), recovery, seed,
                   scenario.run_index, limits, ws, reroute_log ? &local_log : nullptr);
  if (reroute_log) {
    // translate od ordinals recorded by the inner loop into od ids
    for (RerouteLogEntry& e : local_log) e.od = flow.pairs()[std::stoi(e.od)].id;
    reroute_log->insert(reroute_log->end(), local_log.begin(), local_log.end());
  }
  return outcome;
}

double LosDistribution::mean() const {
  if (samples.empty()) fail(ErrorCode::EmptySample, "empty loss-of-service sample");
  double s = 0;
  for (double v : samples) s += v;
  return s / static_cast<double>(samples.size());
}

double LosDistribution::quantile(double q) const {
  if (samples.empty()) fail(ErrorCode::EmptySample, "empty loss-of-service sample");
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::InvalidConfig, "quantile level outside [0,1]");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  auto n = static_cast<double>(sorted.size());
  auto idx = static_cast<long long>(std::ceil(q * n)) - 1;
  idx = std::clamp<long long>(idx, 0, sorted.size() - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

double LosDistribution::mean_recovery_days() const {
  if (recovery_days.empty()) fail(ErrorCode::EmptySample, "empty recovery-day sample");
  double s = 0;
  for (int v : recovery_days) s += v;
  return s / static_cast<double>(recovery_days.size());
}

LosDistribution assess_scenario_set(const AssetNetwork& net, const FlowLayer& flow,
                                    const ScenarioSet& set, const ReroutePolicy& policy,
                                    const RecoveryModel& recovery, std::uint64_t seed,
                                    const SimulationLimits& limits,
                                    std::vector<RerouteLogEntry>* reroute_log) {
  int n = static_cast<int>(set.scenarios.size());
  if (n < 1) fail(ErrorCode::InvalidConfig, "scenario set is empty");

  SimContext ctx(net, flow, policy);

  // translate failed ids up front so workers never touch shared hash maps
  std::vector<std::vector<int>> failed(n);
  for (int j = 0; j < n; ++j)
    failed[j] = failed_edge_indices(set.scenarios[j], ctx.engine.graph());

  LosDistribution dist;
  dist.event_ref = set.event_ref;
  dist.strategy = set.scenarios.front().strategy;
  dist.samples.resize(n);
  dist.recovery_days.resize(n);

  std::vector<std::vector<RerouteLogEntry>> logs;
  if (reroute_log) logs.resize(n);

  int workers = std::min(worker_count(), n);
  std::vector<std::exception_ptr> errors(n);
  auto run_range = [&](int worker) {
    RunWorkspace ws;
    for (int j = worker; j < n; j += workers) {
      try {
        ScenarioOutcome outcome =
            simulate_one(ctx, failed[j], recovery, seed, set.scenarios[j].run_index, limits, ws,
                         reroute_log ? &logs[j] : nullptr);
        dist.samples[j] = outcome.los;
        dist.recovery_days[j] = outcome.recovery_day;
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };

  if (workers <= 1) {
    run_range(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) pool.emplace_back(run_range, w);
    for (std::thread& th : pool) th.join();
  }
  for (int j = 0; j < n; ++j)
    if (errors[j]) std::rethrow_exception(errors[j]);

  if (reroute_log)
    for (int j = 0; j < n; ++j)
      for (RerouteLogEntry& e : logs[j]) {
        e.od = flow.pairs()[std::stoi(e.od)].id;
        reroute_log->push_back(std::move(e));
      }
  return dist;
}

LosDistribution assess_event(const AssetNetwork& net, const FlowLayer& flow,
                             const FailureProbabilities& probs, int n_runs,
                             const ReroutePolicy& policy, const RecoveryModel& recovery,
                             std::uint64_t seed, const SimulationLimits& limits) {
  ScenarioSet set = sample_climate_scenarios(probs, n_runs, seed);
  return assess_scenario_set(net, flow, set, policy, recovery, seed, limits);
}

int worker_count() {
  if (const char* env = std::getenv("GRIDSHOCK_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      fail(ErrorCode::InvalidConfig, "GRIDSHOCK_THREADS must be a positive integer, got '" +
                                         std::string(env) + "'");
    return static_cast<int>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

}  // namespace gridshock
