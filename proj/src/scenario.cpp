#include "gridshock/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gridshock/csv.hpp"
#include "gridshock/error.hpp"
#include "gridshock/rng.hpp"
#include "json.hpp"

namespace gridshock {

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Climate: return "climate";
    case Strategy::Random: return "random";
    case Strategy::Targeted: return "targeted";
  }
  return "unknown";
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "climate") return Strategy::Climate;
  if (s == "random") return Strategy::Random;
  if (s == "targeted") return Strategy::Targeted;
  fail(ErrorCode::InvalidConfig, "unknown strategy '" + s + "'");
}

std::size_t FailureScenario::failed_count() const {
  return static_cast<std::size_t>(
      std::count(states.begin(), states.end(), static_cast<std::uint8_t>(0)));
}

std::vector<std::string> FailureScenario::failed_ids() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!states[i]) out.push_back((*asset_ids)[i]);
  return out;
}

long long matched_removal_count(double psi) {
  if (!(psi >= 0.0)) fail(ErrorCode::InvalidConfig, "psi must be non-negative");
  return static_cast<long long>(std::floor(psi + 0.5));
}

ScenarioSet sample_climate_scenarios(const FailureProbabilities& probs, int n_runs,
                                     std::uint64_t seed, const std::string& event_ref) {
  if (n_runs < 1) fail(ErrorCode::InvalidConfig, "n_runs must be >= 1");
  auto ids = std::make_shared<std::vector<std::string>>();
  std::vector<double> p;
  ids->reserve(probs.p.size());
  p.reserve(probs.p.size());
  for (const auto& [id, pi] : probs.p) {  // std::map iterates in id order
    if (!(pi >= 0.0 && pi <= 1.0))
      fail(ErrorCode::InvalidConfig, "failure probability for '" + id + "' outside [0,1]");
    ids->push_back(id);
    p.push_back(pi);
  }

  ScenarioSet set;
  set.event_ref = event_ref;
  set.seed = seed;
  set.scenarios.resize(n_runs);
  for (int j = 0; j < n_runs; ++j) {
    FailureScenario& s = set.scenarios[j];
    s.asset_ids = ids;
    s.strategy = Strategy::Climate;
    s.run_index = j;
    s.states.resize(p.size(), 1);
    SplitMix64 rng = substream(seed, rng_domain::kClimateDraw, static_cast<std::uint64_t>(j));
    for (std::size_t i = 0; i < p.size(); ++i)
      s.states[i] = rng.next_double() < p[i] ? 0 : 1;
  }
  return set;
}

namespace {

std::shared_ptr<const std::vector<std::string>> network_edge_ids(const AssetNetwork& net) {
  auto ids = std::make_shared<std::vector<std::string>>();
  ids->reserve(net.edges().size());
  for (const AssetEdge& e : net.edges()) ids->push_back(e.id);
  return ids;
}

}  // namespace

ScenarioSet generate_random_scenarios(const AssetNetwork& net, double psi, int n_runs,
                                      std::uint64_t seed, const std::string& event_ref) {
  if (n_runs < 1) fail(ErrorCode::InvalidConfig, "n_runs must be >= 1");
  long long m = matched_removal_count(psi);
  auto ids = network_edge_ids(net);
  long long n_edges = static_cast<long long>(ids->size());
  if (m > n_edges)
    fail(ErrorCode::TooManyRemovals, "matched removal count " + std::to_string(m) +
                                         " exceeds the " + std::to_string(n_edges) +
                                         " edges available");

  ScenarioSet set;
  set.event_ref = event_ref;
  set.seed = seed;
  set.scenarios.resize(n_runs);
  std::vector<int> order(ids->size());
  for (int j = 0; j < n_runs; ++j) {
    FailureScenario& s = set.scenarios[j];
    s.asset_ids = ids;
    s.strategy = Strategy::Random;
    s.run_index = j;
    s.states.assign(ids->size(), 1);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng = substream(seed, rng_domain::kRandomDraw, static_cast<std::uint64_t>(j));
    // partial Fisher-Yates: the first m slots become the removal set
    for (long long i = 0; i < m; ++i) {
      long long pick = i + static_cast<long long>(rng.next_below(ids->size() - i));
      std::swap(order[i], order[pick]);
      s.states[order[i]] = 0;
    }
  }
  return set;
}

FailureScenario generate_targeted_scenario(const AssetNetwork& net, double psi) {
  long long m = matched_removal_count(psi);
  auto ids = network_edge_ids(net);
  long long n_edges = static_cast<long long>(ids->size());
  if (m > n_edges)
    fail(ErrorCode::TooManyRemovals, "matched removal count " + std::to_string(m) +
                                         " exceeds the " + std::to_string(n_edges) +
                                         " edges available");
  std::vector<int> order(ids->size());
  std::iota(order.begin(), order.end(), 0);
  const auto& edges = net.edges();  // index-aligned with ids (both id-sorted)
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return edges[a].daily_traffic > edges[b].daily_traffic;  // ties keep id order
  });

  FailureScenario s;
  s.asset_ids = ids;
  s.strategy = Strategy::Targeted;
  s.run_index = 0;
  s.states.assign(ids->size(), 1);
  for (long long i = 0; i < m; ++i) s.states[order[i]] = 0;
  return s;
}

ScenarioSet repeat_scenario(const FailureScenario& scenario, int n_runs,
                            const std::string& event_ref) {
  if (n_runs < 1) fail(ErrorCode::InvalidConfig, "n_runs must be >= 1");
  ScenarioSet set;
  set.event_ref = event_ref;
  set.scenarios.resize(n_runs, scenario);
  for (int j = 0; j < n_runs; ++j) set.scenarios[j].run_index = j;
  return set;
}

void write_scenarios_jsonl(const ScenarioSet& set, const std::filesystem::path& file) {
  std::string out;
  for (const FailureScenario& s : set.scenarios) {
    nlohmann::ordered_json line;
    line["run_index"] = s.run_index;
    line["strategy"] = to_string(s.strategy);
    line["failed_edges"] = s.failed_ids();
    out += line.dump();
    out += '\n';
  }
  write_file(file, out);
}

}  // namespace gridshock
