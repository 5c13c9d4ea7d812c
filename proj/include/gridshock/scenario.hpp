#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "gridshock/hazard.hpp"
#include "gridshock/network.hpp"

namespace gridshock {

enum class Strategy { Climate, Random, Targeted };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

// One joint failure state. states[i] == 0 means asset_ids[i] failed; the id
// vector is shared across a set and sorted, which fixes the draw order.
struct FailureScenario {
  std::shared_ptr<const std::vector<std::string>> asset_ids;
  std::vector<std::uint8_t> states;  // 1 intact, 0 failed
  Strategy strategy = Strategy::Climate;
  int run_index = 0;

  std::size_t failed_count() const;
  std::vector<std::string> failed_ids() const;
};

struct ScenarioSet {
  std::vector<FailureScenario> scenarios;  // run_index == position
  std::string event_ref;                   // event date tag, may be empty
  std::uint64_t seed = 0;
};

// round-half-up of psi to the number of edges a matched baseline removes
long long matched_removal_count(double psi);

// Independent Bernoulli draw per asset, run j keyed by (seed, climate, j).
ScenarioSet sample_climate_scenarios(const FailureProbabilities& probs, int n_runs,
                                     std::uint64_t seed, const std::string& event_ref = "");

// Removes exactly matched_removal_count(psi) edges uniformly at random,
// without replacement, per run.
ScenarioSet generate_random_scenarios(const AssetNetwork& net, double psi, int n_runs,
                                      std::uint64_t seed, const std::string& event_ref = "");

// Deterministic: removes the matched count of edges with the highest
// daily_traffic, ties by ascending edge id.
FailureScenario generate_targeted_scenario(const AssetNetwork& net, double psi);

// n_runs copies of one scenario with run_index 0..n_runs-1; used to push a
// deterministic removal set through the same stochastic-recovery assessment.
ScenarioSet repeat_scenario(const FailureScenario& scenario, int n_runs,
                            const std::string& event_ref = "");

// JSON-lines persistence: {"run_index": j, "strategy": "...", "failed_edges": [...]}.
void write_scenarios_jsonl(const ScenarioSet& set, const std::filesystem::path& file);

}  // namespace gridshock
