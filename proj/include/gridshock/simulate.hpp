#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "gridshock/network.hpp"
#include "gridshock/routing.hpp"
#include "gridshock/rng.hpp"
#include "gridshock/scenario.hpp"

namespace gridshock {

struct RecoveryModel {
  double per_step_recovery_prob = 0.5;  // in (0,1], per failed edge per day
};

struct SimulationLimits {
  int horizon_days = 10000;  // HorizonExceeded beyond this
};

// One simulated run. q_series[t] is Q(t) = delivered / demanded for day t;
// the last entry is 1 and recovery_day is its index.
struct ScenarioOutcome {
  std::vector<double> q_series;
  double los = 0;  // sum over t of (1 - Q(t)), in days of lost service
  int recovery_day = 0;
};

// Rerouted path usage per day, for audit dumps.
struct RerouteLogEntry {
  int run_index = 0;
  int day = 0;
  std::string od;
  std::vector<std::string> path;
  double flow = 0;
};

double quality_of_service(double delivered, double demanded);

// One recovery sweep: each failed edge recovers independently with the model
// probability. Draws are taken in sorted edge-id order from the given stream.
std::set<std::string> step_recovery(const std::set<std::string>& failed,
                                    const RecoveryModel& recovery, SplitMix64& rng);

ScenarioOutcome run_scenario(const AssetNetwork& net, const FlowLayer& flow,
                             const FailureScenario& scenario, const ReroutePolicy& policy,
                             const RecoveryModel& recovery, std::uint64_t seed,
                             const SimulationLimits& limits = {},
                             std::vector<RerouteLogEntry>* reroute_log = nullptr);

// Loss-of-service samples across a scenario set, ordered by run_index.
struct LosDistribution {
  std::string event_ref;
  Strategy strategy = Strategy::Climate;
  std::vector<double> samples;
  std::vector<int> recovery_days;

  double mean() const;
  // Empirical quantile: smallest sample with at least a q fraction at or
  // below it.
  double quantile(double q) const;
  double mean_recovery_days() const;
};

LosDistribution assess_scenario_set(const AssetNetwork& net, const FlowLayer& flow,
                                    const ScenarioSet& set, const ReroutePolicy& policy,
                                    const RecoveryModel& recovery, std::uint64_t seed,
                                    const SimulationLimits& limits = {},
                                    std::vector<RerouteLogEntry>* reroute_log = nullptr);

// Climate-strategy assessment of one event: sample n_runs joint failure
// states from the probabilities, then simulate each.
LosDistribution assess_event(const AssetNetwork& net, const FlowLayer& flow,
                             const FailureProbabilities& probs, int n_runs,
                             const ReroutePolicy& policy, const RecoveryModel& recovery,
                             std::uint64_t seed, const SimulationLimits& limits = {});

// Worker count: GRIDSHOCK_THREADS if set (>= 1), else hardware concurrency.
// Results never depend on it; work is keyed by run_index.
int worker_count();

}  // namespace gridshock
