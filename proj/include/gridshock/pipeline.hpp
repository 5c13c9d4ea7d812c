#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gridshock {

// Fully resolved run configuration. Every artifact embeds these values, and a
// run started from that echo reproduces the artifacts byte for byte.
struct RunConfig {
  std::string nodes_path;
  std::string edges_path;
  std::string od_path;
  std::string weather_dir;
  std::string out_dir = "out";

  std::string fragility = "sigmoid";  // "sigmoid" or "step"
  double mu = 35.0;
  double sigma = 2.5;
  double threshold = 35.0;

  int runs = 250;
  std::uint64_t seed = 0;

  double spare_fraction = 0.5;
  double recovery_prob = 0.5;
  int max_paths = 5;
  double detour_factor = 2.0;
  double min_trips = 15.0;
  double min_length_km = 30.0;
  int horizon_days = 10000;

  std::vector<std::string> strategies = {"climate", "random", "targeted"};

  int k = 10;
  int group_years = 5;
  bool use_clusters = false;  // assess representatives instead of every day
  int summer_start_month = 5, summer_start_day = 1;
  int summer_end_month = 9, summer_end_day = 30;

  int projection_samples = 1;
  double min_psi = 0.0;   // report-level filter; events below it are not simulated
  double bin_width = 0.0; // 0 selects max-sample / 200
  int sg_window = 11;
  int sg_poly = 2;

  bool dump_scenarios = false;
  bool dump_paths = false;
};

// InvalidConfig with a message naming the offending field.
void validate_config(const RunConfig& config, bool need_network, bool need_weather);

// Each command returns 0 after writing all of its artifacts; failures raise
// Error and nothing of the partial run is promised.
int cmd_assess(const RunConfig& config);
int cmd_trend(const RunConfig& config);
int cmd_compare(const RunConfig& config);
int cmd_cluster(const RunConfig& config);

// The TOML-style key/value echo written next to every artifact set.
std::string resolved_config_toml(const RunConfig& config);

}  // namespace gridshock
