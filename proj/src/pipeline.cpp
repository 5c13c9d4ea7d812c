#include "gridshock/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "gridshock/analysis.hpp"
#include "gridshock/csv.hpp"
#include "gridshock/date.hpp"
#include "gridshock/error.hpp"
#include "gridshock/hazard.hpp"
#include "gridshock/network.hpp"
#include "gridshock/routing.hpp"
#include "gridshock/scenario.hpp"
#include "gridshock/simulate.hpp"
#include "json.hpp"

namespace gridshock {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

void check_month_day(int month, int day, const char* field) {
  if (month < 1 || month > 12 || day < 1 || day > 31)
    fail(ErrorCode::InvalidConfig, std::string(field) + ": not a valid month/day");
}

std::vector<Strategy> requested_strategies(const RunConfig& config) {
  std::set<Strategy> seen;
  for (const std::string& s : config.strategies) seen.insert(strategy_from_string(s));
  // canonical order: climate, random, targeted
  return {seen.begin(), seen.end()};
}

}  // namespace

void validate_config(const RunConfig& config, bool need_network, bool need_weather) {
  auto need_file = [](const std::string& path, const char* field) {
    if (path.empty()) fail(ErrorCode::InvalidConfig, std::string(field) + ": missing path");
    if (!fs::is_regular_file(path))
      fail(ErrorCode::InvalidConfig, std::string(field) + ": no such file '" + path + "'");
  };
  if (need_network) {
    need_file(config.nodes_path, "nodes");
    need_file(config.edges_path, "edges");
    need_file(config.od_path, "od");
  }
  if (need_weather) {
    if (config.weather_dir.empty())
      fail(ErrorCode::InvalidConfig, "weather-dir: missing path");
    if (!fs::is_directory(config.weather_dir))
      fail(ErrorCode::InvalidConfig, "weather-dir: no such directory '" + config.weather_dir + "'");
  }
  if (config.out_dir.empty()) fail(ErrorCode::InvalidConfig, "out: missing path");

  if (config.fragility != "sigmoid" && config.fragility != "step")
    fail(ErrorCode::InvalidConfig, "fragility: expected 'sigmoid' or 'step', got '" +
                                       config.fragility + "'");
  if (config.fragility == "sigmoid" && !(config.sigma > 0))
    fail(ErrorCode::InvalidConfig, "sigma: must be positive");
  if (config.runs < 1) fail(ErrorCode::InvalidConfig, "runs: must be >= 1");
  if (!(config.spare_fraction >= 0 && config.spare_fraction <= 1))
    fail(ErrorCode::InvalidConfig, "spare-fraction: must be in [0,1]");
  if (!(config.recovery_prob > 0 && config.recovery_prob <= 1))
    fail(ErrorCode::InvalidConfig, "recovery-prob: must be in (0,1]");
  if (config.max_paths < 1) fail(ErrorCode::InvalidConfig, "max-paths: must be >= 1");
  if (!(config.detour_factor >= 1)) fail(ErrorCode::InvalidConfig, "detour-factor: must be >= 1");
  if (config.min_trips < 0) fail(ErrorCode::InvalidConfig, "min-trips: must be non-negative");
  if (config.min_length_km < 0)
    fail(ErrorCode::InvalidConfig, "min-length-km: must be non-negative");
  if (config.horizon_days < 1) fail(ErrorCode::InvalidConfig, "horizon-days: must be >= 1");
  if (config.strategies.empty())
    fail(ErrorCode::InvalidConfig, "strategies: at least one strategy is required");
  requested_strategies(config);  // rejects unknown names
  if (config.k < 1) fail(ErrorCode::InvalidConfig, "k: must be >= 1");
  if (config.group_years < 1) fail(ErrorCode::InvalidConfig, "group-years: must be >= 1");
  check_month_day(config.summer_start_month, config.summer_start_day, "summer-start");
  check_month_day(config.summer_end_month, config.summer_end_day, "summer-end");
  if (config.projection_samples < 1)
    fail(ErrorCode::InvalidConfig, "projection-samples: must be >= 1");
  if (config.min_psi < 0) fail(ErrorCode::InvalidConfig, "min-psi: must be non-negative");
  if (config.bin_width < 0) fail(ErrorCode::InvalidConfig, "bin-width: must be non-negative");
  if (config.sg_window < 1 || config.sg_window % 2 == 0)
    fail(ErrorCode::InvalidConfig, "sg-window: must be odd and positive");
  if (config.sg_poly < 0 || config.sg_poly >= config.sg_window)
    fail(ErrorCode::InvalidConfig, "sg-poly: must be non-negative and below sg-window");
}

namespace {

struct Inputs {
  AssetNetwork net;
  FlowLayer flow;
  std::vector<WeatherEvent> events;
};

Inputs load_inputs(const RunConfig& config, bool need_weather) {
  Inputs in;
  in.net = load_asset_network(config.nodes_path, config.edges_path, config.spare_fraction);
  in.flow = load_flow_layer(config.od_path, in.net);
  if (need_weather) {
    in.events = load_weather_events(config.weather_dir);
    if (in.events.empty())
      fail(ErrorCode::InvalidConfig,
           "weather-dir: no .json events in '" + config.weather_dir + "'");
  }
  return in;
}

FragilityFunction make_fragility(const RunConfig& config) {
  if (config.fragility == "step") return FragilityFunction::step_at(config.threshold);
  return FragilityFunction::gaussian_sigmoid(config.mu, config.sigma);
}

ReroutePolicy make_policy(const RunConfig& config) {
  return {config.max_paths, config.detour_factor, config.min_trips, config.min_length_km};
}

// Per-event stream key; depends only on (seed, date), never on event order.
std::uint64_t event_seed(std::uint64_t seed, const std::string& date) {
  return mix64(mix64(seed + 0x9E3779B97F4A7C15ull) ^ fnv1a64(date));
}

// Strategies share an event but must not share recovery streams.
std::uint64_t strategy_seed(std::uint64_t ev_seed, Strategy s) {
  return mix64(ev_seed ^ (static_cast<std::uint64_t>(s) + 0x51ED270B9ull));
}

std::string fmt2(const std::string& s) { return '"' + s + '"'; }

std::string join_strategies(const RunConfig& config) {
  std::string out;
  for (std::size_t i = 0; i < config.strategies.size(); ++i) {
    if (i) out += ',';
    out += config.strategies[i];
  }
  return out;
}

std::string month_day(int month, int day) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%02d-%02d", month, day);
  return buf;
}

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["nodes"] = c.nodes_path;
  j["edges"] = c.edges_path;
  j["od"] = c.od_path;
  j["weather-dir"] = c.weather_dir;
  j["out"] = c.out_dir;
  j["fragility"] = c.fragility;
  j["mu"] = c.mu;
  j["sigma"] = c.sigma;
  j["threshold"] = c.threshold;
  j["runs"] = c.runs;
  j["seed"] = c.seed;
  j["spare-fraction"] = c.spare_fraction;
  j["recovery-prob"] = c.recovery_prob;
  j["max-paths"] = c.max_paths;
  j["detour-factor"] = c.detour_factor;
  j["min-trips"] = c.min_trips;
  j["min-length-km"] = c.min_length_km;
  j["horizon-days"] = c.horizon_days;
  j["strategies"] = join_strategies(c);
  j["k"] = c.k;
  j["group-years"] = c.group_years;
  j["use-clusters"] = c.use_clusters;
  j["summer-start"] = month_day(c.summer_start_month, c.summer_start_day);
  j["summer-end"] = month_day(c.summer_end_month, c.summer_end_day);
  j["projection-samples"] = c.projection_samples;
  j["min-psi"] = c.min_psi;
  j["bin-width"] = c.bin_width;
  j["sg-window"] = c.sg_window;
  j["sg-poly"] = c.sg_poly;
  j["dump-scenarios"] = c.dump_scenarios;
  j["dump-paths"] = c.dump_paths;
  return j;
}

ordered_json method_metadata() {
  ordered_json m;
  m["psi_rounding"] = "half-up";
  m["od_processing_order"] = "demand descending, ties by od id";
  m["backlog_drain"] = "spare_fraction * od daily demand per day on recovered paths";
  m["projection"] = "nearest grid cell; ties to the lower row-major index";
  m["rng"] = "splitmix64 substreams keyed (seed, domain, run_index)";
  return m;
}

void write_resolved_config(const RunConfig& c) {
  write_file(fs::path(c.out_dir) / "resolved_config.toml", resolved_config_toml(c));
}

void write_summary(const RunConfig& config, const char* command, ordered_json body) {
  ordered_json doc;
  doc["command"] = command;
  doc["seed"] = config.seed;
  doc["config"] = config_echo(config);
  doc["metadata"] = method_metadata();
  for (auto& [key, value] : body.items()) doc[key] = std::move(value);
  write_file(fs::path(config.out_dir) / "summary.json", doc.dump(2) + "\n");
}

std::string format_p_value(double p) {
  return fmt_double(std::max(p, 1e-4));  // report floor, the statistic itself is unclamped
}

std::vector<WeatherEvent> summer_filter(const std::vector<WeatherEvent>& events,
                                        const RunConfig& config) {
  std::vector<WeatherEvent> out;
  for (const WeatherEvent& e : events)
    if (in_day_window(e.date, config.summer_start_month, config.summer_start_day,
                      config.summer_end_month, config.summer_end_day))
      out.push_back(e);
  return out;
}

// Day-type plan shared by trend, cluster, and clustered assess. Days are
// grouped into group_years bands, clustered per band, and referenced by a
// global cluster id (band offset + local cluster).
struct ClusterPlan {
  std::vector<int> day_cluster;  // per day, global id
  std::vector<std::uint8_t> day_is_rep;
  std::vector<int> cluster_rep_day;  // per global id
  std::vector<int> cluster_size;     // per global id
  std::vector<std::string> group_label;  // per global id, e.g. "2031-2035"
};

ClusterPlan cluster_days(const std::vector<WeatherEvent>& days, const AssetNetwork& net,
                         const RunConfig& config) {
  if (days.empty()) fail(ErrorCode::InvalidConfig, "weather-dir: no days inside summer window");
  int n = static_cast<int>(days.size());
  int y0 = days.front().date.year;  // days are date-sorted
  auto group_of = [&](int year) { return (year - y0) / config.group_years; };

  ClusterPlan plan;
  plan.day_cluster.assign(n, -1);
  plan.day_is_rep.assign(n, 0);

  std::map<int, std::vector<int>> groups;  // group id -> day indices, ascending
  for (int i = 0; i < n; ++i) groups[group_of(days[i].date.year)].push_back(i);

  ProjectionOptions proj{config.projection_samples};
  for (const auto& [gid, members] : groups) {
    int y_lo = y0 + gid * config.group_years;
    std::string label = std::to_string(y_lo) + "-" +
                        std::to_string(y_lo + config.group_years - 1);
    if (config.k > static_cast<int>(members.size()))
      fail(ErrorCode::InvalidK, "group " + label + " has " +
                                    std::to_string(members.size()) + " days, fewer than k=" +
                                    std::to_string(config.k));
    std::vector<WeatherEvent> subset;
    subset.reserve(members.size());
    for (int i : members) subset.push_back(days[i]);
    DayFeatureMatrix features = build_day_features(subset, net, proj);
    Clustering clusters = kmeans_days(features, config.k, config.seed);

    int offset = static_cast<int>(plan.cluster_rep_day.size());
    for (int c = 0; c < clusters.k; ++c) {
      plan.cluster_rep_day.push_back(members[clusters.representatives[c]]);
      plan.cluster_size.push_back(clusters.sizes[c]);
      plan.group_label.push_back(label);
    }
    for (std::size_t m = 0; m < members.size(); ++m)
      plan.day_cluster[members[m]] = offset + clusters.assignments[m];
    for (int c = 0; c < clusters.k; ++c)
      plan.day_is_rep[members[clusters.representatives[c]]] = 1;
  }
  return plan;
}

std::string clusters_csv(const std::vector<WeatherEvent>& days, const ClusterPlan& plan) {
  std::string out = "date,cluster,is_representative,cluster_size\n";
  for (std::size_t i = 0; i < days.size(); ++i) {
    int c = plan.day_cluster[i];
    out += format_date(days[i].date) + "," + std::to_string(c) + "," +
           (plan.day_is_rep[i] ? "1" : "0") + "," + std::to_string(plan.cluster_size[c]) + "\n";
  }
  return out;
}

struct EventAssessment {
  std::string date;
  double psi = 0;
  long long n_removed = 0;
  bool skipped = false;  // below the min-psi report filter
  std::map<Strategy, LosDistribution> results;
};

// Project one event and run every requested strategy at matched intensity.
EventAssessment assess_one_event(const Inputs& in, const RunConfig& config,
                                 const WeatherEvent& event,
                                 std::vector<RerouteLogEntry>* reroute_log) {
  EventAssessment out;
  out.date = format_date(event.date);
  LocalConditions cond = project_event(event, in.net, {config.projection_samples});
  FailureProbabilities probs = failure_probabilities(cond, make_fragility(config));
  out.psi = expected_failed_edges(probs);
  out.n_removed = matched_removal_count(out.psi);
  if (out.psi < config.min_psi) {
    out.skipped = true;
    return out;
  }

  ReroutePolicy policy = make_policy(config);
  RecoveryModel recovery{config.recovery_prob};
  SimulationLimits limits{config.horizon_days};
  std::uint64_t ev_seed = event_seed(config.seed, out.date);
  for (Strategy strat : requested_strategies(config)) {
    ScenarioSet set;
    switch (strat) {
      case Strategy::Climate:
        set = sample_climate_scenarios(probs, config.runs, ev_seed, out.date);
        break;
      case Strategy::Random:
        set = generate_random_scenarios(in.net, out.psi, config.runs, ev_seed, out.date);
        break;
      case Strategy::Targeted:
        set = repeat_scenario(generate_targeted_scenario(in.net, out.psi), config.runs, out.date);
        break;
    }
    if (config.dump_scenarios)
      write_scenarios_jsonl(set, fs::path(config.out_dir) / "scenarios" /
                                     (out.date + "_" + to_string(strat) + ".jsonl"));
    out.results[strat] = assess_scenario_set(in.net, in.flow, set, policy, recovery,
                                             strategy_seed(ev_seed, strat), limits, reroute_log);
  }
  return out;
}

ordered_json strategy_summary(const LosDistribution& dist) {
  ordered_json j;
  j["n_runs"] = dist.samples.size();
  j["mean_los"] = dist.mean();
  j["q025"] = dist.quantile(0.025);
  j["q975"] = dist.quantile(0.975);
  j["mean_recovery_days"] = dist.mean_recovery_days();
  return j;
}

std::string reroute_log_csv(const std::vector<RerouteLogEntry>& log) {
  std::string out = "run_index,day,od,flow,path\n";
  for (const RerouteLogEntry& e : log) {
    out += std::to_string(e.run_index) + "," + std::to_string(e.day) + "," + e.od + "," +
           fmt_double(e.flow) + ",";
    for (std::size_t i = 0; i < e.path.size(); ++i) {
      if (i) out += '|';
      out += e.path[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace

int cmd_assess(const RunConfig& config) {
  validate_config(config, true, true);
  Inputs in = load_inputs(config, true);

  // clustering-enabled assessment only simulates the representative days
  std::vector<WeatherEvent> events;
  if (config.use_clusters) {
    std::vector<WeatherEvent> summer = summer_filter(in.events, config);
    ClusterPlan plan = cluster_days(summer, in.net, config);
    write_file(fs::path(config.out_dir) / "clusters.csv", clusters_csv(summer, plan));
    for (int day : plan.cluster_rep_day) events.push_back(summer[day]);
    std::sort(events.begin(), events.end(),
              [](const WeatherEvent& a, const WeatherEvent& b) { return a.date < b.date; });
    events.erase(std::unique(events.begin(), events.end(),
                             [](const WeatherEvent& a, const WeatherEvent& b) {
                               return a.date == b.date;
                             }),
                 events.end());
  } else {
    events = in.events;
  }

  std::string los = "event_date,strategy,run_index,los,recovery_day\n";
  std::string mwu = "event_date,n_removed,u,p_value\n";
  ordered_json events_json = ordered_json::array();
  std::vector<RerouteLogEntry> reroute_log;

  for (const WeatherEvent& event : events) {
    EventAssessment a =
        assess_one_event(in, config, event, config.dump_paths ? &reroute_log : nullptr);
    ordered_json ej;
    ej["date"] = a.date;
    ej["psi"] = a.psi;
    ej["n_removed"] = a.n_removed;
    ej["skipped"] = a.skipped;
    if (!a.skipped) {
      ordered_json strategies_json;
      for (const auto& [strat, dist] : a.results) {
        strategies_json[to_string(strat)] = strategy_summary(dist);
        for (std::size_t j = 0; j < dist.samples.size(); ++j)
          los += a.date + "," + to_string(strat) + "," + std::to_string(j) + "," +
                 fmt_double(dist.samples[j]) + "," + std::to_string(dist.recovery_days[j]) + "\n";
      }
      ej["strategies"] = std::move(strategies_json);
      if (a.results.count(Strategy::Climate) && a.results.count(Strategy::Random)) {
        MwuResult stat = mann_whitney_u(a.results.at(Strategy::Climate).samples,
                                        a.results.at(Strategy::Random).samples);
        mwu += a.date + "," + std::to_string(a.n_removed) + "," + fmt_double(stat.u) + "," +
               format_p_value(stat.p) + "\n";
        ej["mwu_u"] = stat.u;
        ej["mwu_p"] = stat.p;
      }
    }
    events_json.push_back(std::move(ej));
  }

  write_file(fs::path(config.out_dir) / "los.csv", los);
  write_file(fs::path(config.out_dir) / "mwu.csv", mwu);
  if (config.dump_paths)
    write_file(fs::path(config.out_dir) / "paths.csv", reroute_log_csv(reroute_log));
  ordered_json body;
  body["events"] = std::move(events_json);
  write_summary(config, "assess", std::move(body));
  write_resolved_config(config);
  return 0;
}

int cmd_trend(const RunConfig& config) {
  validate_config(config, true, true);
  Inputs in = load_inputs(config, true);
  std::vector<WeatherEvent> days = summer_filter(in.events, config);
  if (days.empty())
    fail(ErrorCode::InvalidConfig, "weather-dir: no days inside summer window");

  // day types: clusters of similar days, or every day standing alone
  ClusterPlan plan;
  if (config.use_clusters) {
    plan = cluster_days(days, in.net, config);
  } else {
    int n = static_cast<int>(days.size());
    plan.day_cluster.resize(n);
    plan.day_is_rep.assign(n, 1);
    plan.cluster_rep_day.resize(n);
    plan.cluster_size.assign(n, 1);
    plan.group_label.assign(n, "per-day");
    for (int i = 0; i < n; ++i) {
      plan.day_cluster[i] = i;
      plan.cluster_rep_day[i] = i;
    }
  }

  // one simulated distribution per day type
  int n_clusters = static_cast<int>(plan.cluster_rep_day.size());
  std::vector<LosDistribution> type_dist(n_clusters);
  ReroutePolicy policy = make_policy(config);
  RecoveryModel recovery{config.recovery_prob};
  SimulationLimits limits{config.horizon_days};
  FragilityFunction fragility = make_fragility(config);
  std::vector<double> type_psi(n_clusters, 0.0);
  for (int c = 0; c < n_clusters; ++c) {
    const WeatherEvent& event = days[plan.cluster_rep_day[c]];
    std::string date = format_date(event.date);
    LocalConditions cond = project_event(event, in.net, {config.projection_samples});
    FailureProbabilities probs = failure_probabilities(cond, fragility);
    type_psi[c] = expected_failed_edges(probs);
    std::uint64_t ev_seed = event_seed(config.seed, date);
    ScenarioSet set = sample_climate_scenarios(probs, config.runs, ev_seed, date);
    type_dist[c] = assess_scenario_set(in.net, in.flow, set, policy, recovery,
                                       strategy_seed(ev_seed, Strategy::Climate), limits);
  }

  // expand per year by cluster multiplicity and convolve
  std::map<int, std::map<int, int>> year_counts;  // year -> cluster -> days
  for (std::size_t i = 0; i < days.size(); ++i)
    ++year_counts[days[i].date.year][plan.day_cluster[i]];

  std::vector<AnnualLos> annual;
  std::vector<double> means;
  for (const auto& [year, counts] : year_counts) {
    std::vector<std::pair<int, LosDistribution>> inputs;
    inputs.reserve(counts.size());
    for (const auto& [cluster, count] : counts) inputs.emplace_back(count, type_dist[cluster]);
    annual.push_back(convolve_annual(inputs, config.bin_width, year));
    means.push_back(annual.back().mean);
  }

  // smoothed mean column; short series shrink the window to what fits
  int w = std::min<int>(config.sg_window, static_cast<int>(means.size()));
  if (w % 2 == 0) --w;
  std::vector<double> smoothed =
      (w >= 1 && config.sg_poly < w) ? savitzky_golay(means, w, config.sg_poly) : means;

  std::string csv = "year,mean,q05,q95,mean_smoothed\n";
  for (std::size_t i = 0; i < annual.size(); ++i)
    csv += std::to_string(annual[i].year) + "," + fmt_double(annual[i].mean) + "," +
           fmt_double(annual[i].q05) + "," + fmt_double(annual[i].q95) + "," +
           fmt_double(smoothed[i]) + "\n";
  write_file(fs::path(config.out_dir) / "annual_los.csv", csv);
  write_file(fs::path(config.out_dir) / "clusters.csv", clusters_csv(days, plan));

  ordered_json body;
  ordered_json clusters_json = ordered_json::array();
  for (int c = 0; c < n_clusters; ++c) {
    ordered_json cj;
    cj["cluster"] = c;
    cj["group"] = plan.group_label[c];
    cj["representative"] = format_date(days[plan.cluster_rep_day[c]].date);
    cj["size"] = plan.cluster_size[c];
    cj["psi"] = type_psi[c];
    cj["mean_los"] = type_dist[c].mean();
    clusters_json.push_back(std::move(cj));
  }
  body["clusters"] = std::move(clusters_json);
  ordered_json annual_json = ordered_json::array();
  for (std::size_t i = 0; i < annual.size(); ++i) {
    ordered_json yj;
    yj["year"] = annual[i].year;
    yj["mean"] = annual[i].mean;
    yj["q05"] = annual[i].q05;
    yj["q95"] = annual[i].q95;
    yj["mean_smoothed"] = smoothed[i];
    annual_json.push_back(std::move(yj));
  }
  body["annual"] = std::move(annual_json);
  write_summary(config, "trend", std::move(body));
  write_resolved_config(config);
  return 0;
}

int cmd_compare(const RunConfig& config) {
  validate_config(config, true, true);
  Inputs in = load_inputs(config, true);
  FragilityFunction fragility = make_fragility(config);

  std::string onset = "event_date,strategy,run_index,onset\n";
  std::string mwu = "event_date,n_removed,u,p_value\n";
  ordered_json events_json = ordered_json::array();

  for (const WeatherEvent& event : in.events) {
    std::string date = format_date(event.date);
    LocalConditions cond = project_event(event, in.net, {config.projection_samples});
    FailureProbabilities probs = failure_probabilities(cond, fragility);
    double psi = expected_failed_edges(probs);
    long long n_removed = matched_removal_count(psi);
    ordered_json ej;
    ej["date"] = date;
    ej["psi"] = psi;
    ej["n_removed"] = n_removed;
    if (psi < config.min_psi) {
      ej["skipped"] = true;
      events_json.push_back(std::move(ej));
      continue;
    }
    ej["skipped"] = false;
    std::uint64_t ev_seed = event_seed(config.seed, date);

    std::map<Strategy, std::vector<double>> onsets;
    for (Strategy strat : requested_strategies(config)) {
      std::vector<double>& samples = onsets[strat];
      if (strat == Strategy::Targeted) {
        FailureScenario s = generate_targeted_scenario(in.net, psi);
        auto ids = s.failed_ids();
        samples.push_back(
            immediate_disruption(in.flow, {ids.begin(), ids.end()}));
      } else {
        ScenarioSet set = strat == Strategy::Climate
                              ? sample_climate_scenarios(probs, config.runs, ev_seed, date)
                              : generate_random_scenarios(in.net, psi, config.runs, ev_seed, date);
        samples.reserve(set.scenarios.size());
        for (const FailureScenario& s : set.scenarios) {
          auto ids = s.failed_ids();
          samples.push_back(immediate_disruption(in.flow, {ids.begin(), ids.end()}));
        }
      }
      for (std::size_t j = 0; j < samples.size(); ++j)
        onset += date + "," + to_string(strat) + "," + std::to_string(j) + "," +
                 fmt_double(samples[j]) + "\n";
      double mean = 0;
      for (double v : samples) mean += v;
      ej[to_string(strat)] = ordered_json{{"n_runs", samples.size()},
                                          {"mean_onset", mean / samples.size()}};
    }
    if (onsets.count(Strategy::Climate) && onsets.count(Strategy::Random)) {
      MwuResult stat =
          mann_whitney_u(onsets.at(Strategy::Climate), onsets.at(Strategy::Random));
      mwu += date + "," + std::to_string(n_removed) + "," + fmt_double(stat.u) + "," +
             format_p_value(stat.p) + "\n";
      ej["mwu_u"] = stat.u;
      ej["mwu_p"] = stat.p;
    }
    events_json.push_back(std::move(ej));
  }

  write_file(fs::path(config.out_dir) / "onset.csv", onset);
  write_file(fs::path(config.out_dir) / "mwu.csv", mwu);
  ordered_json body;
  body["events"] = std::move(events_json);
  write_summary(config, "compare", std::move(body));
  write_resolved_config(config);
  return 0;
}

int cmd_cluster(const RunConfig& config) {
  validate_config(config, true, true);
  Inputs in = load_inputs(config, true);
  std::vector<WeatherEvent> days = summer_filter(in.events, config);
  ClusterPlan plan = cluster_days(days, in.net, config);
  write_file(fs::path(config.out_dir) / "clusters.csv", clusters_csv(days, plan));

  ordered_json body;
  ordered_json clusters_json = ordered_json::array();
  for (std::size_t c = 0; c < plan.cluster_rep_day.size(); ++c) {
    ordered_json cj;
    cj["cluster"] = c;
    cj["group"] = plan.group_label[c];
    cj["representative"] = format_date(days[plan.cluster_rep_day[c]].date);
    cj["size"] = plan.cluster_size[c];
    clusters_json.push_back(std::move(cj));
  }
  body["clusters"] = std::move(clusters_json);
  write_summary(config, "cluster", std::move(body));
  write_resolved_config(config);
  return 0;
}

std::string resolved_config_toml(const RunConfig& config) {
  std::string out;
  auto add = [&](const std::string& key, const std::string& value) {
    out += key + " = " + value + "\n";
  };
  add("nodes", fmt2(config.nodes_path));
  add("edges", fmt2(config.edges_path));
  add("od", fmt2(config.od_path));
  add("weather-dir", fmt2(config.weather_dir));
  add("out", fmt2(config.out_dir));
  add("fragility", fmt2(config.fragility));
  add("mu", fmt_double(config.mu));
  add("sigma", fmt_double(config.sigma));
  add("threshold", fmt_double(config.threshold));
  add("runs", std::to_string(config.runs));
  add("seed", std::to_string(config.seed));
  add("spare-fraction", fmt_double(config.spare_fraction));
  add("recovery-prob", fmt_double(config.recovery_prob));
  add("max-paths", std::to_string(config.max_paths));
  add("detour-factor", fmt_double(config.detour_factor));
  add("min-trips", fmt_double(config.min_trips));
  add("min-length-km", fmt_double(config.min_length_km));
  add("horizon-days", std::to_string(config.horizon_days));
  add("strategies", fmt2(join_strategies(config)));
  add("k", std::to_string(config.k));
  add("group-years", std::to_string(config.group_years));
  add("use-clusters", config.use_clusters ? "true" : "false");
  add("summer-start", fmt2(month_day(config.summer_start_month, config.summer_start_day)));
  add("summer-end", fmt2(month_day(config.summer_end_month, config.summer_end_day)));
  add("projection-samples", std::to_string(config.projection_samples));
  add("min-psi", fmt_double(config.min_psi));
  add("bin-width", fmt_double(config.bin_width));
  add("sg-window", std::to_string(config.sg_window));
  add("sg-poly", std::to_string(config.sg_poly));
  add("dump-scenarios", config.dump_scenarios ? "true" : "false");
  add("dump-paths", config.dump_paths ? "true" : "false");
  return out;
}

}  // namespace gridshock
