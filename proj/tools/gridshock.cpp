#include <cctype>
#include <charconv>
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gridshock/csv.hpp"
#include "gridshock/error.hpp"
#include "gridshock/pipeline.hpp"

namespace {

using gridshock::ErrorCode;
using gridshock::RunConfig;

// auxiliary CLI state that maps onto RunConfig after parsing
struct CliState {
  RunConfig cfg;
  std::string strategies = "climate,random,targeted";
  std::string summer_start = "05-01";
  std::string summer_end = "09-30";
  std::string use_clusters = "auto";  // trend defaults on, everything else off
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    std::size_t end = comma == std::string::npos ? s.size() : comma;
    while (start < end && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
    while (end > start && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    if (end > start) out.push_back(s.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

void parse_month_day(const std::string& s, int& month, int& day, const char* field) {
  if (s.size() != 5 || s[2] != '-' || !isdigit(s[0]) || !isdigit(s[1]) || !isdigit(s[3]) ||
      !isdigit(s[4]))
    gridshock::fail(ErrorCode::InvalidConfig,
                    std::string(field) + ": expected MM-DD, got '" + s + "'");
  month = (s[0] - '0') * 10 + (s[1] - '0');
  day = (s[3] - '0') * 10 + (s[4] - '0');
}

std::string strip_quotes(const std::string& s, const std::string& key) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (!s.empty() && (s.front() == '"' || s.back() == '"'))
    gridshock::fail(ErrorCode::ParseError, "config: unbalanced quotes for '" + key + "'");
  return s;
}

bool to_bool(const std::string& s, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  gridshock::fail(ErrorCode::ParseError, "config: expected true or false for '" + key + "'");
}

std::uint64_t to_seed(const std::string& s, const std::string& key) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    gridshock::fail(ErrorCode::ParseError, "config: expected an unsigned integer for '" + key + "'");
  return v;
}

// Flat key = value file, the same shape resolved_config.toml is written in.
// Applied before CLI11 parses argv, so explicit flags override it.
void apply_config_file(const std::string& path, CliState& st) {
  std::string text = gridshock::read_file(path);
  RunConfig& c = st.cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? eol : eol - pos);
    pos = eol == std::string::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      gridshock::fail(ErrorCode::ParseError,
                      path + ":" + std::to_string(line_no) + ": expected key = value");
    auto trim = [](std::string s) {
      std::size_t a = s.find_first_not_of(" \t");
      std::size_t b = s.find_last_not_of(" \t");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string raw = trim(line.substr(eq + 1));
    std::string val = strip_quotes(raw, key);

    if (key == "nodes") c.nodes_path = val;
    else if (key == "edges") c.edges_path = val;
    else if (key == "od") c.od_path = val;
    else if (key == "weather-dir") c.weather_dir = val;
    else if (key == "out") c.out_dir = val;
    else if (key == "fragility") c.fragility = val;
    else if (key == "mu") c.mu = gridshock::to_double(val, "config " + key);
    else if (key == "sigma") c.sigma = gridshock::to_double(val, "config " + key);
    else if (key == "threshold") c.threshold = gridshock::to_double(val, "config " + key);
    else if (key == "runs") c.runs = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "seed") c.seed = to_seed(val, key);
    else if (key == "spare-fraction") c.spare_fraction = gridshock::to_double(val, "config " + key);
    else if (key == "recovery-prob") c.recovery_prob = gridshock::to_double(val, "config " + key);
    else if (key == "max-paths") c.max_paths = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "detour-factor") c.detour_factor = gridshock::to_double(val, "config " + key);
    else if (key == "min-trips") c.min_trips = gridshock::to_double(val, "config " + key);
    else if (key == "min-length-km") c.min_length_km = gridshock::to_double(val, "config " + key);
    else if (key == "horizon-days") c.horizon_days = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "strategies") st.strategies = val;
    else if (key == "k") c.k = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "group-years") c.group_years = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "use-clusters") st.use_clusters = to_bool(val, key) ? "true" : "false";
    else if (key == "summer-start") st.summer_start = val;
    else if (key == "summer-end") st.summer_end = val;
    else if (key == "projection-samples") c.projection_samples = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "min-psi") c.min_psi = gridshock::to_double(val, "config " + key);
    else if (key == "bin-width") c.bin_width = gridshock::to_double(val, "config " + key);
    else if (key == "sg-window") c.sg_window = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "sg-poly") c.sg_poly = static_cast<int>(gridshock::to_int(val, "config " + key));
    else if (key == "dump-scenarios") c.dump_scenarios = to_bool(val, key);
    else if (key == "dump-paths") c.dump_paths = to_bool(val, key);
    else
      gridshock::fail(ErrorCode::ParseError,
                      path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

void add_options(CLI::App* sub, CliState& st, std::string& config_path) {
  RunConfig& c = st.cfg;
  sub->add_option("--config", config_path, "Key = value file; explicit flags override it");
  sub->add_option("--nodes", c.nodes_path, "Node table CSV");
  sub->add_option("--edges", c.edges_path, "Edge table CSV");
  sub->add_option("--od", c.od_path, "Origin-destination relation CSV");
  sub->add_option("--weather-dir", c.weather_dir, "Directory of weather event JSON files");
  sub->add_option("--out", c.out_dir, "Output directory");
  sub->add_option("--fragility", c.fragility, "Failure curve: sigmoid or step");
  sub->add_option("--mu", c.mu, "Sigmoid midpoint intensity");
  sub->add_option("--sigma", c.sigma, "Sigmoid width");
  sub->add_option("--threshold", c.threshold, "Step curve threshold intensity");
  sub->add_option("--runs", c.runs, "Monte Carlo runs per event and strategy");
  sub->add_option("--seed", c.seed, "Top-level RNG seed");
  sub->add_option("--spare-fraction", c.spare_fraction, "Spare capacity fraction per edge");
  sub->add_option("--recovery-prob", c.recovery_prob, "Per-day repair probability per edge");
  sub->add_option("--max-paths", c.max_paths, "Alternative paths tried per interrupted od");
  sub->add_option("--detour-factor", c.detour_factor,
                  "Admissible length multiple of the od's normal path");
  sub->add_option("--min-trips", c.min_trips, "Ods below this daily demand are not rerouted");
  sub->add_option("--min-length-km", c.min_length_km,
                  "Ods below this path length are not rerouted");
  sub->add_option("--horizon-days", c.horizon_days,
                  "Abort a run that has not recovered by this day");
  sub->add_option("--strategies", st.strategies,
                  "Comma-separated subset of climate,random,targeted");
  sub->add_option("--k", c.k, "Clusters per year group");
  sub->add_option("--group-years", c.group_years, "Years pooled into one clustering group");
  sub->add_option("--use-clusters", st.use_clusters,
                  "auto, true, or false; assess only day-type representatives");
  sub->add_option("--summer-start", st.summer_start, "Season window start, MM-DD");
  sub->add_option("--summer-end", st.summer_end, "Season window end, MM-DD");
  sub->add_option("--projection-samples", c.projection_samples,
                  "Field samples per edge; 1 uses the midpoint");
  sub->add_option("--min-psi", c.min_psi,
                  "Skip events whose expected failure count is below this");
  sub->add_option("--bin-width", c.bin_width, "Convolution bin width; 0 picks max-sample / 200");
  sub->add_option("--sg-window", c.sg_window, "Smoothing window length, odd");
  sub->add_option("--sg-poly", c.sg_poly, "Smoothing polynomial order");
  sub->add_flag("--dump-scenarios", c.dump_scenarios, "Write per-event failure sets as JSONL");
  sub->add_flag("--dump-paths", c.dump_paths, "Write every rerouted path as CSV");
}

void finalize(CliState& st, bool clusters_default) {
  RunConfig& c = st.cfg;
  c.strategies = split_csv_list(st.strategies);
  parse_month_day(st.summer_start, c.summer_start_month, c.summer_start_day, "summer-start");
  parse_month_day(st.summer_end, c.summer_end_month, c.summer_end_day, "summer-end");
  if (st.use_clusters == "auto")
    c.use_clusters = clusters_default;
  else if (st.use_clusters == "true")
    c.use_clusters = true;
  else if (st.use_clusters == "false")
    c.use_clusters = false;
  else
    gridshock::fail(ErrorCode::InvalidConfig,
                    "use-clusters: expected auto, true, or false, got '" + st.use_clusters + "'");
}

// The config file must be applied before CLI11 writes flag values, so the
// flag is located by a scan of argv instead of by the parser.
std::string find_config_arg(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) return argv[i + 1];
    if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gridshock: loss-of-service assessment for flow networks under weather-driven failures"};
  app.require_subcommand(1);
  CliState st;
  std::string config_path;

  CLI::App* assess = app.add_subcommand(
      "assess", "Simulate disruption and recovery per weather event and strategy");
  CLI::App* trend = app.add_subcommand(
      "trend", "Annual loss-of-service distributions from clustered day types");
  CLI::App* compare =
      app.add_subcommand("compare", "Day-zero service loss per removal strategy, no recovery");
  CLI::App* cluster = app.add_subcommand("cluster", "Cluster summer days, write assignments only");
  for (CLI::App* sub : {assess, trend, compare, cluster}) add_options(sub, st, config_path);

  try {
    std::string pre = find_config_arg(argc, argv);
    if (!pre.empty()) apply_config_file(pre, st);
  } catch (const gridshock::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(assess)) {
      finalize(st, false);
      return gridshock::cmd_assess(st.cfg);
    }
    if (app.got_subcommand(trend)) {
      finalize(st, true);
      return gridshock::cmd_trend(st.cfg);
    }
    if (app.got_subcommand(compare)) {
      finalize(st, false);
      return gridshock::cmd_compare(st.cfg);
    }
    finalize(st, true);
    return gridshock::cmd_cluster(st.cfg);
  } catch (const gridshock::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
