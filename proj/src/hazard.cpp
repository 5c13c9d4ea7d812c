#include "gridshock/hazard.hpp"

#include <algorithm>
#include <cmath>

#include "gridshock/csv.hpp"
#include "gridshock/error.hpp"
#include "json.hpp"

namespace gridshock {

namespace {

// Index of the nearest grid line along one axis: x in cell units, exact
// half-way ties go to the lower index.
int nearest_index(double x, int n) {
  int i = static_cast<int>(std::ceil(x - 0.5));
  return std::clamp(i, 0, n - 1);
}

}  // namespace

bool WeatherGrid::contains(double lat, double lon) const {
  double rlo = lat0 - 0.5 * dlat;
  double rhi = lat0 + (nrows - 0.5) * dlat;
  double clo = lon0 - 0.5 * dlon;
  double chi = lon0 + (ncols - 0.5) * dlon;
  return lat >= rlo && lat <= rhi && lon >= clo && lon <= chi;
}

std::pair<int, int> WeatherGrid::nearest_cell(double lat, double lon) const {
  return {nearest_index((lat - lat0) / dlat, nrows), nearest_index((lon - lon0) / dlon, ncols)};
}

WeatherEvent load_weather_event(const std::filesystem::path& json_file) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(json_file));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, json_file.string() + ": " + e.what());
  }

  auto require = [&](const char* key) -> const nlohmann::json& {
    if (!doc.contains(key))
      fail(ErrorCode::ParseError, json_file.string() + ": missing field '" + key + "'");
    return doc.at(key);
  };
  auto number = [&](const char* key) {
    const auto& v = require(key);
    if (!v.is_number())
      fail(ErrorCode::ParseError, json_file.string() + ": field '" + key + "' is not a number");
    return v.get<double>();
  };

  WeatherEvent event;
  const auto& date = require("date");
  if (!date.is_string())
    fail(ErrorCode::ParseError, json_file.string() + ": field 'date' is not a string");
  event.date = parse_date(date.get<std::string>());

  WeatherGrid& g = event.grid;
  g.lat0 = number("lat0");
  g.lon0 = number("lon0");
  g.dlat = number("dlat");
  g.dlon = number("dlon");
  g.nrows = static_cast<int>(number("nrows"));
  g.ncols = static_cast<int>(number("ncols"));
  const auto& units = require("units");
  if (!units.is_string())
    fail(ErrorCode::ParseError, json_file.string() + ": field 'units' is not a string");
  g.units = units.get<std::string>();

  if (g.nrows < 1 || g.ncols < 1)
    fail(ErrorCode::InvalidGrid, json_file.string() + ": grid must have at least one cell");
  if (!(g.dlat > 0.0) || !(g.dlon > 0.0))
    fail(ErrorCode::InvalidGrid, json_file.string() + ": cell spacing must be positive");

  const auto& values = require("values");
  if (!values.is_array())
    fail(ErrorCode::ParseError, json_file.string() + ": field 'values' is not an array");
  if (static_cast<long long>(values.size()) !=
      static_cast<long long>(g.nrows) * static_cast<long long>(g.ncols))
    fail(ErrorCode::InvalidGrid, json_file.string() + ": expected " +
                                     std::to_string(g.nrows * g.ncols) + " values, found " +
                                     std::to_string(values.size()));
  g.values.resize(g.nrows, g.ncols);
  for (int r = 0; r < g.nrows; ++r)
    for (int c = 0; c < g.ncols; ++c) {
      const auto& v = values.at(static_cast<std::size_t>(r) * g.ncols + c);
      if (!v.is_number())
        fail(ErrorCode::ParseError, json_file.string() + ": non-numeric grid value");
      g.values(r, c) = v.get<double>();
      if (!std::isfinite(g.values(r, c)))
        fail(ErrorCode::InvalidGrid, json_file.string() + ": non-finite grid value");
    }
  return event;
}

std::vector<WeatherEvent> load_weather_events(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    fail(ErrorCode::ParseError, "'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<WeatherEvent> events;
  events.reserve(files.size());
  for (const auto& f : files) events.push_back(load_weather_event(f));
  std::sort(events.begin(), events.end(),
            [](const WeatherEvent& a, const WeatherEvent& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < events.size(); ++i)
    if (events[i].date == events[i - 1].date)
      fail(ErrorCode::DuplicateId, dir.string() + ": duplicate weather date " +
                                       format_date(events[i].date));
  return events;
}

LocalConditions project_event(const WeatherEvent& event, const AssetNetwork& net,
                              const ProjectionOptions& options) {
  if (options.samples_per_edge < 1)
    fail(ErrorCode::InvalidConfig, "samples_per_edge must be >= 1");
  LocalConditions out;
  const WeatherGrid& g = event.grid;
  for (const AssetEdge& e : net.edges()) {
    const AssetNode& a = net.node(e.u);
    const AssetNode& b = net.node(e.v);
    double omega = -std::numeric_limits<double>::infinity();
    int k = options.samples_per_edge;
    for (int i = 0; i < k; ++i) {
      double t = (k == 1) ? 0.5 : static_cast<double>(i) / (k - 1);
      double lat = a.lat + t * (b.lat - a.lat);
      double lon = a.lon + t * (b.lon - a.lon);
      if (!g.contains(lat, lon))
        fail(ErrorCode::OutOfDomain, "edge '" + e.id + "' sample (" + fmt_double(lat) + ", " +
                                         fmt_double(lon) + ") lies outside the " +
                                         format_date(event.date) + " weather grid");
      auto [r, c] = g.nearest_cell(lat, lon);
      omega = std::max(omega, g.at(r, c));
    }
    out.omega[e.id] = omega;
  }
  return out;
}

FragilityFunction FragilityFunction::step_at(double threshold) {
  FragilityFunction f;
  f.kind = Kind::Step;
  f.threshold = threshold;
  return f;
}

FragilityFunction FragilityFunction::gaussian_sigmoid(double mu, double sigma) {
  if (!(sigma > 0.0)) fail(ErrorCode::InvalidConfig, "fragility sigma must be positive");
  FragilityFunction f;
  f.kind = Kind::GaussianSigmoid;
  f.mu = mu;
  f.sigma = sigma;
  return f;
}

double evaluate_fragility(const FragilityFunction& fragility, double omega) {
  switch (fragility.kind) {
    case FragilityFunction::Kind::Step:
      return omega >= fragility.threshold ? 1.0 : 0.0;
    case FragilityFunction::Kind::GaussianSigmoid: {
      // Normal CDF: 0.5 * erfc(-z / sqrt(2)); erfc keeps precision in the tails.
      double z = (omega - fragility.mu) / fragility.sigma;
      return 0.5 * std::erfc(-z / std::sqrt(2.0));
    }
  }
  fail(ErrorCode::InvalidConfig, "unknown fragility kind");
}

FailureProbabilities failure_probabilities(const LocalConditions& conditions,
                                           const FragilityFunction& fragility) {
  FailureProbabilities out;
  for (const auto& [id, omega] : conditions.omega)
    out.p[id] = evaluate_fragility(fragility, omega);
  return out;
}

double expected_failed_edges(const FailureProbabilities& probs) {
  double psi = 0;
  for (const auto& [id, p] : probs.p) {
    (void)id;
    psi += p;
  }
  return psi;
}

}  // namespace gridshock
