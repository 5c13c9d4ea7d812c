#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gridshock/date.hpp"
#include "gridshock/network.hpp"

namespace gridshock {

// Regular lat/lon grid of one weather field. Row 0 is the southernmost row;
// (lat0, lon0) is the centre of cell (0, 0) and values are stored row-major
// south to north, west to east.
struct WeatherGrid {
  double lat0 = 0;
  double lon0 = 0;
  double dlat = 0;
  double dlon = 0;
  int nrows = 0;
  int ncols = 0;
  std::string units;
  Eigen::MatrixXd values;  // nrows x ncols

  // Grid footprint extended half a cell beyond the outer centres, edges
  // inclusive.
  bool contains(double lat, double lon) const;

  // Cell whose centre is nearest; exact ties resolve to the lower row-major
  // index. pre: contains(lat, lon).
  std::pair<int, int> nearest_cell(double lat, double lon) const;

  double at(int row, int col) const { return values(row, col); }
};

struct WeatherEvent {
  Date date;
  WeatherGrid grid;
};

WeatherEvent load_weather_event(const std::filesystem::path& json_file);
// All *.json files of a directory, sorted by date; duplicate dates rejected.
std::vector<WeatherEvent> load_weather_events(const std::filesystem::path& dir);

// Hazard intensity omega per asset, keyed by edge id.
struct LocalConditions {
  std::map<std::string, double> omega;
};

struct ProjectionOptions {
  // 1 samples the edge midpoint; k >= 2 samples k evenly spaced points from
  // endpoint to endpoint and takes the maximum field value.
  int samples_per_edge = 1;
};

LocalConditions project_event(const WeatherEvent& event, const AssetNetwork& net,
                              const ProjectionOptions& options = {});

// Failure probability as a function of local intensity.
struct FragilityFunction {
  enum class Kind { Step, GaussianSigmoid };
  Kind kind = Kind::GaussianSigmoid;
  double threshold = 0;  // Step
  double mu = 0;         // GaussianSigmoid
  double sigma = 1;      // GaussianSigmoid, > 0

  static FragilityFunction step_at(double threshold);
  static FragilityFunction gaussian_sigmoid(double mu, double sigma);
};

double evaluate_fragility(const FragilityFunction& fragility, double omega);

struct FailureProbabilities {
  std::map<std::string, double> p;  // edge id -> probability in [0,1]
};

FailureProbabilities failure_probabilities(const LocalConditions& conditions,
                                           const FragilityFunction& fragility);

// Psi, the expected number of failed edges: the sum of the probabilities.
double expected_failed_edges(const FailureProbabilities& probs);

}  // namespace gridshock
