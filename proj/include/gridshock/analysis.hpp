#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "gridshock/hazard.hpp"
#include "gridshock/simulate.hpp"

namespace gridshock {

// One row per day: the projected hazard intensity on every edge, columns in
// sorted edge-id order.
struct DayFeatureMatrix {
  std::vector<std::string> dates;      // ISO, ascending
  std::vector<std::string> asset_ids;  // sorted edge ids
  Eigen::MatrixXd features;            // dates.size() x asset_ids.size()
};

DayFeatureMatrix build_day_features(const std::vector<WeatherEvent>& events,
                                    const AssetNetwork& net,
                                    const ProjectionOptions& options = {});

struct Clustering {
  int k = 0;
  std::vector<int> assignments;      // day -> cluster
  std::vector<int> sizes;            // per cluster
  std::vector<int> representatives;  // day index of the member nearest the centroid
  Eigen::MatrixXd centroids;         // k x d
  double inertia = 0;                // sum of squared distances to assigned centroids
};

// k-means++ seeding plus Lloyd iterations until the assignment is a fixpoint.
// All ties (seeding, assignment, representatives) resolve to the lowest
// index, so the result is a pure function of (features, k, seed).
Clustering kmeans_days(const DayFeatureMatrix& days, int k, std::uint64_t seed,
                       int max_iterations = 100);

// Probability mass on the regular value grid {0, w, 2w, ...}.
struct BinnedPmf {
  double bin_width = 1;
  std::vector<double> mass;

  double value_at(std::size_t i) const { return static_cast<double>(i) * bin_width; }
  double mean() const;
  // Smallest grid value whose cumulative mass reaches q.
  double quantile(double q) const;
};

// Round-to-nearest binning of non-negative samples, equal mass per sample.
BinnedPmf bin_samples(const std::vector<double>& samples, double bin_width);

// Direct summed-mass product; BinMismatch unless the widths agree.
BinnedPmf convolve(const BinnedPmf& a, const BinnedPmf& b);

struct AnnualLos {
  int year = 0;
  BinnedPmf distribution;
  double mean = 0;
  double q05 = 0;
  double q95 = 0;
};

// Annual distribution from per-day-type distributions with multiplicities:
// each distribution enters the convolution count times. Day types whose
// samples are all exactly zero contribute nothing and are skipped. A
// bin_width of 0 selects max-sample / 200.
AnnualLos convolve_annual(const std::vector<std::pair<int, LosDistribution>>& day_distributions,
                          double bin_width = 0, int year = 0);

struct MwuResult {
  double u = 0;  // U statistic of the first sample, midranks for ties
  double p = 0;  // two-sided
};

// Exact enumeration when the pooled sample is small (n <= 16) and tie-free,
// normal approximation with tie correction and continuity correction
// otherwise.
MwuResult mann_whitney_u(const std::vector<double>& a, const std::vector<double>& b);

// The two branches, exposed so they can be compared against each other.
double mwu_exact_two_sided_p(int n_a, int n_b, double u_min);
double mwu_normal_two_sided_p(int n_a, int n_b, double u_a, double tie_term);

// Least-squares polynomial smoothing; the first and last half-windows are
// fitted with the nearest full window and evaluated at their own offsets.
std::vector<double> savitzky_golay(const std::vector<double>& series, int window,
                                   int poly_order);

}  // namespace gridshock
