#pragma once

// Rough k-means: every cluster is a rough set with a lower approximation
// (objects that surely belong) and an upper approximation (objects that
// possibly belong).
//
//  * An object whose distance to some other centre exceeds its distance to
//    the nearest centre by less than epsilon is ambiguous: it joins the upper
//    approximation of the nearest centre and of every such rival, and no
//    lower approximation.
//  * Otherwise it joins the lower (and so also the upper) approximation of
//    the nearest centre.
//  * Centres move to w_lower * mean(lower) + w_upper * mean(upper \ lower);
//    when one of the two sets is empty the other's mean is used.
//  * Iteration stops once no centre moves more than `tolerance`.
//
// With epsilon = 0 no object is ambiguous and the procedure is Lloyd's
// k-means.

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpm/data/dataset.hpp"

namespace bpm::models {

struct RoughKMeansParams {
  std::size_t k = 8;
  double epsilon = 0.0;  // absolute distance-gap threshold
  double w_lower = 0.7;
  double w_upper = 0.3;
  std::size_t max_iterations = 100;
  double tolerance = 1e-6;
};

struct RoughClusterModel {
  std::size_t k = 0;
  std::size_t dims = 0;
  std::vector<double> centers;  // k x dims, row-major
  double epsilon = 0.0;
  double w_lower = 0.7;
  double w_upper = 0.3;
  // Training memberships: lower cluster per object (-1 if none) and the
  // clusters whose upper approximation holds it.
  std::vector<int> lower_of;
  std::vector<std::vector<int>> upper_of;
  std::vector<std::uint8_t> labels;  // majority label per cluster
  std::size_t iterations = 0;
  bool converged = false;

  std::span<const double> center(std::size_t c) const { return {centers.data() + c * dims, dims}; }

  nlohmann::json to_json() const;  // centres, labels and weights only
  static RoughClusterModel from_json(const nlohmann::json& j);
};

// k-means++ seeding (squared-distance sampling).
std::vector<double> kmeans_plus_plus(const data::Dataset& points, std::size_t k, std::uint64_t seed);

// Mean over objects of (second-nearest - nearest) centre distance.
double mean_nearest_gap(const data::Dataset& points, std::span<const double> centers, std::size_t k);

// Throws DataError when k exceeds the number of distinct points, ConfigError
// for invalid weights or k < 2.
RoughClusterModel rough_kmeans_fit(const data::Dataset& points, const RoughKMeansParams& params,
                                   std::uint64_t seed);
RoughClusterModel rough_kmeans_fit(const data::Dataset& points, const RoughKMeansParams& params,
                                   std::vector<double> initial_centers);

// Label of the nearest centre (ties to the lower cluster index).
std::uint8_t rough_predict(const RoughClusterModel& model, std::span<const double> x);
std::size_t nearest_center(const RoughClusterModel& model, std::span<const double> x);

}  // namespace bpm::models
