#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bpm/data/dataset.hpp"
#include "bpm/models/model.hpp"

namespace bpm::features {

struct FeatureScore {
  std::string feature;
  double value = 0.0;
};
// One entry per dataset column, in column order.
using FeatureScores = std::vector<FeatureScore>;

inline constexpr double kCorrelationThreshold = 0.1;
inline constexpr double kImportanceThreshold = 1e-6;

// |Pearson r| of every column against the label; constant columns get 0.
FeatureScores correlation_filter(const data::Dataset& d);

// Normalised impurity-decrease importances of a random forest trained on `d`.
// `forest_params` overrides the RF defaults.
FeatureScores rf_importance(const data::Dataset& d, const models::HyperParams& forest_params = {},
                            std::uint64_t seed = 0);

using Mask = std::vector<std::uint8_t>;

struct GaParams {
  std::size_t population = 30;
  std::size_t generations = 30;
  double crossover = 0.8;
  double mutation = 0.02;
  double elitism = 0.005;  // share of the population carried over, at least 1
  std::size_t stall_generations = 5;
  // Fitness: recall on a 25% validation part of a subsample of at most
  // `fitness_rows` rows. Minority rows are kept up to half that budget and
  // majority rows fill the rest.
  std::size_t fitness_rows = 5000;
  std::size_t fitness_trees = 10;
  std::size_t fitness_max_depth = 8;
  std::uint64_t seed = 0;
  // Optional starting masks; random masks fill the rest.
  std::vector<Mask> initial_population;
};

struct GaResult {
  Mask best_mask;
  std::vector<std::size_t> selected;  // column indices of best_mask
  std::vector<std::string> names;
  double best_fitness = 0.0;
  std::size_t generations_run = 0;
  std::size_t evaluations = 0;  // distinct masks evaluated
  bool stalled = false;
  std::vector<double> best_fitness_history;  // per generation
};

// Memoised mask -> validation recall.
class GaFitness {
 public:
  GaFitness(const data::Dataset& d, const GaParams& params);
  double operator()(const Mask& mask);
  std::size_t evaluations() const { return cache_.size(); }

 private:
  data::Dataset train_;
  data::Dataset valid_;
  models::ClassifierSpec spec_;
  std::map<Mask, double> cache_;
};

GaResult ga_select(const data::Dataset& d, const GaParams& params);

struct FeatureVerdict {
  std::string feature;
  double rf_importance = 0.0;
  bool ga_survived = false;
  double corr_with_target = 0.0;
  bool discarded = false;
};

struct DiscardThresholds {
  double correlation = kCorrelationThreshold;  // discard needs |r| below this
  double importance = kImportanceThreshold;    // and importance below this
};

// Discards a feature only when all three signals call it unimportant. Output
// follows the order of `corr`. Throws DataError when the feature lists differ.
std::vector<FeatureVerdict> crosscheck_discard(const FeatureScores& corr, const FeatureScores& importance,
                                               const std::vector<std::string>& ga_survivors,
                                               const DiscardThresholds& thresholds = {});

// feature,rf_importance,ga_survived,corr_with_target,discarded
std::string verdicts_to_csv(const std::vector<FeatureVerdict>& verdicts);

}  // namespace bpm::features
