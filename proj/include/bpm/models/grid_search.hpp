#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bpm/data/dataset.hpp"
#include "bpm/models/model.hpp"

namespace bpm::models {

// Cartesian grid; the first axis varies slowest.
struct ParamGrid {
  std::vector<std::pair<std::string, std::vector<double>>> axes;

  std::size_t size() const;
  std::vector<HyperParams> points() const;
};

struct GridEvaluation {
  HyperParams params;
  double mean_recall = 0.0;  // over folds whose validation part has positives
};

struct GridResult {
  HyperParams best;
  double best_recall = 0.0;
  std::vector<GridEvaluation> evaluations;  // grid order
};

// Exhaustive search by mean validation recall over customer-stratified folds.
// Ties go to the earlier grid point. `base.params` supplies every key the grid
// does not vary. Throws ConfigError for an empty grid or folds < 2.
GridResult grid_search(const ClassifierSpec& base, const data::Dataset& train, const ParamGrid& grid,
                       std::size_t folds);

}  // namespace bpm::models
