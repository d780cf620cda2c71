#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpm/common/random.hpp"
#include "bpm/data/dataset.hpp"

namespace bpm::models {

// Feature matrix quantised to at most 256 ordered bins per column. A column
// with no more distinct values than bins gets one bin per value, so split
// thresholds are exact midpoints; otherwise bins hold roughly equal counts.
// Bin b of column j covers values <= thresholds[j][b].
class BinnedMatrix {
 public:
  BinnedMatrix(const data::Dataset& d, std::size_t max_bins = 256);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return thresholds_.size(); }
  std::size_t bin_count(std::size_t j) const { return thresholds_[j].size() + 1; }
  std::uint8_t bin(std::size_t i, std::size_t j) const { return bins_[j * rows_ + i]; }
  const std::uint8_t* column_bins(std::size_t j) const { return bins_.data() + j * rows_; }
  double threshold(std::size_t j, std::size_t b) const { return thresholds_[j][b]; }

 private:
  std::size_t rows_ = 0;
  std::vector<std::uint8_t> bins_;  // column-major
  std::vector<std::vector<double>> thresholds_;
};

struct TreeNode {
  std::int32_t feature = -1;  // -1 for leaves
  double threshold = 0.0;     // go left iff x[feature] <= threshold
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;  // leaf output: class-1 weight share or mean target
};

enum class SplitCriterion : std::uint8_t { Entropy, SquaredError };
enum class ThresholdMode : std::uint8_t { Best, Random };

struct TreeParams {
  SplitCriterion criterion = SplitCriterion::Entropy;
  ThresholdMode mode = ThresholdMode::Best;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t min_samples_leaf = 1;
  std::size_t max_features = 0;  // candidates per split; 0 = all allowed features
};

// Training inputs shared by a whole ensemble.
struct TreeTrainingSet {
  const data::Dataset* data = nullptr;  // raw values (Random mode)
  const BinnedMatrix* bins = nullptr;   // histogram splits (Best mode)
  std::span<const double> targets;      // label or residual per row
  std::span<const double> weights;      // per-row weight; 0 excludes the row
  std::span<const std::size_t> allowed_features;  // empty = all
};

// Binary decision / regression tree with axis-aligned numeric thresholds.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  static DecisionTree grow(const TreeTrainingSet& set, const TreeParams& params, Rng& rng,
                           std::vector<double>* importance = nullptr);

  double predict(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::size_t depth() const;
  std::size_t leaf_count() const;

  nlohmann::json to_json() const;
  static DecisionTree from_json(const nlohmann::json& j);

 private:
  std::vector<TreeNode> nodes_;
};

}  // namespace bpm::models
