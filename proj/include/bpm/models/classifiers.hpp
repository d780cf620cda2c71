#pragma once

// Concrete classifiers behind the TrainedModel contract. Most callers only
// need models::fit(); the types are public so tests can inspect fitted state.

#include <memory>
#include <span>
#include <vector>

#include "bpm/models/mlp.hpp"
#include "bpm/models/model.hpp"
#include "bpm/models/rough_kmeans.hpp"
#include "bpm/models/standardizer.hpp"
#include "bpm/models/tree.hpp"

namespace bpm::models {

// ---- trees and ensembles ---------------------------------------------------

class TreeModel final : public TrainedModel {
 public:
  TreeModel(DecisionTree tree, std::size_t features) : tree_(std::move(tree)), features_(features) {}
  ModelKind kind() const override { return ModelKind::DT; }
  std::size_t feature_count() const override { return features_; }
  double score(std::span<const double> x) const override { return tree_.predict(x); }
  nlohmann::json state() const override;
  const DecisionTree& tree() const { return tree_; }

 private:
  DecisionTree tree_;
  std::size_t features_;
};

// Random forest (bootstrap + best split among a random feature subset) or
// extra trees (no bootstrap, random thresholds). The score is the share of
// trees voting class 1.
class ForestModel final : public TrainedModel {
 public:
  ForestModel(ModelKind kind, std::vector<DecisionTree> trees, std::size_t features,
              std::vector<double> importances = {});
  ModelKind kind() const override { return kind_; }
  std::size_t feature_count() const override { return features_; }
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  // Mean impurity decrease share per feature; sums to 1 unless no split was
  // ever made.
  const std::vector<double>& feature_importances() const { return importances_; }

 private:
  ModelKind kind_;
  std::vector<DecisionTree> trees_;
  std::size_t features_;
  std::vector<double> importances_;
};

struct AdaBoostTrace {
  // Normalised sample weights right after each round's update.
  std::vector<std::vector<double>> weights_after_round;
};

// Discrete AdaBoost over shallow entropy trees.
class AdaBoostModel final : public TrainedModel {
 public:
  AdaBoostModel(std::vector<DecisionTree> learners, std::vector<double> alphas, std::size_t features);
  ModelKind kind() const override { return ModelKind::AB; }
  std::size_t feature_count() const override { return features_; }
  // sum_t alpha_t * (+1 | -1)
  double margin(std::span<const double> x) const;
  // logistic(2 * margin)
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;

  const std::vector<DecisionTree>& learners() const { return learners_; }
  const std::vector<double>& alphas() const { return alphas_; }

 private:
  std::vector<DecisionTree> learners_;
  std::vector<double> alphas_;
  std::size_t features_;
};

// Least-squares gradient boosting on the 0/1 label with regression trees.
class GradientBoostingModel final : public TrainedModel {
 public:
  GradientBoostingModel(double init, double learning_rate, std::vector<DecisionTree> trees,
                        std::size_t features, std::vector<double> training_loss = {});
  ModelKind kind() const override { return ModelKind::GB; }
  std::size_t feature_count() const override { return features_; }
  // Additive prediction after the first `rounds` trees (all when rounds
  // exceeds the count).
  double raw(std::span<const double> x, std::size_t rounds = static_cast<std::size_t>(-1)) const;
  // raw prediction clipped to [0, 1]
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;

  std::size_t rounds() const { return trees_.size(); }
  double init() const { return init_; }
  // Mean squared error on the training set: entry 0 before any tree, entry t
  // after t trees.
  const std::vector<double>& training_loss() const { return training_loss_; }

 private:
  double init_;
  double learning_rate_;
  std::vector<DecisionTree> trees_;
  std::size_t features_;
  std::vector<double> training_loss_;
};

// ---- linear models -----------------------------------------------------------

class LogisticModel final : public TrainedModel {
 public:
  LogisticModel(Standardizer scaler, std::vector<double> weights, double bias);
  ModelKind kind() const override { return ModelKind::LR; }
  std::size_t feature_count() const override { return weights_.size(); }
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  Standardizer scaler_;
  std::vector<double> weights_;
  double bias_;
};

class LinearSvmModel final : public TrainedModel {
 public:
  LinearSvmModel(Standardizer scaler, std::vector<double> weights, double bias);
  ModelKind kind() const override { return ModelKind::SVM; }
  std::size_t feature_count() const override { return weights_.size(); }
  // w . standardize(x) + b
  double decision(std::span<const double> x) const;
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;
  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }
  const Standardizer& scaler() const { return scaler_; }

 private:
  Standardizer scaler_;
  std::vector<double> weights_;
  double bias_;
};

// ---- generative models -------------------------------------------------------

// Gaussian likelihoods for numeric columns, add-one-smoothed frequencies for
// categorical codes.
class NaiveBayesModel final : public TrainedModel {
 public:
  struct ClassStats {
    double log_prior = 0.0;
    std::vector<double> mean;                    // numeric columns
    std::vector<double> variance;                // numeric columns
    std::vector<std::vector<double>> log_freq;  // categorical columns, per code
  };

  NaiveBayesModel(std::vector<data::Column> columns, ClassStats negative, ClassStats positive);
  ModelKind kind() const override { return ModelKind::NB; }
  std::size_t feature_count() const override { return columns_.size(); }
  double log_likelihood(std::span<const double> x, int cls) const;
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;

 private:
  std::vector<data::Column> columns_;
  ClassStats stats_[2];
};

// Quadratic discriminant analysis on standardised inputs with a ridge on each
// class covariance.
class QdaModel final : public TrainedModel {
 public:
  struct ClassStats {
    double log_prior = 0.0;
    std::vector<double> mean;
    std::vector<double> precision;  // inverse covariance, row-major d x d
    double log_det = 0.0;
  };

  QdaModel(Standardizer scaler, ClassStats negative, ClassStats positive);
  ModelKind kind() const override { return ModelKind::MDA; }
  std::size_t feature_count() const override { return scaler_.size(); }
  double discriminant(std::span<const double> x, int cls) const;
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;

 private:
  Standardizer scaler_;
  ClassStats stats_[2];
};

// ---- neural network -----------------------------------------------------------

class MlpModel final : public TrainedModel {
 public:
  MlpModel(Standardizer scaler, MlpShape shape, std::vector<double> params);
  ModelKind kind() const override { return ModelKind::ANN; }
  std::size_t feature_count() const override { return shape_.inputs; }
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;
  const MlpShape& shape() const { return shape_; }

 private:
  Standardizer scaler_;
  MlpShape shape_;
  std::vector<double> params_;
};

// ---- rough-set clustering -----------------------------------------------------

// Rough k-means used as a classifier: predicts the majority label of the
// nearest cluster. Produces decisions only.
class RoughSetModel final : public TrainedModel {
 public:
  RoughSetModel(Standardizer scaler, RoughClusterModel clusters);
  ModelKind kind() const override { return ModelKind::RS; }
  std::size_t feature_count() const override { return scaler_.size(); }
  bool can_score() const override { return false; }
  double score(std::span<const double> x) const override;  // throws CapabilityError
  std::uint8_t predict(std::span<const double> x) const override;
  nlohmann::json state() const override;
  const RoughClusterModel& clusters() const { return clusters_; }

 private:
  Standardizer scaler_;
  RoughClusterModel clusters_;
};

// ---- GA + RF hybrid ------------------------------------------------------------

// Random forest trained on the feature subset chosen by the genetic search.
class GaForestModel final : public TrainedModel {
 public:
  GaForestModel(std::vector<std::size_t> selected, std::size_t features, std::unique_ptr<ForestModel> forest);
  ModelKind kind() const override { return ModelKind::GA; }
  std::size_t feature_count() const override { return features_; }
  double score(std::span<const double> x) const override;
  nlohmann::json state() const override;
  const std::vector<std::size_t>& selected() const { return selected_; }

 private:
  std::vector<std::size_t> selected_;
  std::size_t features_;
  std::unique_ptr<ForestModel> forest_;
};

// ---- per-kind trainers ---------------------------------------------------------

std::unique_ptr<TreeModel> fit_tree(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<ForestModel> fit_forest(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<AdaBoostModel> fit_adaboost(const ClassifierSpec& spec, const data::Dataset& train,
                                            AdaBoostTrace* trace = nullptr);
std::unique_ptr<GradientBoostingModel> fit_gradient_boosting(const ClassifierSpec& spec,
                                                             const data::Dataset& train);
std::unique_ptr<LogisticModel> fit_logistic(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<LinearSvmModel> fit_linear_svm(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<NaiveBayesModel> fit_naive_bayes(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<QdaModel> fit_qda(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<MlpModel> fit_mlp(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<RoughSetModel> fit_rough_set(const ClassifierSpec& spec, const data::Dataset& train);
std::unique_ptr<GaForestModel> fit_ga_forest(const ClassifierSpec& spec, const data::Dataset& train);

double logistic(double z);

}  // namespace bpm::models
