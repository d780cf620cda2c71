#include <algorithm>
#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/models/classifiers.hpp"
#include "loaders.hpp"

namespace bpm::models {

namespace {

std::vector<double> labels_as_targets(const data::Dataset& d) {
  return {d.labels().begin(), d.labels().end()};
}

std::size_t max_bins_of(const ClassifierSpec& spec) {
  const auto it = spec.params.find("max_bins");
  if (it == spec.params.end()) return 256;
  const auto v = detail::as_count(spec, "max_bins", 2);
  if (v > 256) throw ConfigError("max_bins must be <= 256");
  return v;
}

std::vector<double> normalized(std::vector<double> v) {
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  if (total > 0.0) {
    for (auto& x : v) x /= total;
  }
  return v;
}

nlohmann::json trees_to_json(const std::vector<DecisionTree>& trees) {
  auto arr = nlohmann::json::array();
  for (const auto& t : trees) arr.push_back(t.to_json());
  return arr;
}

std::vector<DecisionTree> trees_from_json(const nlohmann::json& arr) {
  std::vector<DecisionTree> out;
  for (const auto& t : arr) out.push_back(DecisionTree::from_json(t));
  return out;
}

}  // namespace

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// ---- single tree -----------------------------------------------------------

nlohmann::json TreeModel::state() const { return {{"features", features_}, {"tree", tree_.to_json()}}; }

std::unique_ptr<TreeModel> fit_tree(const ClassifierSpec& spec, const data::Dataset& train) {
  TreeParams params;
  params.max_depth = detail::as_count(spec, "max_depth");
  params.min_samples_leaf = detail::as_count(spec, "min_samples_leaf", 1);
  const BinnedMatrix bins(train, max_bins_of(spec));
  const auto targets = labels_as_targets(train);
  const std::vector<double> weights(train.rows(), 1.0);
  Rng rng(derive_seed(spec.seed, "DT"));
  TreeTrainingSet set{&train, &bins, targets, weights, {}};
  return std::make_unique<TreeModel>(DecisionTree::grow(set, params, rng), train.cols());
}

// ---- forests ----------------------------------------------------------------

ForestModel::ForestModel(ModelKind kind, std::vector<DecisionTree> trees, std::size_t features,
                         std::vector<double> importances)
    : kind_(kind), trees_(std::move(trees)), features_(features), importances_(std::move(importances)) {
  if (trees_.empty()) throw ConfigError("a forest needs at least one tree");
  if (importances_.empty()) importances_.assign(features_, 0.0);
}

double ForestModel::score(std::span<const double> x) const {
  std::size_t votes = 0;
  for (const auto& t : trees_) votes += t.predict(x) >= 0.5 ? 1 : 0;
  return static_cast<double>(votes) / static_cast<double>(trees_.size());
}

nlohmann::json ForestModel::state() const {
  return {{"features", features_}, {"importances", importances_}, {"trees", trees_to_json(trees_)}};
}

std::unique_ptr<ForestModel> fit_forest(const ClassifierSpec& spec, const data::Dataset& train) {
  const bool extra = spec.kind == ModelKind::ET;
  const std::size_t n_trees = detail::as_count(spec, "n_trees", 1);
  TreeParams params;
  params.mode = extra ? ThresholdMode::Random : ThresholdMode::Best;
  params.max_depth = detail::as_count(spec, "max_depth");
  params.min_samples_leaf = detail::as_count(spec, "min_samples_leaf", 1);
  params.max_features = detail::as_count(spec, "max_features");
  if (params.max_features == 0) {
    params.max_features = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(train.cols()))));
  }
  const bool bootstrap = !extra && spec.param("bootstrap") != 0.0;

  std::unique_ptr<BinnedMatrix> bins;
  if (!extra) bins = std::make_unique<BinnedMatrix>(train, max_bins_of(spec));
  const auto targets = labels_as_targets(train);
  std::vector<double> weights(train.rows(), 1.0);

  std::vector<DecisionTree> trees;
  trees.reserve(n_trees);
  std::vector<double> importance_sum(train.cols(), 0.0);
  std::vector<double> tree_importance;
  for (std::size_t t = 0; t < n_trees; ++t) {
    Rng rng(derive_seed(spec.seed, "tree/" + std::to_string(t)));
    if (bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (std::size_t i = 0; i < train.rows(); ++i) weights[rng.below(train.rows())] += 1.0;
    }
    TreeTrainingSet set{&train, bins.get(), targets, weights, {}};
    trees.push_back(DecisionTree::grow(set, params, rng, &tree_importance));
    const auto share = normalized(tree_importance);
    for (std::size_t j = 0; j < share.size(); ++j) importance_sum[j] += share[j];
  }
  return std::make_unique<ForestModel>(spec.kind, std::move(trees), train.cols(), normalized(importance_sum));
}

// ---- AdaBoost ----------------------------------------------------------------

AdaBoostModel::AdaBoostModel(std::vector<DecisionTree> learners, std::vector<double> alphas, std::size_t features)
    : learners_(std::move(learners)), alphas_(std::move(alphas)), features_(features) {
  if (learners_.size() != alphas_.size() || learners_.empty()) {
    throw ConfigError("AdaBoost needs one weight per learner and at least one learner");
  }
}

double AdaBoostModel::margin(std::span<const double> x) const {
  double f = 0.0;
  for (std::size_t t = 0; t < learners_.size(); ++t) {
    f += alphas_[t] * (learners_[t].predict(x) >= 0.5 ? 1.0 : -1.0);
  }
  return f;
}

double AdaBoostModel::score(std::span<const double> x) const { return logistic(2.0 * margin(x)); }

nlohmann::json AdaBoostModel::state() const {
  return {{"features", features_}, {"alphas", alphas_}, {"learners", trees_to_json(learners_)}};
}

std::unique_ptr<AdaBoostModel> fit_adaboost(const ClassifierSpec& spec, const data::Dataset& train,
                                            AdaBoostTrace* trace) {
  const std::size_t rounds = detail::as_count(spec, "n_rounds", 1);
  TreeParams params;
  params.max_depth = detail::as_count(spec, "max_depth", 1);
  const BinnedMatrix bins(train, max_bins_of(spec));
  const auto targets = labels_as_targets(train);
  const std::size_t n = train.rows();
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<DecisionTree> learners;
  std::vector<double> alphas;
  std::vector<std::uint8_t> wrong(n);
  // Cap for a learner with zero weighted error.
  constexpr double kMaxAlpha = 10.0;

  for (std::size_t t = 0; t < rounds; ++t) {
    Rng rng(derive_seed(spec.seed, "round/" + std::to_string(t)));
    TreeTrainingSet set{&train, &bins, targets, w, {}};
    DecisionTree h = DecisionTree::grow(set, params, rng);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint8_t p = h.predict(train.row(i)) >= 0.5 ? 1 : 0;
      wrong[i] = p != train.label(i);
      if (wrong[i]) err += w[i];
    }
    if (err <= 0.0) {
      learners.push_back(std::move(h));
      alphas.push_back(kMaxAlpha);
      break;
    }
    if (err >= 0.5) {
      // No better than chance on the current weights.
      if (learners.empty()) {
        learners.push_back(std::move(h));
        alphas.push_back(0.0);
      }
      break;
    }
    const double alpha = 0.5 * std::log((1.0 - err) / err);
    const double up = std::exp(alpha);
    const double down = std::exp(-alpha);
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= wrong[i] ? up : down;
      z += w[i];
    }
    for (auto& wi : w) wi /= z;
    learners.push_back(std::move(h));
    alphas.push_back(alpha);
    if (trace != nullptr) trace->weights_after_round.push_back(w);
  }
  return std::make_unique<AdaBoostModel>(std::move(learners), std::move(alphas), train.cols());
}

// ---- gradient boosting -------------------------------------------------------

GradientBoostingModel::GradientBoostingModel(double init, double learning_rate, std::vector<DecisionTree> trees,
                                             std::size_t features, std::vector<double> training_loss)
    : init_(init),
      learning_rate_(learning_rate),
      trees_(std::move(trees)),
      features_(features),
      training_loss_(std::move(training_loss)) {}

double GradientBoostingModel::raw(std::span<const double> x, std::size_t rounds) const {
  double f = init_;
  const std::size_t r = std::min(rounds, trees_.size());
  for (std::size_t t = 0; t < r; ++t) f += learning_rate_ * trees_[t].predict(x);
  return f;
}

double GradientBoostingModel::score(std::span<const double> x) const { return std::clamp(raw(x), 0.0, 1.0); }

nlohmann::json GradientBoostingModel::state() const {
  return {{"features", features_},
          {"init", init_},
          {"learning_rate", learning_rate_},
          {"trees", trees_to_json(trees_)}};
}

std::unique_ptr<GradientBoostingModel> fit_gradient_boosting(const ClassifierSpec& spec,
                                                             const data::Dataset& train) {
  const std::size_t rounds = detail::as_count(spec, "n_rounds", 1);
  const double lr = spec.param("learning_rate");
  if (!(lr > 0.0)) throw ConfigError("GB learning_rate must be > 0");
  TreeParams params;
  params.criterion = SplitCriterion::SquaredError;
  params.max_depth = detail::as_count(spec, "max_depth", 1);
  params.min_samples_leaf = detail::as_count(spec, "min_samples_leaf", 1);
  const BinnedMatrix bins(train, max_bins_of(spec));
  const std::size_t n = train.rows();

  const double init = static_cast<double>(train.count_label(1)) / static_cast<double>(n);
  std::vector<double> f(n, init);
  std::vector<double> residual(n);
  const std::vector<double> weights(n, 1.0);
  auto mse = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double e = train.label(i) - f[i];
      s += e * e;
    }
    return s / static_cast<double>(n);
  };
  std::vector<double> loss{mse()};
  std::vector<DecisionTree> trees;
  for (std::size_t t = 0; t < rounds; ++t) {
    for (std::size_t i = 0; i < n; ++i) residual[i] = train.label(i) - f[i];
    Rng rng(derive_seed(spec.seed, "round/" + std::to_string(t)));
    TreeTrainingSet set{&train, &bins, residual, weights, {}};
    DecisionTree tree = DecisionTree::grow(set, params, rng);
    for (std::size_t i = 0; i < n; ++i) f[i] += lr * tree.predict(train.row(i));
    trees.push_back(std::move(tree));
    loss.push_back(mse());
  }
  return std::make_unique<GradientBoostingModel>(init, lr, std::move(trees), train.cols(), std::move(loss));
}

// ---- loaders -------------------------------------------------------------------

namespace detail {

std::unique_ptr<TrainedModel> load_tree(const nlohmann::json& s) {
  return std::make_unique<TreeModel>(DecisionTree::from_json(s.at("tree")), s.at("features").get<std::size_t>());
}

std::unique_ptr<TrainedModel> load_forest(ModelKind kind, const nlohmann::json& s) {
  return std::make_unique<ForestModel>(kind, trees_from_json(s.at("trees")), s.at("features").get<std::size_t>(),
                                       s.at("importances").get<std::vector<double>>());
}

std::unique_ptr<TrainedModel> load_adaboost(const nlohmann::json& s) {
  return std::make_unique<AdaBoostModel>(trees_from_json(s.at("learners")),
                                         s.at("alphas").get<std::vector<double>>(),
                                         s.at("features").get<std::size_t>());
}

std::unique_ptr<TrainedModel> load_gradient_boosting(const nlohmann::json& s) {
  return std::make_unique<GradientBoostingModel>(s.at("init").get<double>(), s.at("learning_rate").get<double>(),
                                                 trees_from_json(s.at("trees")),
                                                 s.at("features").get<std::size_t>());
}

}  // namespace detail

}  // namespace bpm::models
