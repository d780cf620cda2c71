#include "bpm/common/error.hpp"
#include "bpm/features/selection.hpp"
#include "bpm/models/classifiers.hpp"
#include "loaders.hpp"

namespace bpm::models {

GaForestModel::GaForestModel(std::vector<std::size_t> selected, std::size_t features,
                             std::unique_ptr<ForestModel> forest)
    : selected_(std::move(selected)), features_(features), forest_(std::move(forest)) {
  if (!forest_ || forest_->feature_count() != selected_.size()) {
    throw DataError("GA forest does not match its feature subset");
  }
  for (const auto j : selected_) {
    if (j >= features_) throw DataError("GA feature index out of range");
  }
}

double GaForestModel::score(std::span<const double> x) const {
  std::vector<double> sub(selected_.size());
  for (std::size_t k = 0; k < selected_.size(); ++k) sub[k] = x[selected_[k]];
  return forest_->score(sub);
}

nlohmann::json GaForestModel::state() const {
  return {{"features", features_}, {"selected", selected_}, {"forest", forest_->state()}};
}

std::unique_ptr<GaForestModel> fit_ga_forest(const ClassifierSpec& spec, const data::Dataset& train) {
  features::GaParams ga;
  ga.population = detail::as_count(spec, "population", 2);
  ga.generations = detail::as_count(spec, "generations", 1);
  ga.crossover = spec.param("crossover");
  ga.mutation = spec.param("mutation");
  ga.elitism = spec.param("elitism");
  ga.stall_generations = detail::as_count(spec, "stall_generations", 1);
  ga.fitness_rows = detail::as_count(spec, "fitness_rows", 4);
  ga.fitness_trees = detail::as_count(spec, "fitness_trees", 1);
  ga.fitness_max_depth = detail::as_count(spec, "fitness_max_depth");
  ga.seed = derive_seed(spec.seed, "ga");
  const auto selection = features::ga_select(train, ga);

  ClassifierSpec rf = make_spec(ModelKind::RF,
                                {{"n_trees", spec.param("n_trees")},
                                 {"max_depth", spec.param("max_depth")},
                                 {"min_samples_leaf", spec.param("min_samples_leaf")},
                                 {"max_features", spec.param("max_features")},
                                 {"max_bins", spec.param("max_bins")}},
                                derive_seed(spec.seed, "ga/forest"));
  auto forest = fit_forest(rf, train.select_columns(selection.selected));
  return std::make_unique<GaForestModel>(selection.selected, train.cols(), std::move(forest));
}

namespace detail {

std::unique_ptr<TrainedModel> load_ga_forest(const nlohmann::json& s) {
  auto forest = load_forest(ModelKind::RF, s.at("forest"));
  std::unique_ptr<ForestModel> typed(static_cast<ForestModel*>(forest.release()));
  return std::make_unique<GaForestModel>(s.at("selected").get<std::vector<std::size_t>>(),
                                         s.at("features").get<std::size_t>(), std::move(typed));
}

}  // namespace detail

}  // namespace bpm::models
