#include "bpm/models/model.hpp"

#include <cmath>

#include "bpm/common/error.hpp"
#include "bpm/models/classifiers.hpp"
#include "loaders.hpp"

namespace bpm::models {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::LR: return "LR";
    case ModelKind::MDA: return "MDA";
    case ModelKind::NB: return "NB";
    case ModelKind::DT: return "DT";
    case ModelKind::RF: return "RF";
    case ModelKind::ET: return "ET";
    case ModelKind::AB: return "AB";
    case ModelKind::GB: return "GB";
    case ModelKind::SVM: return "SVM";
    case ModelKind::ANN: return "ANN";
    case ModelKind::RS: return "RS";
    case ModelKind::GA: return "GA";
  }
  return "?";
}

ModelKind parse_kind(std::string_view name) {
  for (auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

const HyperParams& default_hyper_params(ModelKind kind) {
  static const std::map<ModelKind, HyperParams> defaults{
      {ModelKind::LR, {{"l2", 1e-4}, {"max_iter", 100}, {"tol", 1e-8}}},
      {ModelKind::MDA, {{"reg", 1e-4}}},
      {ModelKind::NB, {{"var_smoothing", 1e-9}}},
      {ModelKind::DT, {{"max_depth", 0}, {"min_samples_leaf", 1}, {"max_bins", 256}}},
      {ModelKind::RF,
       {{"n_trees", 100}, {"max_depth", 0}, {"min_samples_leaf", 1}, {"max_features", 0}, {"bootstrap", 1},
        {"max_bins", 256}}},
      {ModelKind::ET, {{"n_trees", 100}, {"max_depth", 0}, {"min_samples_leaf", 1}, {"max_features", 0}}},
      {ModelKind::AB, {{"n_rounds", 50}, {"max_depth", 1}, {"max_bins", 256}}},
      {ModelKind::GB,
       {{"n_rounds", 100}, {"learning_rate", 0.1}, {"max_depth", 3}, {"min_samples_leaf", 1}, {"max_bins", 256}}},
      {ModelKind::SVM, {{"c", 1.0}, {"max_epochs", 100}, {"tol", 1e-3}}},
      {ModelKind::ANN,
       {{"hidden_layers", 2},
        {"units", 16},
        {"learning_rate", 0.01},
        {"epochs", 20},
        {"batch_size", 64},
        {"l2", 1e-5}}},
      {ModelKind::RS,
       {{"k", 8},
        {"epsilon", -1},
        {"epsilon_fraction", 0.1},
        {"w_lower", 0.7},
        {"w_upper", 0.3},
        {"max_iter", 100},
        {"tol", 1e-6}}},
      {ModelKind::GA,
       {{"population", 30},
        {"generations", 30},
        {"crossover", 0.8},
        {"mutation", 0.02},
        {"elitism", 0.005},
        {"stall_generations", 5},
        {"fitness_rows", 5000},
        {"fitness_trees", 10},
        {"fitness_max_depth", 8},
        {"n_trees", 100},
        {"max_depth", 0},
        {"min_samples_leaf", 1},
        {"max_features", 0},
        {"max_bins", 256}}},
  };
  return defaults.at(kind);
}

double ClassifierSpec::param(const std::string& key) const {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw ConfigError("hyper-parameter '" + key + "' not defined for " + std::string(to_string(kind)));
  }
  return it->second;
}

std::size_t ClassifierSpec::count_param(const std::string& key) const {
  return detail::as_count(*this, key);
}

ClassifierSpec make_spec(ModelKind kind, const HyperParams& overrides, std::uint64_t seed) {
  ClassifierSpec spec{kind, default_hyper_params(kind), seed};
  for (const auto& [key, value] : overrides) {
    const auto it = spec.params.find(key);
    if (it == spec.params.end()) {
      throw ConfigError("unknown hyper-parameter '" + key + "' for model " + std::string(to_string(kind)));
    }
    if (!std::isfinite(value)) throw ConfigError("hyper-parameter '" + key + "' must be finite");
    it->second = value;
  }
  return spec;
}

std::vector<double> TrainedModel::score_all(const data::Dataset& d) const {
  std::vector<double> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) out[i] = score(d.row(i));
  return out;
}

std::vector<std::uint8_t> TrainedModel::predict_all(const data::Dataset& d) const {
  std::vector<std::uint8_t> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) out[i] = predict(d.row(i));
  return out;
}

namespace detail {

void require_both_classes(const data::Dataset& train, ModelKind kind) {
  const auto ones = train.count_label(1);
  if (ones == 0 || ones == train.rows()) {
    throw DataError(std::string(to_string(kind)) + " needs both classes in the training data");
  }
}

std::size_t as_count(const ClassifierSpec& spec, const std::string& key, std::size_t min_value) {
  const double v = spec.param(key);
  if (v < static_cast<double>(min_value) || v != std::floor(v)) {
    throw ConfigError("hyper-parameter '" + key + "' of " + std::string(to_string(spec.kind)) +
                      " must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace detail

std::unique_ptr<TrainedModel> fit(const ClassifierSpec& spec, const data::Dataset& train) {
  if (train.rows() == 0) throw DataError("cannot fit on an empty dataset");
  if (spec.kind != ModelKind::RS) detail::require_both_classes(train, spec.kind);
  switch (spec.kind) {
    case ModelKind::LR: return fit_logistic(spec, train);
    case ModelKind::MDA: return fit_qda(spec, train);
    case ModelKind::NB: return fit_naive_bayes(spec, train);
    case ModelKind::DT: return fit_tree(spec, train);
    case ModelKind::RF:
    case ModelKind::ET: return fit_forest(spec, train);
    case ModelKind::AB: return fit_adaboost(spec, train);
    case ModelKind::GB: return fit_gradient_boosting(spec, train);
    case ModelKind::SVM: return fit_linear_svm(spec, train);
    case ModelKind::ANN: return fit_mlp(spec, train);
    case ModelKind::RS: return fit_rough_set(spec, train);
    case ModelKind::GA: return fit_ga_forest(spec, train);
  }
  throw ConfigError("unhandled model kind");
}

nlohmann::json save_model(const TrainedModel& model) {
  return {{"format", "bpm-model"},
          {"version", kModelFormatVersion},
          {"kind", std::string(to_string(model.kind()))},
          {"features", model.feature_count()},
          {"converged", model.converged()},
          {"state", model.state()}};
}

std::unique_ptr<TrainedModel> load_model(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", "") != "bpm-model") {
    throw DataError("not a bpm-model document");
  }
  const int version = doc.at("version").get<int>();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format version " + std::to_string(version));
  }
  const ModelKind kind = parse_kind(doc.at("kind").get<std::string>());
  const auto& state = doc.at("state");
  std::unique_ptr<TrainedModel> m;
  switch (kind) {
    case ModelKind::LR: m = detail::load_logistic(state); break;
    case ModelKind::MDA: m = detail::load_qda(state); break;
    case ModelKind::NB: m = detail::load_naive_bayes(state); break;
    case ModelKind::DT: m = detail::load_tree(state); break;
    case ModelKind::RF:
    case ModelKind::ET: m = detail::load_forest(kind, state); break;
    case ModelKind::AB: m = detail::load_adaboost(state); break;
    case ModelKind::GB: m = detail::load_gradient_boosting(state); break;
    case ModelKind::SVM: m = detail::load_linear_svm(state); break;
    case ModelKind::ANN: m = detail::load_mlp(state); break;
    case ModelKind::RS: m = detail::load_rough_set(state); break;
    case ModelKind::GA: m = detail::load_ga_forest(state); break;
  }
  if (m->feature_count() != doc.at("features").get<std::size_t>()) {
    throw DataError("model document feature count does not match its state");
  }
  m->set_converged(doc.value("converged", true));
  return m;
}

}  // namespace bpm::models
