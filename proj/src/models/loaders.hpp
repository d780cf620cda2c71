#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "bpm/models/classifiers.hpp"

namespace bpm::models::detail {

std::unique_ptr<TrainedModel> load_tree(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_forest(ModelKind kind, const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_adaboost(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_gradient_boosting(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_logistic(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_linear_svm(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_naive_bayes(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_qda(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_mlp(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_rough_set(const nlohmann::json& state);
std::unique_ptr<TrainedModel> load_ga_forest(const nlohmann::json& state);

// Shared checks used by the trainers.
void require_both_classes(const data::Dataset& train, ModelKind kind);
std::size_t as_count(const ClassifierSpec& spec, const std::string& key, std::size_t min_value = 0);

}  // namespace bpm::models::detail
