#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpm/data/dataset.hpp"

namespace bpm::models {

enum class ModelKind : std::uint8_t { LR, MDA, NB, DT, RF, ET, AB, GB, SVM, ANN, RS, GA };

inline constexpr std::array<ModelKind, 12> kAllKinds{ModelKind::LR, ModelKind::MDA, ModelKind::NB,
                                                     ModelKind::DT, ModelKind::RF,  ModelKind::ET,
                                                     ModelKind::AB, ModelKind::GB,  ModelKind::SVM,
                                                     ModelKind::ANN, ModelKind::RS, ModelKind::GA};

std::string_view to_string(ModelKind kind);
// Throws ConfigError for unknown names.
ModelKind parse_kind(std::string_view name);

using HyperParams = std::map<std::string, double>;

// Defaults for every key a kind accepts.
const HyperParams& default_hyper_params(ModelKind kind);

struct ClassifierSpec {
  ModelKind kind = ModelKind::LR;
  HyperParams params;  // complete: defaults merged with overrides
  std::uint64_t seed = 0;

  double param(const std::string& key) const;
  std::size_t count_param(const std::string& key) const;
};

// Merges `overrides` into the kind's defaults; unknown keys throw ConfigError.
ClassifierSpec make_spec(ModelKind kind, const HyperParams& overrides = {}, std::uint64_t seed = 0);

// Fitted classifier. Immutable after fit, so concurrent scoring is safe.
class TrainedModel {
 public:
  virtual ~TrainedModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t feature_count() const = 0;

  // False only for the rough-set model, which has no confidence output.
  virtual bool can_score() const { return true; }
  // Class-1 score in [0, 1]. Throws CapabilityError when !can_score().
  virtual double score(std::span<const double> x) const = 0;
  // Default decision rule: 1 iff score >= 0.5.
  virtual std::uint8_t predict(std::span<const double> x) const { return score(x) >= 0.5 ? 1 : 0; }

  // False when an iterative fit stopped at its iteration cap. Set by the
  // trainer or loader, never afterwards.
  bool converged() const { return converged_; }
  void set_converged(bool c) { converged_ = c; }

  std::vector<double> score_all(const data::Dataset& d) const;
  std::vector<std::uint8_t> predict_all(const data::Dataset& d) const;

  // Kind-specific fitted state; see save_model().
  virtual nlohmann::json state() const = 0;

 private:
  bool converged_ = true;
};

// Trains one classifier. Throws DataError for single-class training data
// (every kind except RS).
std::unique_ptr<TrainedModel> fit(const ClassifierSpec& spec, const data::Dataset& train);

// Versioned JSON document:
//   {"format": "bpm-model", "version": 1, "kind": "<KIND>", "converged": bool, "state": {...}}
nlohmann::json save_model(const TrainedModel& model);
std::unique_ptr<TrainedModel> load_model(const nlohmann::json& doc);

inline constexpr int kModelFormatVersion = 1;

}  // namespace bpm::models
