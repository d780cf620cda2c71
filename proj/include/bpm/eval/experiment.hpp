#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpm/data/dataset.hpp"
#include "bpm/data/vintage.hpp"
#include "bpm/eval/metrics.hpp"
#include "bpm/models/grid_search.hpp"
#include "bpm/models/model.hpp"
#include "bpm/resampling/smote.hpp"

namespace bpm::eval {

enum class Variant : std::uint8_t { Original, Resampled };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);
// "RF" or "RF-R"
std::string model_label(models::ModelKind kind, Variant v);

struct SplitPlan {
  double holdout_fraction = 0.30;
  bool stratified = true;
  std::uint64_t seed = 0;
};

struct Split {
  data::Dataset train;
  data::Dataset holdout;  // flagged, so the resampler refuses it
};

// Customer-level split: all rows of a customer land on one side. Throws
// DataError when a class cannot appear on both sides.
Split split(const data::Dataset& d, const SplitPlan& plan);

struct MetricsReport {
  models::ModelKind kind = models::ModelKind::LR;
  Variant variant = Variant::Original;
  int vintage_year = 0;
  data::Regime regime = data::Regime::Medium;

  ConfusionMatrix cm;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> fpr;
  std::optional<double> accuracy;
  std::optional<double> roc_auc;
  bool auc_applicable = true;  // false for decision-only models

  double fit_seconds = 0.0;
  bool converged = true;
  std::size_t train_rows = 0;
  std::size_t holdout_rows = 0;
  std::string holdout_checksum;
  std::string error;  // non-empty when the cell failed

  bool failed() const { return !error.empty(); }
};

struct ExperimentOptions {
  SplitPlan split;  // seed is combined with each vintage year
  std::size_t jobs = 1;
  // Kinds listed here are tuned on each cell's training data before the
  // final fit; only the final fit is timed.
  std::map<models::ModelKind, models::ParamGrid> grids;
  std::size_t grid_folds = 3;
  // Called after each finished cell; may be invoked from worker threads but
  // never concurrently.
  std::function<void(const MetricsReport&)> on_cell;
  // Called once per fitted model when set (e.g. to persist it); may run
  // concurrently for different cells.
  std::function<void(const MetricsReport&, const models::TrainedModel&)> on_model;
};

// For every vintage x spec: split once, fit on the training part and on its
// SMOTE-resampled copy, evaluate both on the same holdout. Reports are
// ordered by vintage, then spec, then Original before Resampled. Fit failures
// are recorded in the cell and do not stop the run.
std::vector<MetricsReport> run_experiment(const std::vector<data::Dataset>& datasets,
                                          const std::vector<models::ClassifierSpec>& specs,
                                          const resampling::ResampleConfig& resample,
                                          const ExperimentOptions& options = {});

// Seed of a model fit for one vintage; identical for both variants.
std::uint64_t model_seed(const models::ClassifierSpec& spec, int vintage_year);

}  // namespace bpm::eval
