#pragma once

// Experiment configuration: one `key = value` pair per line, `#` starts a
// comment, blank lines are ignored. Keys are dotted; list values are
// comma-separated; booleans accept true/false/yes/no/1/0. See
// docs/config.md for the full key list.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bpm/features/selection.hpp"
#include "bpm/models/grid_search.hpp"
#include "bpm/models/model.hpp"
#include "bpm/resampling/smote.hpp"

namespace bpm::bench {

struct FeatureSelectionConfig {
  bool enabled = true;
  double correlation_threshold = features::kCorrelationThreshold;
  double importance_threshold = features::kImportanceThreshold;
  models::HyperParams forest;  // overrides for the importance forest
  features::GaParams ga;       // seed is derived per vintage
};

struct ExperimentConfig {
  std::string data_dir = "data";
  std::vector<int> vintages;
  std::size_t customer_sample = 2000;
  double holdout_fraction = 0.30;
  bool stratified_split = true;
  bool lenient_parse = false;
  std::uint64_t seed = 42;
  std::string output_dir = "bpm-out";
  std::size_t jobs = 1;

  resampling::ResampleConfig resample;  // seed is derived per vintage
  std::vector<models::ModelKind> models;  // default: all twelve
  std::map<models::ModelKind, models::HyperParams> model_params;
  std::map<models::ModelKind, models::ParamGrid> grids;
  std::size_t grid_folds = 3;
  std::vector<std::string> features;  // empty = default feature set

  FeatureSelectionConfig feature_selection;
  bool snapshot = false;     // write the encoded datasets as CSV
  bool save_models = false;  // write every fitted model as JSON
};

ExperimentConfig default_config();

// Throws ConfigError naming the source and line.
ExperimentConfig parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

// Applies one `key=value` override (same grammar as a config line).
void apply_setting(ExperimentConfig& config, const std::string& assignment);

// Every key with its effective value, sorted by key, one `key = value` per
// line. Parsing the result reproduces the configuration.
std::string canonical_text(const ExperimentConfig& config);

// Model specs with the root seed split per kind.
std::vector<models::ClassifierSpec> model_specs(const ExperimentConfig& config);

// Paths of a vintage's input files under `data_dir`.
std::string origination_path(const std::string& data_dir, int year);
std::string performance_path(const std::string& data_dir, int year);

}  // namespace bpm::bench
