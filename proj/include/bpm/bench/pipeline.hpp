#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "bpm/bench/config.hpp"
#include "bpm/data/dataset.hpp"
#include "bpm/data/export.hpp"
#include "bpm/eval/experiment.hpp"
#include "bpm/features/selection.hpp"

namespace bpm::bench {

// CLI exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitPartialFailure = 3;

struct PreparedVintage {
  int year = 0;
  data::Dataset dataset;  // encoded, after feature selection
  std::vector<std::string> all_features;
  std::vector<features::FeatureVerdict> verdicts;  // empty when selection is off
  std::vector<data::DiagnosticEntry> diagnostics;
};

// parse -> clean -> join/label -> sample -> encode -> feature selection.
// Errors are re-thrown with a "[stage year]" prefix.
PreparedVintage prepare_vintage(const ExperimentConfig& config, int year);

// Throws DataError naming the first missing input file.
void check_inputs(const ExperimentConfig& config);

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<eval::MetricsReport> reports;
  std::vector<std::string> files;  // relative to the output directory
  bool incomplete = false;
};

// Executes the whole experiment and writes every artifact plus
// manifest.json into config.output_dir. Config and data errors propagate as
// exceptions; failed experiment cells give kExitPartialFailure.
RunOutcome run(const ExperimentConfig& config, std::ostream* log = nullptr);

// Rankings, variant comparison and timing tables from a set of reports.
// Returns the written file names (relative to out_dir).
std::vector<std::string> write_report_files(const std::vector<eval::MetricsReport>& reports,
                                            const std::string& out_dir);

// Per-vintage and per-regime customer, row and class-ratio statistics of the
// configured vintages (parsed, cleaned and joined; not sampled).
std::string inspect(const ExperimentConfig& config);

}  // namespace bpm::bench
