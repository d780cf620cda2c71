#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bpm/eval/experiment.hpp"

namespace bpm::eval {

// Accuracy is deliberately absent: it is reported but never ranked.
enum class RankMetric : std::uint8_t { Precision, Recall, RocAuc };

std::string_view to_string(RankMetric m);
// Throws ConfigError for anything outside the whitelist.
RankMetric parse_rank_metric(std::string_view name);
std::optional<double> metric_value(const MetricsReport& r, RankMetric m);

struct RankScope {
  std::optional<data::Regime> regime;  // empty = entire period
  static RankScope entire() { return {}; }
  static RankScope of(data::Regime r) { return {r}; }
};

struct RankRow {
  std::size_t rank = 0;  // 1-based
  std::string label;     // "RF", "RF-R"
  models::ModelKind kind = models::ModelKind::LR;
  Variant variant = Variant::Original;
  std::optional<double> mean;  // over in-scope cells where the metric is defined
  std::size_t cells = 0;       // number of values averaged
};

// Mean per (model, variant) over the scope, descending, ties by label;
// models with no defined value come last. Empty when no report is in scope.
std::vector<RankRow> rank(const std::vector<MetricsReport>& reports, RankMetric metric, const RankScope& scope);

struct VariantComparison {
  std::string metric;  // precision, recall, fpr, accuracy, roc_auc
  std::optional<double> original;
  std::optional<double> resampled;
  std::optional<double> difference() const {
    if (!original || !resampled) return std::nullopt;
    return *resampled - *original;
  }
};

// Grand mean per variant over all (model, vintage) cells with a defined
// value. Throws DataError unless both variants are present.
std::vector<VariantComparison> compare_variants(const std::vector<MetricsReport>& reports);

struct TimingRow {
  models::ModelKind kind = models::ModelKind::LR;
  std::optional<double> original_seconds;   // mean over vintages
  std::optional<double> resampled_seconds;  // mean over vintages
  std::size_t vintages = 0;
};

// One row per model kind present, in canonical kind order.
std::vector<TimingRow> timing_table(const std::vector<MetricsReport>& reports);

}  // namespace bpm::eval
