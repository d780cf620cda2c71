#pragma once

#include <string>
#include <vector>

#include "bpm/eval/experiment.hpp"
#include "bpm/eval/ranking.hpp"

namespace bpm::eval {

// Long-form CSV, one row per report. Undefined rates are written as
// "undefined", the AUC of decision-only models as "n/a". Fit times are not
// included (see timing_csv) so the file is reproducible byte for byte.
std::string metrics_csv(const std::vector<MetricsReport>& reports);
std::vector<MetricsReport> parse_metrics_csv(const std::string& text);

// vintage_year,model,variant,fit_seconds
std::string timing_csv(const std::vector<MetricsReport>& reports);
// Fills fit_seconds of matching reports.
void apply_timing_csv(std::vector<MetricsReport>& reports, const std::string& text);

// Three-column ranking tables (precision, recall, ROC-AUC) for the entire
// period and each regime. A regime without vintages gets a note instead of a
// table.
std::string rankings_markdown(const std::vector<MetricsReport>& reports);
// scope,metric,rank,model,mean,cells
std::string rankings_csv(const std::vector<MetricsReport>& reports);

std::string comparison_markdown(const std::vector<VariantComparison>& rows);
std::string comparison_csv(const std::vector<VariantComparison>& rows);

// Model, mean fit seconds per variant.
std::string timing_markdown(const std::vector<TimingRow>& rows);

}  // namespace bpm::eval
