#include "bpm/eval/ranking.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "bpm/common/error.hpp"

namespace bpm::eval {

std::string_view to_string(RankMetric m) {
  switch (m) {
    case RankMetric::Precision: return "precision";
    case RankMetric::Recall: return "recall";
    case RankMetric::RocAuc: return "roc_auc";
  }
  return "?";
}

RankMetric parse_rank_metric(std::string_view name) {
  for (auto m : {RankMetric::Precision, RankMetric::Recall, RankMetric::RocAuc}) {
    if (to_string(m) == name) return m;
  }
  throw ConfigError("'" + std::string(name) + "' is not a ranking metric (precision, recall, roc_auc)");
}

std::optional<double> metric_value(const MetricsReport& r, RankMetric m) {
  if (r.failed()) return std::nullopt;
  switch (m) {
    case RankMetric::Precision: return r.precision;
    case RankMetric::Recall: return r.recall;
    case RankMetric::RocAuc: return r.roc_auc;
  }
  return std::nullopt;
}

std::vector<RankRow> rank(const std::vector<MetricsReport>& reports, RankMetric metric, const RankScope& scope) {
  struct Acc {
    double sum = 0.0;
    std::size_t n = 0;
  };
  std::map<std::pair<models::ModelKind, Variant>, Acc> acc;
  for (const auto& r : reports) {
    if (scope.regime && r.regime != *scope.regime) continue;
    auto& a = acc[{r.kind, r.variant}];
    if (const auto v = metric_value(r, metric)) {
      a.sum += *v;
      ++a.n;
    }
  }
  std::vector<RankRow> rows;
  for (const auto& [key, a] : acc) {
    RankRow row;
    row.kind = key.first;
    row.variant = key.second;
    row.label = model_label(key.first, key.second);
    row.cells = a.n;
    if (a.n > 0) row.mean = a.sum / static_cast<double>(a.n);
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const RankRow& a, const RankRow& b) {
    if (a.mean.has_value() != b.mean.has_value()) return a.mean.has_value();
    if (a.mean && *a.mean != *b.mean) return *a.mean > *b.mean;
    return a.label < b.label;
  });
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rank = i + 1;
  return rows;
}

std::vector<VariantComparison> compare_variants(const std::vector<MetricsReport>& reports) {
  bool seen[2] = {false, false};
  for (const auto& r : reports) seen[static_cast<int>(r.variant)] = true;
  if (!seen[0] || !seen[1]) throw DataError("variant comparison needs Original and Resampled reports");

  using Getter = std::optional<double> (*)(const MetricsReport&);
  const std::pair<const char*, Getter> metrics[] = {
      {"precision", [](const MetricsReport& r) { return r.precision; }},
      {"recall", [](const MetricsReport& r) { return r.recall; }},
      {"fpr", [](const MetricsReport& r) { return r.fpr; }},
      {"accuracy", [](const MetricsReport& r) { return r.accuracy; }},
      {"roc_auc", [](const MetricsReport& r) { return r.roc_auc; }},
  };
  std::vector<VariantComparison> out;
  for (const auto& [name, get] : metrics) {
    double sum[2] = {0.0, 0.0};
    std::size_t n[2] = {0, 0};
    for (const auto& r : reports) {
      if (r.failed()) continue;
      if (const auto v = get(r)) {
        sum[static_cast<int>(r.variant)] += *v;
        ++n[static_cast<int>(r.variant)];
      }
    }
    VariantComparison c{name, std::nullopt, std::nullopt};
    if (n[0] > 0) c.original = sum[0] / static_cast<double>(n[0]);
    if (n[1] > 0) c.resampled = sum[1] / static_cast<double>(n[1]);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<TimingRow> timing_table(const std::vector<MetricsReport>& reports) {
  std::vector<TimingRow> out;
  for (const auto kind : models::kAllKinds) {
    double sum[2] = {0.0, 0.0};
    std::size_t n[2] = {0, 0};
    std::set<int> years;
    bool present = false;
    for (const auto& r : reports) {
      if (r.kind != kind) continue;
      present = true;
      if (r.failed()) continue;
      sum[static_cast<int>(r.variant)] += r.fit_seconds;
      ++n[static_cast<int>(r.variant)];
      years.insert(r.vintage_year);
    }
    if (!present) continue;
    TimingRow row;
    row.kind = kind;
    if (n[0] > 0) row.original_seconds = sum[0] / static_cast<double>(n[0]);
    if (n[1] > 0) row.resampled_seconds = sum[1] / static_cast<double>(n[1]);
    row.vintages = years.size();
    out.push_back(row);
  }
  return out;
}

}  // namespace bpm::eval
