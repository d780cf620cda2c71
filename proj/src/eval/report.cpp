#include "bpm/eval/report.hpp"

#include <map>
#include <sstream>

#include "bpm/common/error.hpp"
#include "bpm/common/text.hpp"

namespace bpm::eval {

namespace {

constexpr const char* kUndefined = "undefined";
constexpr const char* kNotApplicable = "n/a";

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : kUndefined; }

std::string fixed(const std::optional<double>& v, int digits = 4) { return v ? format_fixed(*v, digits) : ""; }

std::optional<double> read_cell(const std::string& s) {
  if (s == kUndefined || s == kNotApplicable || s.empty()) return std::nullopt;
  const auto v = parse_double(s);
  if (!v) throw DataError("metrics CSV: bad number '" + s + "'");
  return v;
}

std::size_t read_count(const std::string& s) {
  const auto v = parse_int(s);
  if (!v || *v < 0) throw DataError("metrics CSV: bad count '" + s + "'");
  return static_cast<std::size_t>(*v);
}

std::string one_line(std::string s) {
  for (auto& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

const char* kMetricsHeader =
    "vintage_year,regime,model,variant,label,train_rows,holdout_rows,tp,fp,fn,tn,precision,recall,fpr,accuracy,"
    "roc_auc,converged,holdout_checksum,error";

std::vector<std::vector<std::string>> records(const std::string& text, std::string_view header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || trim(line) != header) throw DataError("unexpected CSV header");
  std::vector<std::vector<std::string>> out;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_csv_record(line));
  }
  return out;
}

}  // namespace

std::string metrics_csv(const std::vector<MetricsReport>& reports) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const auto& r : reports) {
    out += std::to_string(r.vintage_year) + "," + std::string(data::to_string(r.regime)) + "," +
           std::string(models::to_string(r.kind)) + "," + std::string(to_string(r.variant)) + "," +
           model_label(r.kind, r.variant) + "," + std::to_string(r.train_rows) + "," +
           std::to_string(r.holdout_rows) + "," + std::to_string(r.cm.tp) + "," + std::to_string(r.cm.fp) + "," +
           std::to_string(r.cm.fn) + "," + std::to_string(r.cm.tn) + "," + cell(r.precision) + "," +
           cell(r.recall) + "," + cell(r.fpr) + "," + cell(r.accuracy) + "," +
           (r.auc_applicable ? cell(r.roc_auc) : kNotApplicable) + "," + (r.converged ? "1" : "0") + "," +
           r.holdout_checksum + "," + csv_escape(one_line(r.error)) + "\n";
  }
  return out;
}

std::vector<MetricsReport> parse_metrics_csv(const std::string& text) {
  std::vector<MetricsReport> out;
  for (const auto& f : records(text, kMetricsHeader)) {
    if (f.size() != 19) throw DataError("metrics CSV: expected 19 fields, found " + std::to_string(f.size()));
    MetricsReport r;
    const auto year = parse_int(f[0]);
    if (!year) throw DataError("metrics CSV: bad vintage year '" + f[0] + "'");
    r.vintage_year = static_cast<int>(*year);
    r.regime = data::parse_regime(f[1]);
    r.kind = models::parse_kind(f[2]);
    r.variant = parse_variant(f[3]);
    r.train_rows = read_count(f[5]);
    r.holdout_rows = read_count(f[6]);
    r.cm = {read_count(f[7]), read_count(f[8]), read_count(f[9]), read_count(f[10])};
    r.precision = read_cell(f[11]);
    r.recall = read_cell(f[12]);
    r.fpr = read_cell(f[13]);
    r.accuracy = read_cell(f[14]);
    r.auc_applicable = f[15] != kNotApplicable;
    r.roc_auc = read_cell(f[15]);
    r.converged = f[16] == "1";
    r.holdout_checksum = f[17];
    r.error = f[18];
    out.push_back(std::move(r));
  }
  return out;
}

std::string timing_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "vintage_year,model,variant,fit_seconds\n";
  for (const auto& r : reports) {
    out += std::to_string(r.vintage_year) + "," + std::string(models::to_string(r.kind)) + "," +
           std::string(to_string(r.variant)) + "," + format_double(r.fit_seconds) + "\n";
  }
  return out;
}

void apply_timing_csv(std::vector<MetricsReport>& reports, const std::string& text) {
  std::map<std::tuple<int, models::ModelKind, Variant>, double> seconds;
  for (const auto& f : records(text, "vintage_year,model,variant,fit_seconds")) {
    if (f.size() != 4) throw DataError("timing CSV: expected 4 fields");
    const auto year = parse_int(f[0]);
    const auto s = parse_double(f[3]);
    if (!year || !s) throw DataError("timing CSV: bad row");
    seconds[{static_cast<int>(*year), models::parse_kind(f[1]), parse_variant(f[2])}] = *s;
  }
  for (auto& r : reports) {
    const auto it = seconds.find({r.vintage_year, r.kind, r.variant});
    if (it != seconds.end()) r.fit_seconds = it->second;
  }
}

namespace {

struct ScopeInfo {
  RankScope scope;
  std::string title;
  std::string key;
};

std::vector<ScopeInfo> scopes() {
  return {{RankScope::entire(), "Entire period", "entire"},
          {RankScope::of(data::Regime::Medium), "Medium default rate vintages (1999-2004)", "medium"},
          {RankScope::of(data::Regime::High), "High default rate vintages (2005-2010)", "high"},
          {RankScope::of(data::Regime::Low), "Low default rate vintages (2011-2017)", "low"}};
}

constexpr RankMetric kRankMetrics[] = {RankMetric::Precision, RankMetric::Recall, RankMetric::RocAuc};

}  // namespace

std::string rankings_markdown(const std::vector<MetricsReport>& reports) {
  std::string out = "# Model rankings\n";
  for (const auto& s : scopes()) {
    out += "\n## " + s.title + "\n\n";
    std::vector<std::vector<RankRow>> tables;
    for (const auto m : kRankMetrics) tables.push_back(rank(reports, m, s.scope));
    if (tables[0].empty()) {
      out += "No vintages in this regime; table omitted.\n";
      continue;
    }
    out += "| Rank | Rank by Precision | Rank by Recall | Rank by ROC-AUC |\n";
    out += "|---:|---|---|---|\n";
    for (std::size_t i = 0; i < tables[0].size(); ++i) {
      out += "| " + std::to_string(i + 1) + " |";
      for (const auto& t : tables) {
        const auto& row = t[i];
        // Models without a defined value leave the cell blank.
        out += row.mean ? " " + row.label + " (" + fixed(row.mean) + ") |" : " |";
      }
      out += "\n";
    }
  }
  return out;
}

std::string rankings_csv(const std::vector<MetricsReport>& reports) {
  std::string out = "scope,metric,rank,model,mean,cells\n";
  for (const auto& s : scopes()) {
    for (const auto m : kRankMetrics) {
      for (const auto& row : rank(reports, m, s.scope)) {
        out += s.key + "," + std::string(to_string(m)) + "," + std::to_string(row.rank) + "," + row.label + "," +
               cell(row.mean) + "," + std::to_string(row.cells) + "\n";
      }
    }
  }
  return out;
}

std::string comparison_markdown(const std::vector<VariantComparison>& rows) {
  std::string out = "# Original vs resampled training\n\n";
  out += "Grand mean over all (model, vintage) cells.\n\n";
  out += "| Metric | Original | Resampled | Difference |\n|---|---:|---:|---:|\n";
  for (const auto& r : rows) {
    out += "| " + r.metric + " | " + fixed(r.original) + " | " + fixed(r.resampled) + " | " + fixed(r.difference()) +
           " |\n";
  }
  return out;
}

std::string comparison_csv(const std::vector<VariantComparison>& rows) {
  std::string out = "metric,original,resampled,difference\n";
  for (const auto& r : rows) {
    out += r.metric + "," + cell(r.original) + "," + cell(r.resampled) + "," + cell(r.difference()) + "\n";
  }
  return out;
}

std::string timing_markdown(const std::vector<TimingRow>& rows) {
  std::string out = "# Training time\n\nMean fit wall-clock seconds over vintages.\n\n";
  out += "| Model | Original (s) | Resampled (s) | Vintages |\n|---|---:|---:|---:|\n";
  for (const auto& r : rows) {
    out += "| " + std::string(models::to_string(r.kind)) + " | " + fixed(r.original_seconds, 3) + " | " +
           fixed(r.resampled_seconds, 3) + " | " + std::to_string(r.vintages) + " |\n";
  }
  return out;
}

}  // namespace bpm::eval
