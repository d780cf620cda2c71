#include "bpm/bench/pipeline.hpp"

#include <filesystem>
#include <map>

#include <fmt/format.h>

#include "bpm/bench/manifest.hpp"
#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"
#include "bpm/data/encode.hpp"
#include "bpm/data/vintage.hpp"
#include "bpm/eval/ranking.hpp"
#include "bpm/eval/report.hpp"
#include "bpm/models/model.hpp"

namespace bpm::bench {

namespace {

// Runs `body`, re-throwing errors with a stage tag and the original type.
template <typename F>
auto staged(const std::string& stage, int year, F&& body) -> decltype(body()) {
  const std::string tag = "[" + stage + " " + std::to_string(year) + "] ";
  try {
    return body();
  } catch (const ParseError& e) {
    throw ParseError(e.source(), e.line(), tag + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(tag + e.what());
  } catch (const DataError& e) {
    throw DataError(tag + e.what());
  } catch (const Error& e) {
    throw Error(tag + e.what());
  }
}

struct Joined {
  data::LabeledVintage vintage;
  std::vector<data::DiagnosticEntry> diagnostics;
};

Joined load_joined(const ExperimentConfig& config, int year) {
  Joined out;
  auto diag = [&](const char* stage, const char* metric, std::size_t count) {
    out.diagnostics.push_back({year, stage, metric, count});
  };
  auto parsed = staged("parse", year, [&] {
    data::ParseOptions opts;
    opts.strict = !config.lenient_parse;
    return data::parse_vintage_files(origination_path(config.data_dir, year), performance_path(config.data_dir, year),
                                     opts);
  });
  diag("parse", "origination_records", parsed.origination.size());
  diag("parse", "performance_records", parsed.performance.size());
  diag("parse", "skipped_lines", parsed.issues.size());
  diag("parse", "coerced_cells", parsed.coerced_cells);

  auto cleaned = staged("clean", year, [&] { return data::clean(std::move(parsed.origination), std::move(parsed.performance)); });
  diag("clean", "dropped_loans", cleaned.report.dropped_loans);
  diag("clean", "dropped_performance_rows", cleaned.report.dropped_performance_rows);
  diag("clean", "imputed_categorical", cleaned.report.imputed_categorical);
  diag("clean", "imputed_numeric", cleaned.report.imputed_numeric);

  auto joined = staged("join", year, [&] {
    return data::join_and_label(std::move(cleaned.origination), std::move(cleaned.performance), year);
  });
  diag("join", "orphan_performance_rows", joined.report.orphan_performance_rows);
  diag("join", "rows", joined.vintage.rows.size());
  diag("join", "customers", joined.vintage.customer_count());
  diag("join", "defaulted_rows", joined.vintage.defaulted_rows());
  diag("join", "defaulted_customers", joined.vintage.defaulted_customers());
  out.vintage = std::move(joined.vintage);
  return out;
}

}  // namespace

void check_inputs(const ExperimentConfig& config) {
  if (config.vintages.empty()) throw ConfigError("no vintages configured");
  for (const int year : config.vintages) {
    for (const auto& path : {origination_path(config.data_dir, year), performance_path(config.data_dir, year)}) {
      if (!std::filesystem::is_regular_file(path)) throw DataError("missing input file: " + path);
    }
  }
}

PreparedVintage prepare_vintage(const ExperimentConfig& config, int year) {
  PreparedVintage out;
  out.year = year;
  Joined joined = load_joined(config, year);
  out.diagnostics = std::move(joined.diagnostics);
  auto diag = [&](const char* stage, const char* metric, std::size_t count) {
    out.diagnostics.push_back({year, stage, metric, count});
  };

  auto sampled = staged("sample", year, [&] {
    return data::stratified_sample(joined.vintage, config.customer_sample,
                                   derive_seed(config.seed, "sample/" + std::to_string(year)));
  });
  diag("sample", "customers", sampled.customer_count());
  diag("sample", "rows", sampled.rows.size());
  diag("sample", "defaulted_rows", sampled.defaulted_rows());
  diag("sample", "defaulted_customers", sampled.defaulted_customers());

  out.all_features = config.features.empty() ? data::default_feature_names() : config.features;
  data::Dataset encoded = staged("encode", year, [&] { return data::encode(sampled, out.all_features); });

  if (config.feature_selection.enabled) {
    out.verdicts = staged("feature-select", year, [&] {
      const auto& fs = config.feature_selection;
      const std::string tag = "fs/" + std::to_string(year);
      const auto corr = features::correlation_filter(encoded);
      const auto imp = features::rf_importance(encoded, fs.forest, derive_seed(config.seed, tag + "/rf"));
      features::GaParams ga = fs.ga;
      ga.seed = derive_seed(config.seed, tag + "/ga");
      const auto survivors = features::ga_select(encoded, ga);
      return features::crosscheck_discard(corr, imp, survivors.names,
                                          {fs.correlation_threshold, fs.importance_threshold});
    });
    std::vector<std::size_t> keep;
    for (std::size_t j = 0; j < out.verdicts.size(); ++j) {
      if (!out.verdicts[j].discarded) keep.push_back(j);
    }
    diag("feature-select", "discarded_features", out.verdicts.size() - keep.size());
    if (!keep.empty() && keep.size() < encoded.cols()) encoded = encoded.select_columns(keep);
  }
  diag("encode", "features", encoded.cols());
  out.dataset = std::move(encoded);
  return out;
}

std::vector<std::string> write_report_files(const std::vector<eval::MetricsReport>& reports,
                                            const std::string& out_dir) {
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(out_dir + "/" + name, content);
    files.push_back(name);
  };
  emit("rankings.md", eval::rankings_markdown(reports));
  emit("rankings.csv", eval::rankings_csv(reports));
  bool both = false;
  {
    bool seen[2] = {false, false};
    for (const auto& r : reports) seen[static_cast<int>(r.variant)] = true;
    both = seen[0] && seen[1];
  }
  if (both) {
    const auto cmp = eval::compare_variants(reports);
    emit("variant_comparison.md", eval::comparison_markdown(cmp));
    emit("variant_comparison.csv", eval::comparison_csv(cmp));
  }
  emit("timing.md", eval::timing_markdown(eval::timing_table(reports)));
  return files;
}

RunOutcome run(const ExperimentConfig& config, std::ostream* log) {
  auto say = [&](const std::string& s) {
    if (log != nullptr) *log << s << std::endl;
  };
  check_inputs(config);
  const auto specs = model_specs(config);
  if (specs.empty()) throw ConfigError("no models configured");

  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw DataError("cannot create output directory " + config.output_dir + ": " + ec.message());
  const std::string out = config.output_dir;

  RunOutcome outcome;
  std::vector<data::Dataset> datasets;
  std::vector<data::DiagnosticEntry> diagnostics;
  std::string verdicts_csv = "vintage_year,feature,rf_importance,ga_survived,corr_with_target,discarded\n";
  for (const int year : config.vintages) {
    say(fmt::format("preparing vintage {}", year));
    auto prepared = prepare_vintage(config, year);
    diagnostics.insert(diagnostics.end(), prepared.diagnostics.begin(), prepared.diagnostics.end());
    const std::string body = features::verdicts_to_csv(prepared.verdicts);
    for (const auto& line : split_list(body.substr(body.find('\n') + 1), '\n')) {
      if (!line.empty()) verdicts_csv += std::to_string(year) + "," + line + "\n";
    }
    if (config.snapshot) {
      const std::string name = fmt::format("dataset_{}.csv", year);
      write_file(out + "/" + name, data::dataset_to_csv(prepared.dataset));
      outcome.files.push_back(name);
    }
    datasets.push_back(std::move(prepared.dataset));
  }
  write_file(out + "/diagnostics.csv", data::diagnostics_to_csv(diagnostics));
  outcome.files.push_back("diagnostics.csv");
  if (config.feature_selection.enabled) {
    write_file(out + "/feature_verdicts.csv", verdicts_csv);
    outcome.files.push_back("feature_verdicts.csv");
  }

  eval::ExperimentOptions options;
  options.split = {config.holdout_fraction, config.stratified_split, config.seed};
  options.jobs = config.jobs;
  options.grids = config.grids;
  options.grid_folds = config.grid_folds;
  std::size_t done = 0;
  const std::size_t total = datasets.size() * specs.size() * 2;
  options.on_cell = [&](const eval::MetricsReport& r) {
    ++done;
    say(fmt::format("[{}/{}] {} {}{}", done, total, r.vintage_year, eval::model_label(r.kind, r.variant),
                    r.failed() ? " FAILED: " + r.error : ""));
  };
  if (config.save_models) {
    std::filesystem::create_directories(out + "/models", ec);
    options.on_model = [out](const eval::MetricsReport& r, const models::TrainedModel& m) {
      write_file(fmt::format("{}/models/{}_{}.json", out, r.vintage_year, eval::model_label(r.kind, r.variant)),
                 models::save_model(m).dump());
    };
  }
  resampling::ResampleConfig resample = config.resample;
  resample.seed = config.seed;
  outcome.reports = eval::run_experiment(datasets, specs, resample, options);

  write_file(out + "/metrics.csv", eval::metrics_csv(outcome.reports));
  outcome.files.push_back("metrics.csv");
  write_file(out + "/timing.csv", eval::timing_csv(outcome.reports));
  outcome.files.push_back("timing.csv");
  for (auto& f : write_report_files(outcome.reports, out)) outcome.files.push_back(std::move(f));
  if (config.save_models) {
    for (const auto& r : outcome.reports) {
      if (!r.failed()) outcome.files.push_back(fmt::format("models/{}_{}.json", r.vintage_year, eval::model_label(r.kind, r.variant)));
    }
  }

  for (const auto& r : outcome.reports) outcome.incomplete = outcome.incomplete || r.failed();
  const auto manifest = build_manifest(config, out, outcome.files, outcome.reports.size(), outcome.incomplete);
  write_file(out + "/manifest.json", manifest.dump(2) + "\n");
  outcome.files.push_back("manifest.json");
  outcome.exit_code = outcome.incomplete ? kExitPartialFailure : kExitOk;
  return outcome;
}

std::string inspect(const ExperimentConfig& config) {
  check_inputs(config);
  struct Totals {
    std::size_t customers = 0, rows = 0, defaulted_rows = 0, defaulted_customers = 0, vintages = 0;
  };
  std::map<data::Regime, Totals> regimes;
  std::string out = "| Vintage | Regime | Customers | Rows | Defaulted rows | Row default rate | Defaulted customers |\n";
  out += "|---:|---|---:|---:|---:|---:|---:|\n";
  auto line = [](const std::string& label, const std::string& regime, const Totals& t) {
    const double rate = t.rows > 0 ? 100.0 * static_cast<double>(t.defaulted_rows) / static_cast<double>(t.rows) : 0.0;
    return fmt::format("| {} | {} | {} | {} | {} | {:.4f}% | {} |\n", label, regime, t.customers, t.rows,
                       t.defaulted_rows, rate, t.defaulted_customers);
  };
  for (const int year : config.vintages) {
    const auto joined = load_joined(config, year);
    const auto& v = joined.vintage;
    Totals t{v.customer_count(), v.rows.size(), v.defaulted_rows(), v.defaulted_customers(), 1};
    out += line(std::to_string(year), std::string(data::to_string(v.regime)), t);
    auto& agg = regimes[v.regime];
    agg.customers += t.customers;
    agg.rows += t.rows;
    agg.defaulted_rows += t.defaulted_rows;
    agg.defaulted_customers += t.defaulted_customers;
    ++agg.vintages;
  }
  out += "\n| Regime | Vintages | Customers | Rows | Defaulted rows | Row default rate | Defaulted customers |\n";
  out += "|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& [regime, t] : regimes) {
    out += line(std::string(data::to_string(regime)), std::to_string(t.vintages), t);
  }
  return out;
}

}  // namespace bpm::bench
