// bpm: bankruptcy-prediction benchmark runner.
//
//   bpm run      --config FILE [--set key=value ...]
//   bpm generate --out DIR --vintages 2003,2008,2015 [--customers N] ...
//   bpm report   --metrics FILE [--timing FILE] --out DIR
//   bpm inspect  --config FILE [--set key=value ...]

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "bpm/bench/config.hpp"
#include "bpm/bench/pipeline.hpp"
#include "bpm/bench/synthetic.hpp"
#include "bpm/common/error.hpp"
#include "bpm/common/text.hpp"
#include "bpm/eval/report.hpp"
#include "bpm/simd/kernels.hpp"

namespace {

using namespace bpm;

bench::ExperimentConfig resolve_config(const std::string& path, const std::vector<std::string>& sets) {
  bench::ExperimentConfig config = path.empty() ? bench::default_config() : bench::load_config(path);
  if (const char* dir = std::getenv("BPM_DATA_DIR"); dir != nullptr && *dir != '\0') config.data_dir = dir;
  for (const auto& s : sets) bench::apply_setting(config, s);
  return config;
}

int cmd_run(const std::string& config_path, const std::vector<std::string>& sets, bool quiet) {
  const auto config = resolve_config(config_path, sets);
  const auto outcome = bench::run(config, quiet ? nullptr : &std::cerr);
  std::cout << "wrote " << outcome.files.size() << " files to " << config.output_dir << " (" << outcome.reports.size()
            << " reports" << (outcome.incomplete ? ", some cells failed" : "") << ")\n";
  return outcome.exit_code;
}

int cmd_generate(const std::string& out, const std::string& vintages, std::size_t customers, std::size_t rows,
                 double rate, std::size_t informative, double signal, std::uint64_t seed) {
  bench::ExperimentConfig years;
  bench::apply_setting(years, "vintages=" + vintages);
  for (const int year : years.vintages) {
    bench::SyntheticSpec spec;
    spec.vintage_year = year;
    spec.customer_count = customers;
    spec.rows_per_customer = rows;
    if (rate >= 0.0) spec.default_rate = rate;
    spec.informative_features = informative;
    spec.signal = signal;
    spec.seed = seed;
    const auto files = bench::write_synthetic(spec, out);
    std::cout << year << ": " << files.rows << " rows, " << files.defaulted_customers << " defaulted customers -> "
              << files.performance_path << "\n";
  }
  return bench::kExitOk;
}

int cmd_report(const std::string& metrics, const std::string& timing, const std::string& out) {
  auto reports = eval::parse_metrics_csv(read_file(metrics));
  if (reports.empty()) throw DataError(metrics + " holds no reports");
  if (!timing.empty()) eval::apply_timing_csv(reports, read_file(timing));
  std::filesystem::create_directories(out);
  for (const auto& f : bench::write_report_files(reports, out)) std::cout << out << "/" << f << "\n";
  return bench::kExitOk;
}

int cmd_inspect(const std::string& config_path, const std::vector<std::string>& sets) {
  std::cout << bench::inspect(resolve_config(config_path, sets));
  return bench::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bankruptcy prediction model benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> sets;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run the full experiment described by a config file");
  run->add_option("-c,--config", config_path, "Experiment config file");
  run->add_option("-s,--set", sets, "Override a config key (key=value); repeatable");
  run->add_flag("-q,--quiet", quiet, "No progress output");

  std::string gen_out;
  std::string gen_vintages;
  std::size_t customers = 2000;
  std::size_t rows = 45;
  double rate = -1.0;
  std::size_t informative = 4;
  double signal = 1.5;
  std::uint64_t seed = 0;
  auto* gen = app.add_subcommand("generate", "Write synthetic vintages in the loan-level file layout");
  gen->add_option("-o,--out", gen_out, "Data directory")->required();
  gen->add_option("-v,--vintages", gen_vintages, "Years, e.g. 2003,2008 or 1999-2017")->required();
  gen->add_option("--customers", customers, "Customers per vintage");
  gen->add_option("--rows", rows, "Performance rows per customer");
  gen->add_option("--rate", rate, "Per-row default rate (default: regime preset)");
  gen->add_option("--informative", informative, "Informative borrower features (1-4)");
  gen->add_option("--signal", signal, "Propensity signal strength");
  gen->add_option("--seed", seed, "Root seed");

  std::string metrics_path;
  std::string timing_path;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "Rebuild ranking, comparison and timing tables from metrics.csv");
  rep->add_option("-m,--metrics", metrics_path, "metrics.csv of a run")->required();
  rep->add_option("-t,--timing", timing_path, "timing.csv of the same run");
  rep->add_option("-o,--out", report_out, "Output directory")->required();

  auto* ins = app.add_subcommand("inspect", "Print dataset and class-ratio statistics per vintage and regime");
  ins->add_option("-c,--config", config_path, "Experiment config file");
  ins->add_option("-s,--set", sets, "Override a config key (key=value); repeatable");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bench::kExitConfigError;
  }

  try {
    if (*run) return cmd_run(config_path, sets, quiet);
    if (*gen) return cmd_generate(gen_out, gen_vintages, customers, rows, rate, informative, signal, seed);
    if (*rep) return cmd_report(metrics_path, timing_path, report_out);
    if (*ins) return cmd_inspect(config_path, sets);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return bench::kExitConfigError;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return bench::kExitDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return bench::kExitDataError;
  }
  return bench::kExitOk;
}
