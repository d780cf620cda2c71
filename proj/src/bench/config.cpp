#include "bpm/bench/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"
#include "bpm/data/vintage.hpp"

namespace bpm::bench {

namespace {

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("'" + key + "' expects a boolean, got '" + std::string(v) + "'");
}

double parse_number(std::string_view v, const std::string& key) {
  const auto d = parse_double(v);
  if (!d || !std::isfinite(*d)) throw ConfigError("'" + key + "' expects a number, got '" + std::string(v) + "'");
  return *d;
}

std::size_t parse_count(std::string_view v, const std::string& key, std::size_t min_value = 0) {
  const auto i = parse_int(v);
  if (!i || *i < static_cast<long long>(min_value)) {
    throw ConfigError("'" + key + "' expects an integer >= " + std::to_string(min_value) + ", got '" +
                      std::string(v) + "'");
  }
  return static_cast<std::size_t>(*i);
}

std::vector<int> parse_years(std::string_view v, const std::string& key) {
  std::vector<int> years;
  for (const auto& item : split_list(v)) {
    const auto dash = item.find('-');
    long long lo = 0;
    long long hi = 0;
    if (dash == std::string::npos) {
      const auto y = parse_int(item);
      if (!y) throw ConfigError("'" + key + "': bad year '" + item + "'");
      lo = hi = *y;
    } else {
      const auto a = parse_int(std::string_view(item).substr(0, dash));
      const auto b = parse_int(std::string_view(item).substr(dash + 1));
      if (!a || !b || *a > *b) throw ConfigError("'" + key + "': bad year range '" + item + "'");
      lo = *a;
      hi = *b;
    }
    for (long long y = lo; y <= hi; ++y) {
      if (y < data::kFirstVintage || y > data::kLastVintage) {
        throw ConfigError("'" + key + "': vintage " + std::to_string(y) + " is outside " +
                          std::to_string(data::kFirstVintage) + "-" + std::to_string(data::kLastVintage));
      }
      if (std::find(years.begin(), years.end(), y) != years.end()) {
        throw ConfigError("'" + key + "': vintage " + std::to_string(y) + " listed twice");
      }
      years.push_back(static_cast<int>(y));
    }
  }
  return years;
}

std::vector<models::ModelKind> parse_models(std::string_view v) {
  if (trim(v) == "all") return {models::kAllKinds.begin(), models::kAllKinds.end()};
  std::vector<models::ModelKind> out;
  for (const auto& item : split_list(v)) {
    const auto k = models::parse_kind(item);
    if (std::find(out.begin(), out.end(), k) != out.end()) {
      throw ConfigError("model " + item + " listed twice");
    }
    out.push_back(k);
  }
  if (out.empty()) throw ConfigError("'models' must name at least one model");
  return out;
}

void set_ga(features::GaParams& ga, const std::string& param, std::string_view v, const std::string& key) {
  if (param == "population") ga.population = parse_count(v, key, 2);
  else if (param == "generations") ga.generations = parse_count(v, key, 1);
  else if (param == "crossover") ga.crossover = parse_number(v, key);
  else if (param == "mutation") ga.mutation = parse_number(v, key);
  else if (param == "elitism") ga.elitism = parse_number(v, key);
  else if (param == "stall_generations") ga.stall_generations = parse_count(v, key, 1);
  else if (param == "fitness_rows") ga.fitness_rows = parse_count(v, key, 4);
  else if (param == "fitness_trees") ga.fitness_trees = parse_count(v, key, 1);
  else if (param == "fitness_max_depth") ga.fitness_max_depth = parse_count(v, key);
  else throw ConfigError("unknown key '" + key + "'");
}

void set_value(ExperimentConfig& c, const std::string& key, std::string_view v) {
  if (key == "data_dir") c.data_dir = std::string(v);
  else if (key == "vintages") c.vintages = parse_years(v, key);
  else if (key == "customer_sample") c.customer_sample = parse_count(v, key);
  else if (key == "holdout_fraction") {
    c.holdout_fraction = parse_number(v, key);
    if (!(c.holdout_fraction > 0.0 && c.holdout_fraction < 1.0)) {
      throw ConfigError("'holdout_fraction' must lie in (0, 1)");
    }
  } else if (key == "split.stratified") c.stratified_split = parse_bool(v, key);
  else if (key == "parse.lenient") c.lenient_parse = parse_bool(v, key);
  else if (key == "seed") {
    const auto s = parse_int(v);
    if (!s || *s < 0) throw ConfigError("'seed' expects a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*s);
  } else if (key == "output_dir") c.output_dir = std::string(v);
  else if (key == "jobs") c.jobs = parse_count(v, key, 1);
  else if (key == "resample.k") c.resample.k = parse_count(v, key, 1);
  else if (key == "resample.target_ratio") {
    c.resample.target_ratio = parse_number(v, key);
    if (!(c.resample.target_ratio > 0.0 && c.resample.target_ratio <= 1.0)) {
      throw ConfigError("'resample.target_ratio' must lie in (0, 1]");
    }
  } else if (key == "resample.standardize") c.resample.standardize = parse_bool(v, key);
  else if (key == "models") c.models = parse_models(v);
  else if (key == "features") {
    c.features.clear();
    if (trim(v) != "default") c.features = split_list(v);
  } else if (key == "grid.folds") c.grid_folds = parse_count(v, key, 2);
  else if (key == "feature_selection.enabled") c.feature_selection.enabled = parse_bool(v, key);
  else if (key == "feature_selection.correlation_threshold") {
    c.feature_selection.correlation_threshold = parse_number(v, key);
  } else if (key == "feature_selection.importance_threshold") {
    c.feature_selection.importance_threshold = parse_number(v, key);
  } else if (key.starts_with("feature_selection.rf.")) {
    const std::string param = key.substr(21);
    models::make_spec(models::ModelKind::RF, {{param, parse_number(v, key)}});
    c.feature_selection.forest[param] = parse_number(v, key);
  } else if (key.starts_with("feature_selection.ga.")) {
    set_ga(c.feature_selection.ga, key.substr(21), v, key);
  } else if (key == "output.snapshot") c.snapshot = parse_bool(v, key);
  else if (key == "output.save_models") c.save_models = parse_bool(v, key);
  else if (key.starts_with("model.") || key.starts_with("grid.")) {
    const bool grid = key.starts_with("grid.");
    const std::string rest = key.substr(grid ? 5 : 6);
    const auto dot = rest.find('.');
    if (dot == std::string::npos) throw ConfigError("unknown key '" + key + "'");
    const auto kind = models::parse_kind(rest.substr(0, dot));
    const std::string param = rest.substr(dot + 1);
    if (!models::default_hyper_params(kind).contains(param)) {
      throw ConfigError("unknown hyper-parameter '" + param + "' for model " + std::string(models::to_string(kind)));
    }
    if (grid) {
      std::vector<double> values;
      for (const auto& item : split_list(v)) values.push_back(parse_number(item, key));
      if (values.empty()) throw ConfigError("'" + key + "' needs at least one value");
      auto& axes = c.grids[kind].axes;
      auto it = std::find_if(axes.begin(), axes.end(), [&](const auto& a) { return a.first == param; });
      if (it != axes.end()) {
        it->second = std::move(values);
      } else {
        axes.emplace_back(param, std::move(values));
      }
    } else {
      c.model_params[kind][param] = parse_number(v, key);
      models::make_spec(kind, c.model_params[kind]);
    }
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

void apply_line(ExperimentConfig& c, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'");
  const std::string key(trim(line.substr(0, eq)));
  const std::string_view value = trim(line.substr(eq + 1));
  if (key.empty()) throw ConfigError("empty key");
  set_value(c, key, value);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + format_double(v[i]);
  return s;
}

}  // namespace

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.models.assign(models::kAllKinds.begin(), models::kAllKinds.end());
  return c;
}

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  ExperimentConfig c = default_config();
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const auto content = trim(std::string_view(line).substr(0, hash));
    if (content.empty()) continue;
    try {
      apply_line(c, content);
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(text, path);
}

void apply_setting(ExperimentConfig& config, const std::string& assignment) {
  try {
    apply_line(config, assignment);
  } catch (const ConfigError& e) {
    throw ConfigError("--set " + assignment + ": " + e.what());
  }
}

std::string canonical_text(const ExperimentConfig& c) {
  std::map<std::string, std::string> kv;
  auto b = [](bool x) { return std::string(x ? "true" : "false"); };
  kv["data_dir"] = c.data_dir;
  std::string years;
  for (std::size_t i = 0; i < c.vintages.size(); ++i) years += (i ? ", " : "") + std::to_string(c.vintages[i]);
  kv["vintages"] = years;
  kv["customer_sample"] = std::to_string(c.customer_sample);
  kv["holdout_fraction"] = format_double(c.holdout_fraction);
  kv["split.stratified"] = b(c.stratified_split);
  kv["parse.lenient"] = b(c.lenient_parse);
  kv["seed"] = std::to_string(c.seed);
  kv["output_dir"] = c.output_dir;
  kv["jobs"] = std::to_string(c.jobs);
  kv["resample.k"] = std::to_string(c.resample.k);
  kv["resample.target_ratio"] = format_double(c.resample.target_ratio);
  kv["resample.standardize"] = b(c.resample.standardize);
  std::string models;
  for (std::size_t i = 0; i < c.models.size(); ++i) models += (i ? ", " : "") + std::string(models::to_string(c.models[i]));
  kv["models"] = models;
  std::string feats = c.features.empty() ? "default" : "";
  for (std::size_t i = 0; i < c.features.size(); ++i) feats += (i ? ", " : "") + c.features[i];
  kv["features"] = feats;
  kv["grid.folds"] = std::to_string(c.grid_folds);
  for (const auto& [kind, params] : c.model_params) {
    for (const auto& [p, v] : params) kv["model." + std::string(models::to_string(kind)) + "." + p] = format_double(v);
  }
  for (const auto& [kind, grid] : c.grids) {
    for (const auto& [p, values] : grid.axes) {
      kv["grid." + std::string(models::to_string(kind)) + "." + p] = join_numbers(values);
    }
  }
  const auto& fs = c.feature_selection;
  kv["feature_selection.enabled"] = b(fs.enabled);
  kv["feature_selection.correlation_threshold"] = format_double(fs.correlation_threshold);
  kv["feature_selection.importance_threshold"] = format_double(fs.importance_threshold);
  for (const auto& [p, v] : fs.forest) kv["feature_selection.rf." + p] = format_double(v);
  kv["feature_selection.ga.population"] = std::to_string(fs.ga.population);
  kv["feature_selection.ga.generations"] = std::to_string(fs.ga.generations);
  kv["feature_selection.ga.crossover"] = format_double(fs.ga.crossover);
  kv["feature_selection.ga.mutation"] = format_double(fs.ga.mutation);
  kv["feature_selection.ga.elitism"] = format_double(fs.ga.elitism);
  kv["feature_selection.ga.stall_generations"] = std::to_string(fs.ga.stall_generations);
  kv["feature_selection.ga.fitness_rows"] = std::to_string(fs.ga.fitness_rows);
  kv["feature_selection.ga.fitness_trees"] = std::to_string(fs.ga.fitness_trees);
  kv["feature_selection.ga.fitness_max_depth"] = std::to_string(fs.ga.fitness_max_depth);
  kv["output.snapshot"] = b(c.snapshot);
  kv["output.save_models"] = b(c.save_models);
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

std::vector<models::ClassifierSpec> model_specs(const ExperimentConfig& config) {
  std::vector<models::ClassifierSpec> specs;
  for (const auto kind : config.models) {
    const auto it = config.model_params.find(kind);
    const models::HyperParams overrides = it == config.model_params.end() ? models::HyperParams{} : it->second;
    specs.push_back(
        models::make_spec(kind, overrides, derive_seed(config.seed, "model/" + std::string(models::to_string(kind)))));
  }
  return specs;
}

std::string origination_path(const std::string& data_dir, int year) {
  return data_dir + "/sample_" + std::to_string(year) + "/sample_orig_" + std::to_string(year) + ".txt";
}

std::string performance_path(const std::string& data_dir, int year) {
  return data_dir + "/sample_" + std::to_string(year) + "/sample_svcg_" + std::to_string(year) + ".txt";
}

}  // namespace bpm::bench
