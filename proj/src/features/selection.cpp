#include "bpm/features/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"
#include "bpm/models/classifiers.hpp"

namespace bpm::features {

FeatureScores correlation_filter(const data::Dataset& d) {
  const std::size_t n = d.rows();
  FeatureScores out;
  const auto names = d.feature_names();
  double ymean = 0.0;
  for (std::size_t i = 0; i < n; ++i) ymean += d.label(i);
  ymean /= static_cast<double>(std::max<std::size_t>(n, 1));
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) syy += (d.label(i) - ymean) * (d.label(i) - ymean);

  for (std::size_t j = 0; j < d.cols(); ++j) {
    double xmean = 0.0;
    for (std::size_t i = 0; i < n; ++i) xmean += d.at(i, j);
    xmean /= static_cast<double>(std::max<std::size_t>(n, 1));
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dx = d.at(i, j) - xmean;
      sxx += dx * dx;
      sxy += dx * (d.label(i) - ymean);
    }
    double r = 0.0;
    if (sxx > 0.0 && syy > 0.0) r = std::min(1.0, std::abs(sxy) / std::sqrt(sxx * syy));
    out.push_back({names[j], r});
  }
  return out;
}

FeatureScores rf_importance(const data::Dataset& d, const models::HyperParams& forest_params, std::uint64_t seed) {
  const auto spec = models::make_spec(models::ModelKind::RF, forest_params, seed);
  if (d.count_label(1) == 0 || d.count_label(0) == 0) throw DataError("RF importance needs both classes");
  const auto forest = models::fit_forest(spec, d);
  const auto names = d.feature_names();
  FeatureScores out;
  for (std::size_t j = 0; j < d.cols(); ++j) out.push_back({names[j], forest->feature_importances()[j]});
  return out;
}

// ---- genetic search ----------------------------------------------------------------

namespace {

std::vector<std::size_t> mask_indices(const Mask& m) {
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (m[j]) idx.push_back(j);
  }
  return idx;
}

void repair(Mask& m, Rng& rng) {
  if (std::find(m.begin(), m.end(), 1) == m.end()) m[rng.below(m.size())] = 1;
}

}  // namespace

GaFitness::GaFitness(const data::Dataset& d, const GaParams& params)
    : spec_(models::make_spec(models::ModelKind::RF,
                              {{"n_trees", static_cast<double>(params.fitness_trees)},
                               {"max_depth", static_cast<double>(params.fitness_max_depth)}},
                              derive_seed(params.seed, "fitness"))) {
  const std::uint8_t minority = d.count_label(1) <= d.count_label(0) ? 1 : 0;
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < d.rows(); ++i) (d.label(i) == minority ? pos : neg).push_back(i);
  if (pos.size() < 2) throw DataError("GA fitness needs at least two minority rows");
  Rng rng(derive_seed(params.seed, "fitness/split"));
  rng.shuffle(pos);
  rng.shuffle(neg);
  if (pos.size() + neg.size() > params.fitness_rows) {
    pos.resize(std::min(pos.size(), params.fitness_rows / 2));
    neg.resize(std::min(neg.size(), params.fitness_rows - pos.size()));
  }
  if (neg.size() < 2) throw DataError("GA fitness needs at least two majority rows");
  auto cut = [](std::size_t count) { return std::max<std::size_t>(1, count / 4); };
  std::vector<std::size_t> valid(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(cut(pos.size())));
  std::vector<std::size_t> train(pos.begin() + static_cast<std::ptrdiff_t>(cut(pos.size())), pos.end());
  valid.insert(valid.end(), neg.begin(), neg.begin() + static_cast<std::ptrdiff_t>(cut(neg.size())));
  train.insert(train.end(), neg.begin() + static_cast<std::ptrdiff_t>(cut(neg.size())), neg.end());
  std::sort(valid.begin(), valid.end());
  std::sort(train.begin(), train.end());
  train_ = d.select_rows(train);
  valid_ = d.select_rows(valid);
}

double GaFitness::operator()(const Mask& mask) {
  if (const auto it = cache_.find(mask); it != cache_.end()) return it->second;
  const auto cols = mask_indices(mask);
  double recall = 0.0;
  if (!cols.empty()) {
    const auto train = train_.select_columns(cols);
    const auto valid = valid_.select_columns(cols);
    const auto forest = models::fit_forest(spec_, train);
    std::size_t tp = 0;
    std::size_t positives = 0;
    for (std::size_t i = 0; i < valid.rows(); ++i) {
      if (valid.label(i) != 1) continue;
      ++positives;
      tp += forest->predict(valid.row(i));
    }
    recall = positives > 0 ? static_cast<double>(tp) / static_cast<double>(positives) : 0.0;
  }
  cache_.emplace(mask, recall);
  return recall;
}

GaResult ga_select(const data::Dataset& d, const GaParams& params) {
  const std::size_t f = d.cols();
  if (f == 0) throw DataError("GA needs at least one feature");
  if (params.population < 2) throw ConfigError("GA population must be >= 2");
  if (params.generations == 0) throw ConfigError("GA needs at least one generation");
  if (params.crossover < 0.0 || params.crossover > 1.0 || params.mutation < 0.0 || params.mutation > 1.0 ||
      params.elitism < 0.0 || params.elitism >= 1.0) {
    throw ConfigError("GA rates must lie in [0, 1]");
  }
  for (const auto& m : params.initial_population) {
    if (m.size() != f) throw ConfigError("GA initial mask length does not match the feature count");
  }

  Rng rng(derive_seed(params.seed, "ga"));
  GaFitness fitness(d, params);
  const std::size_t p = params.population;
  const std::size_t elites =
      std::min(p, std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(params.elitism * static_cast<double>(p)))));

  std::vector<Mask> pop;
  for (std::size_t i = 0; i < p; ++i) {
    Mask m(f, 0);
    if (i < params.initial_population.size()) {
      m = params.initial_population[i];
    } else {
      for (auto& b : m) b = rng.bernoulli(0.5) ? 1 : 0;
    }
    repair(m, rng);
    pop.push_back(std::move(m));
  }

  GaResult result;
  result.best_fitness = -1.0;
  std::size_t stall = 0;
  std::vector<double> fit(p);
  std::vector<std::size_t> order(p);
  for (std::size_t g = 0; g < params.generations; ++g) {
    for (std::size_t i = 0; i < p; ++i) fit[i] = fitness(pop[i]);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] > fit[b]; });
    result.generations_run = g + 1;
    const Mask& leader = pop[order[0]];
    if (fit[order[0]] > result.best_fitness) {
      const bool changed = leader != result.best_mask;
      result.best_fitness = fit[order[0]];
      result.best_mask = leader;
      stall = changed ? 0 : stall + 1;
    } else {
      ++stall;
    }
    result.best_fitness_history.push_back(result.best_fitness);
    if (g > 0 && stall >= params.stall_generations) {
      result.stalled = true;
      break;
    }
    if (g + 1 == params.generations) break;

    const double total = std::accumulate(fit.begin(), fit.end(), 0.0);
    auto pick = [&]() -> const Mask& {
      if (!(total > 0.0)) return pop[rng.below(p)];
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < p; ++i) {
        acc += fit[i];
        if (acc > target) return pop[i];
      }
      return pop[order[0]];
    };

    std::vector<Mask> next;
    next.reserve(p);
    for (std::size_t e = 0; e < elites; ++e) next.push_back(pop[order[e]]);
    while (next.size() < p) {
      Mask a = pick();
      Mask b = pick();
      if (f > 1 && rng.uniform() < params.crossover) {
        const std::size_t point = 1 + static_cast<std::size_t>(rng.below(f - 1));
        for (std::size_t j = point; j < f; ++j) std::swap(a[j], b[j]);
      }
      for (Mask* child : {&a, &b}) {
        if (next.size() == p) break;
        for (auto& bit : *child) {
          if (params.mutation > 0.0 && rng.uniform() < params.mutation) bit ^= 1;
        }
        repair(*child, rng);
        next.push_back(std::move(*child));
      }
    }
    pop = std::move(next);
  }

  result.selected = mask_indices(result.best_mask);
  const auto names = d.feature_names();
  for (const auto j : result.selected) result.names.push_back(names[j]);
  result.evaluations = fitness.evaluations();
  return result;
}

// ---- crosscheck -----------------------------------------------------------------------

std::vector<FeatureVerdict> crosscheck_discard(const FeatureScores& corr, const FeatureScores& importance,
                                               const std::vector<std::string>& ga_survivors,
                                               const DiscardThresholds& thresholds) {
  std::map<std::string, double> imp;
  for (const auto& s : importance) {
    if (!imp.emplace(s.feature, s.value).second) throw DataError("duplicate feature '" + s.feature + "'");
  }
  if (imp.size() != corr.size()) throw DataError("correlation and importance cover different features");
  std::set<std::string> known;
  for (const auto& s : corr) known.insert(s.feature);
  for (const auto& name : ga_survivors) {
    if (!known.contains(name)) throw DataError("GA survivor '" + name + "' is not a known feature");
  }
  const std::set<std::string> survived(ga_survivors.begin(), ga_survivors.end());

  std::vector<FeatureVerdict> out;
  for (const auto& s : corr) {
    const auto it = imp.find(s.feature);
    if (it == imp.end()) throw DataError("feature '" + s.feature + "' has no importance score");
    FeatureVerdict v{s.feature, it->second, survived.contains(s.feature), s.value, false};
    v.discarded = v.rf_importance < thresholds.importance && !v.ga_survived &&
                  v.corr_with_target < thresholds.correlation;
    out.push_back(std::move(v));
  }
  return out;
}

std::string verdicts_to_csv(const std::vector<FeatureVerdict>& verdicts) {
  std::string out = "feature,rf_importance,ga_survived,corr_with_target,discarded\n";
  for (const auto& v : verdicts) {
    out += csv_escape(v.feature) + "," + format_double(v.rf_importance) + "," + (v.ga_survived ? "1" : "0") + "," +
           format_double(v.corr_with_target) + "," + (v.discarded ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace bpm::features
