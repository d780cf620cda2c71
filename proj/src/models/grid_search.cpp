#include "bpm/models/grid_search.hpp"

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/data/partition.hpp"

namespace bpm::models {

std::size_t ParamGrid::size() const {
  if (axes.empty()) return 0;
  std::size_t n = 1;
  for (const auto& [key, values] : axes) n *= values.size();
  return n;
}

std::vector<HyperParams> ParamGrid::points() const {
  std::vector<HyperParams> out;
  const std::size_t total = size();
  for (std::size_t p = 0; p < total; ++p) {
    HyperParams h;
    std::size_t rest = p;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const auto& values = axes[a].second;
      h[axes[a].first] = values[rest % values.size()];
      rest /= values.size();
    }
    out.push_back(std::move(h));
  }
  return out;
}

GridResult grid_search(const ClassifierSpec& base, const data::Dataset& train, const ParamGrid& grid,
                       std::size_t folds) {
  if (grid.size() == 0) throw ConfigError("empty hyper-parameter grid");
  if (folds < 2) throw ConfigError("grid search needs at least two folds");
  const auto fold_of = data::stratified_group_folds(train, folds, derive_seed(base.seed, "grid/folds"));

  std::vector<data::Dataset> fit_parts;
  std::vector<data::Dataset> valid_parts;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> in;
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < train.rows(); ++i) (fold_of[i] == f ? out : in).push_back(i);
    fit_parts.push_back(train.select_rows(in));
    valid_parts.push_back(train.select_rows(out));
  }

  GridResult result;
  bool have_best = false;
  for (const auto& point : grid.points()) {
    HyperParams merged = base.params;
    for (const auto& [k, v] : point) merged[k] = v;
    const ClassifierSpec spec = make_spec(base.kind, merged, base.seed);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t f = 0; f < folds; ++f) {
      const auto& valid = valid_parts[f];
      if (valid.count_label(1) == 0) continue;
      const auto model = fit(spec, fit_parts[f]);
      std::size_t tp = 0;
      for (std::size_t i = 0; i < valid.rows(); ++i) {
        if (valid.label(i) == 1) tp += model->predict(valid.row(i));
      }
      sum += static_cast<double>(tp) / static_cast<double>(valid.count_label(1));
      ++used;
    }
    const double recall = used > 0 ? sum / static_cast<double>(used) : 0.0;
    result.evaluations.push_back({spec.params, recall});
    if (!have_best || recall > result.best_recall) {
      have_best = true;
      result.best = spec.params;
      result.best_recall = recall;
    }
  }
  return result;
}

}  // namespace bpm::models
