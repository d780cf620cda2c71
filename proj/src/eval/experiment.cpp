#include "bpm/eval/experiment.hpp"

#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <thread>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/data/partition.hpp"

namespace bpm::eval {

std::string_view to_string(Variant v) { return v == Variant::Original ? "Original" : "Resampled"; }

Variant parse_variant(std::string_view name) {
  if (name == "Original") return Variant::Original;
  if (name == "Resampled") return Variant::Resampled;
  throw DataError("unknown variant '" + std::string(name) + "'");
}

std::string model_label(models::ModelKind kind, Variant v) {
  std::string s(models::to_string(kind));
  if (v == Variant::Resampled) s += "-R";
  return s;
}

Split split(const data::Dataset& d, const SplitPlan& plan) {
  std::vector<std::uint8_t> held;
  if (plan.stratified) {
    held = data::stratified_group_holdout(d, plan.holdout_fraction, plan.seed);
  } else {
    if (!(plan.holdout_fraction > 0.0 && plan.holdout_fraction < 1.0)) {
      throw ConfigError("holdout fraction must lie in (0, 1)");
    }
    std::map<std::uint32_t, std::uint8_t> flag;
    std::vector<std::uint32_t> groups;
    for (const auto g : d.groups()) {
      if (flag.emplace(g, 0).second) groups.push_back(g);
    }
    Rng rng(plan.seed);
    rng.shuffle(groups);
    const auto take = static_cast<std::size_t>(std::llround(plan.holdout_fraction * static_cast<double>(groups.size())));
    for (std::size_t k = 0; k < take && k < groups.size(); ++k) flag[groups[k]] = 1;
    for (const auto g : d.groups()) held.push_back(flag[g]);
  }
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> holdout_rows;
  for (std::size_t i = 0; i < d.rows(); ++i) (held[i] ? holdout_rows : train_rows).push_back(i);
  Split s{d.select_rows(train_rows), d.select_rows(holdout_rows)};
  for (const auto* part : {&s.train, &s.holdout}) {
    if (part->count_label(0) == 0 || part->count_label(1) == 0) {
      throw DataError("split leaves a side without one of the classes");
    }
  }
  s.holdout.mark_holdout();
  return s;
}

std::uint64_t model_seed(const models::ClassifierSpec& spec, int vintage_year) {
  return derive_seed(spec.seed, "model/" + std::to_string(vintage_year));
}

namespace {

struct VintageJob {
  const data::Dataset* source = nullptr;
  Split split;
  std::optional<data::Dataset> resampled;
  std::string resample_error;
  std::string split_error;
  std::string checksum;
};

MetricsReport evaluate_cell(const VintageJob& job, const models::ClassifierSpec& base, Variant variant,
                            const ExperimentOptions& options) {
  MetricsReport r;
  r.kind = base.kind;
  r.variant = variant;
  r.vintage_year = job.source->vintage_year();
  r.regime = data::assign_regime(r.vintage_year);
  r.auc_applicable = base.kind != models::ModelKind::RS;
  if (!job.split_error.empty()) {
    r.error = job.split_error;
    return r;
  }
  r.holdout_checksum = job.checksum;
  r.holdout_rows = job.split.holdout.rows();
  if (variant == Variant::Resampled && !job.resampled) {
    r.error = job.resample_error;
    return r;
  }
  const data::Dataset& train = variant == Variant::Original ? job.split.train : *job.resampled;
  r.train_rows = train.rows();
  try {
    models::ClassifierSpec spec = base;
    spec.seed = model_seed(base, r.vintage_year);
    if (const auto g = options.grids.find(base.kind); g != options.grids.end()) {
      const auto tuned = models::grid_search(spec, train, g->second, options.grid_folds);
      spec = models::make_spec(base.kind, tuned.best, spec.seed);
    }
    const auto start = std::chrono::steady_clock::now();
    const auto model = models::fit(spec, train);
    r.fit_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    r.converged = model->converged();

    const auto& holdout = job.split.holdout;
    const auto pred = model->predict_all(holdout);
    r.cm = confusion(holdout.labels(), pred);
    const auto m = metrics(r.cm);
    r.precision = m.precision;
    r.recall = m.recall;
    r.fpr = m.fpr;
    r.accuracy = m.accuracy;
    if (model->can_score()) r.roc_auc = roc_auc(holdout.labels(), model->score_all(holdout));
    if (options.on_model) options.on_model(r, *model);
  } catch (const std::exception& e) {
    r.error = e.what();
    r.cm = {};
    r.precision = r.recall = r.fpr = r.accuracy = r.roc_auc = std::nullopt;
  }
  return r;
}

}  // namespace

std::vector<MetricsReport> run_experiment(const std::vector<data::Dataset>& datasets,
                                          const std::vector<models::ClassifierSpec>& specs,
                                          const resampling::ResampleConfig& resample,
                                          const ExperimentOptions& options) {
  std::vector<VintageJob> jobs(datasets.size());
  for (std::size_t v = 0; v < datasets.size(); ++v) {
    auto& job = jobs[v];
    job.source = &datasets[v];
    const int year = datasets[v].vintage_year();
    data::assign_regime(year);
    try {
      SplitPlan plan = options.split;
      plan.seed = derive_seed(options.split.seed, "split/" + std::to_string(year));
      job.split = split(datasets[v], plan);
      job.checksum = job.split.holdout.checksum();
    } catch (const Error& e) {
      job.split_error = std::string("split: ") + e.what();
      continue;
    }
    try {
      resampling::ResampleConfig cfg = resample;
      cfg.seed = derive_seed(resample.seed, "smote/" + std::to_string(year));
      job.resampled = resampling::smote(job.split.train, cfg);
    } catch (const Error& e) {
      job.resample_error = std::string("resample: ") + e.what();
    }
  }

  struct Cell {
    std::size_t vintage;
    std::size_t spec;
    Variant variant;
  };
  std::vector<Cell> cells;
  for (std::size_t v = 0; v < jobs.size(); ++v) {
    for (std::size_t s = 0; s < specs.size(); ++s) {
      cells.push_back({v, s, Variant::Original});
      cells.push_back({v, s, Variant::Resampled});
    }
  }
  std::vector<MetricsReport> reports(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex callback_mutex;
  auto worker = [&] {
    for (std::size_t c = next++; c < cells.size(); c = next++) {
      const auto& cell = cells[c];
      reports[c] = evaluate_cell(jobs[cell.vintage], specs[cell.spec], cell.variant, options);
      if (options.on_cell) {
        std::lock_guard lock(callback_mutex);
        options.on_cell(reports[c]);
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(options.jobs, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return reports;
}

}  // namespace bpm::eval
