#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/eval/experiment.hpp"
#include "bpm/eval/metrics.hpp"
#include "bpm/eval/ranking.hpp"
#include "bpm/eval/report.hpp"

using namespace bpm;
using namespace bpm::eval;
using models::ModelKind;

namespace {

double brute_auc(const std::vector<std::uint8_t>& y, const std::vector<double>& s) {
  double num = 0, pairs = 0;
  for (std::size_t i = 0; i < y.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j)
      if (y[i] == 1 && y[j] == 0) {
        pairs += 1;
        num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
      }
  return num / pairs;
}

data::Dataset vintage_data(int year, std::size_t n, double pos_rate, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<data::Column> cols{{"a"}, {"b"}, {"c"}};
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = rng.bernoulli(pos_rate) || i < 6;
    x.push_back(rng.normal(pos ? 2.0 : 0.0, 1.0));
    x.push_back(rng.normal(pos ? 1.0 : 0.0, 1.0));
    x.push_back(rng.normal());
    y.push_back(pos);
  }
  return data::Dataset(cols, x, y, {}, year);
}

MetricsReport report(ModelKind k, Variant v, int year, std::optional<double> recall, std::optional<double> precision = 0.5) {
  MetricsReport r;
  r.kind = k;
  r.variant = v;
  r.vintage_year = year;
  r.regime = data::assign_regime(year);
  r.recall = recall;
  r.precision = precision;
  r.roc_auc = 0.8;
  r.auc_applicable = k != ModelKind::RS;
  if (!r.auc_applicable) r.roc_auc.reset();
  return r;
}

}  // namespace

TEST_CASE("confusion counts") {
  const std::vector<std::uint8_t> t{1, 1, 1, 0, 0}, p{1, 1, 0, 1, 0};
  CHECK(confusion(t, p) == ConfusionMatrix{2, 1, 1, 1});
  const auto all = confusion(t, t);
  CHECK(all.fp == 0);
  CHECK(all.fn == 0);
  const std::vector<std::uint8_t> zeros(5, 0);
  const auto cm = confusion(t, zeros);
  CHECK(cm.tp == 0);
  CHECK_FALSE(metrics(cm).precision.has_value());
  const std::vector<std::uint8_t> short_pred{1};
  CHECK_THROWS_AS(confusion(t, short_pred), DataError);
  const std::vector<std::uint8_t> bad{2, 0, 0, 0, 0};
  CHECK_THROWS_AS(confusion(t, bad), DataError);
}

TEST_CASE("metric formulas and undefined rates") {
  const auto m = metrics({3, 1, 2, 4});
  CHECK(*m.precision == doctest::Approx(0.75));
  CHECK(*m.recall == doctest::Approx(0.6));
  CHECK(*m.fpr == doctest::Approx(0.2));
  CHECK(*m.accuracy == doctest::Approx(0.7));
  CHECK_FALSE(metrics({0, 3, 0, 4}).recall.has_value());
  CHECK_FALSE(metrics({2, 0, 1, 0}).fpr.has_value());
  CHECK_FALSE(metrics({}).accuracy.has_value());
}

TEST_CASE("metrics are invariant under joint permutation") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> t(30), p(30);
    for (auto& v : t) v = rng.bernoulli(0.3);
    for (auto& v : p) v = rng.bernoulli(0.4);
    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<std::uint8_t> tp(30), pp(30);
    for (std::size_t i = 0; i < 30; ++i) {
      tp[i] = t[perm[i]];
      pp[i] = p[perm[i]];
    }
    CHECK(confusion(t, p) == confusion(tp, pp));
  }
}

TEST_CASE("roc auc") {
  const std::vector<std::uint8_t> y{0, 0, 1, 1};
  CHECK(roc_auc(y, std::vector<double>{0.1, 0.2, 0.8, 0.9}) == 1.0);
  CHECK(roc_auc(y, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
  const std::vector<std::uint8_t> y6{1, 0, 1, 0, 0, 1};
  const std::vector<double> s6{0.9, 0.7, 0.7, 0.2, 0.8, 0.1};
  CHECK(roc_auc(y6, s6) == doctest::Approx(brute_auc(y6, s6)).epsilon(1e-15));
  CHECK(roc_auc(y6, s6) == doctest::Approx(4.5 / 9.0));
  CHECK_THROWS_AS(roc_auc(std::vector<std::uint8_t>{1, 1}, std::vector<double>{0.1, 0.2}), DataError);
}

TEST_CASE("roc auc equals pair counting on random instances") {
  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(199);
    std::vector<std::uint8_t> y(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = rng.bernoulli(0.3);
      s[i] = static_cast<double>(rng.below(20)) / 20.0;
    }
    y[0] = 1;
    y[1] = 0;
    CHECK(std::abs(roc_auc(y, s) - brute_auc(y, s)) <= 1e-12);
  }
}

TEST_CASE("stratified customer split") {
  std::vector<double> x(100);
  std::vector<std::uint8_t> y(100, 0);
  for (std::size_t i = 0; i < 100; ++i) x[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < 10; ++i) y[i * 10] = 1;
  const auto d = data::make_numeric_dataset(1, x, y);
  const auto s = split(d, {.holdout_fraction = 0.3, .seed = 1});
  CHECK(s.holdout.count_label(1) == 3);
  CHECK(s.holdout.count_label(0) == 27);
  CHECK(s.train.rows() == 70);
  CHECK(s.holdout.is_holdout());
  CHECK_FALSE(s.train.is_holdout());
  const auto again = split(d, {.holdout_fraction = 0.3, .seed = 1});
  CHECK(again.holdout.checksum() == s.holdout.checksum());
  const auto lone = data::make_numeric_dataset(1, {0, 1, 2, 3, 4}, {1, 0, 0, 0, 0});
  CHECK_THROWS_AS(split(lone, {}), DataError);
}

TEST_CASE("experiment grid of vintages, models and variants") {
  const std::vector<data::Dataset> ds{vintage_data(2003, 300, 0.05, 1), vintage_data(2008, 300, 0.05, 2)};
  std::vector<models::ClassifierSpec> specs;
  for (auto k : models::kAllKinds) {
    models::HyperParams p;
    if (k == ModelKind::RF || k == ModelKind::ET || k == ModelKind::GA) p["n_trees"] = 5;
    if (k == ModelKind::GA) {
      p["generations"] = 2;
      p["population"] = 4;
    }
    if (k == ModelKind::GB || k == ModelKind::AB) p["n_rounds"] = 5;
    if (k == ModelKind::ANN) p["epochs"] = 2;
    specs.push_back(models::make_spec(k, p, 5));
  }
  std::size_t callbacks = 0;
  ExperimentOptions opts;
  opts.split.seed = 4;
  opts.on_cell = [&](const MetricsReport&) { ++callbacks; };
  const auto reports = run_experiment(ds, specs, {.k = 5, .target_ratio = 1.0, .seed = 3}, opts);
  REQUIRE(reports.size() == 48);
  CHECK(callbacks == 48);
  for (std::size_t i = 0; i < reports.size(); i += 2) {
    const auto& o = reports[i];
    const auto& r = reports[i + 1];
    CAPTURE(model_label(o.kind, o.variant));
    CHECK_FALSE(o.failed());
    CHECK_FALSE(r.failed());
    CHECK(o.variant == Variant::Original);
    CHECK(r.variant == Variant::Resampled);
    CHECK(o.kind == r.kind);
    CHECK(o.holdout_checksum == r.holdout_checksum);
    CHECK(o.holdout_rows == r.holdout_rows);
    CHECK(r.train_rows > o.train_rows);
    CHECK(o.cm.total() == o.holdout_rows);
    if (o.kind == ModelKind::RS) {
      CHECK_FALSE(o.auc_applicable);
      CHECK_FALSE(o.roc_auc.has_value());
    } else {
      CHECK(o.roc_auc.has_value());
    }
  }
  CHECK(reports.front().vintage_year == 2003);
  CHECK(reports.back().vintage_year == 2008);
  CHECK(reports[0].kind == ModelKind::LR);
  CHECK(reports[2].kind == ModelKind::MDA);
  CHECK(model_seed(specs[0], 2003) == model_seed(specs[0], 2003));
  CHECK(model_seed(specs[0], 2003) != model_seed(specs[0], 2008));

  const auto again = run_experiment(ds, specs, {.k = 5, .target_ratio = 1.0, .seed = 3}, opts);
  CHECK(metrics_csv(again) == metrics_csv(reports));
}

TEST_CASE("failed fits are recorded per cell") {
  const std::vector<data::Dataset> ds{vintage_data(2003, 200, 0.05, 1)};
  // More clusters than training points cannot be seeded.
  std::vector<models::ClassifierSpec> specs{models::make_spec(ModelKind::RS, {{"k", 500}}),
                                            models::make_spec(ModelKind::LR, {{"max_iter", 1}})};
  const auto reports = run_experiment(ds, specs, {.k = 5, .target_ratio = 1.0}, {});
  REQUIRE(reports.size() == 4);
  CHECK(reports[0].failed());
  CHECK(reports[1].failed());
  CHECK_FALSE(reports[2].failed());
  CHECK_FALSE(reports[2].converged);
}

TEST_CASE("ranking") {
  SUBCASE("single report") {
    const auto rows = rank({report(ModelKind::RF, Variant::Original, 2003, 0.7)}, RankMetric::Recall, RankScope::entire());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].rank == 1);
    CHECK(rows[0].label == "RF");
  }
  SUBCASE("descending with undefined last and ties by label") {
    const std::vector<MetricsReport> rs{report(ModelKind::LR, Variant::Original, 2003, 0.8),
                                        report(ModelKind::RF, Variant::Resampled, 2003, 0.9),
                                        report(ModelKind::DT, Variant::Original, 2003, std::nullopt),
                                        report(ModelKind::AB, Variant::Original, 2003, 0.8)};
    const auto rows = rank(rs, RankMetric::Recall, RankScope::entire());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].label == "RF-R");
    CHECK(rows[1].label == "AB");
    CHECK(rows[2].label == "LR");
    CHECK(rows[3].label == "DT");
    CHECK_FALSE(rows[3].mean.has_value());
  }
  SUBCASE("regime scope averages only its vintages") {
    const std::vector<MetricsReport> rs{report(ModelKind::LR, Variant::Original, 2001, 0.6),
                                        report(ModelKind::LR, Variant::Original, 2004, 0.8),
                                        report(ModelKind::LR, Variant::Original, 2009, 0.1)};
    const auto rows = rank(rs, RankMetric::Recall, RankScope::of(data::Regime::Medium));
    REQUIRE(rows.size() == 1);
    CHECK(*rows[0].mean == doctest::Approx(0.7));
    CHECK(rows[0].cells == 2);
    CHECK(rank(rs, RankMetric::Recall, RankScope::of(data::Regime::Low)).empty());
  }
  SUBCASE("decision-only models have no AUC rank value") {
    const auto rows = rank({report(ModelKind::RS, Variant::Original, 2003, 0.5)}, RankMetric::RocAuc, RankScope::entire());
    CHECK_FALSE(rows[0].mean.has_value());
  }
  CHECK(parse_rank_metric("recall") == RankMetric::Recall);
  CHECK_THROWS_AS(parse_rank_metric("accuracy"), ConfigError);
}

TEST_CASE("variant comparison") {
  std::vector<MetricsReport> rs;
  for (auto k : {ModelKind::LR, ModelKind::RF}) {
    rs.push_back(report(k, Variant::Original, 2003, 0.6));
    rs.push_back(report(k, Variant::Resampled, 2003, 0.6));
  }
  for (const auto& row : compare_variants(rs)) {
    if (row.original && row.resampled) CHECK(*row.difference() == 0.0);
  }
  rs[1].recall = 0.8;
  const auto cmp = compare_variants(rs);
  const auto it = std::find_if(cmp.begin(), cmp.end(), [](const auto& r) { return r.metric == "recall"; });
  REQUIRE(it != cmp.end());
  CHECK(*it->original == doctest::Approx(0.6));
  CHECK(*it->resampled == doctest::Approx(0.7));
  CHECK(*it->difference() == doctest::Approx(0.1));
  CHECK_THROWS_AS(compare_variants({report(ModelKind::LR, Variant::Original, 2003, 0.5)}), DataError);
}

TEST_CASE("timing table and files") {
  std::vector<MetricsReport> rs;
  for (auto k : models::kAllKinds) {
    for (int y : {2003, 2008}) {
      for (auto v : {Variant::Original, Variant::Resampled}) {
        auto r = report(k, v, y, 0.5);
        r.fit_seconds = v == Variant::Original ? 1.0 : 3.0;
        rs.push_back(r);
      }
    }
  }
  const auto t = timing_table(rs);
  REQUIRE(t.size() == 12);
  for (const auto& row : t) {
    CHECK(*row.original_seconds == doctest::Approx(1.0));
    CHECK(*row.resampled_seconds == doctest::Approx(3.0));
    CHECK(row.vintages == 2);
  }
  const auto md = timing_markdown(t);
  for (auto k : models::kAllKinds) CHECK(md.find("| " + std::string(models::to_string(k)) + " |") != std::string::npos);

  auto copy = rs;
  for (auto& r : copy) r.fit_seconds = 0;
  apply_timing_csv(copy, timing_csv(rs));
  for (std::size_t i = 0; i < rs.size(); ++i) CHECK(copy[i].fit_seconds == rs[i].fit_seconds);
}

TEST_CASE("metrics csv") {
  auto a = report(ModelKind::RS, Variant::Resampled, 2003, std::nullopt);
  a.cm = {1, 2, 3, 4};
  a.holdout_checksum = "abc";
  auto b = report(ModelKind::LR, Variant::Original, 2015, 0.25);
  b.error = "boom, with comma";
  b.fit_seconds = 12.5;
  const auto csv = metrics_csv({a, b});
  CHECK(csv.find("n/a") != std::string::npos);
  CHECK(csv.find("undefined") != std::string::npos);
  CHECK(csv.find("12.5") == std::string::npos);
  const auto back = parse_metrics_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0].kind == ModelKind::RS);
  CHECK(back[0].cm == a.cm);
  CHECK_FALSE(back[0].recall.has_value());
  CHECK_FALSE(back[0].auc_applicable);
  CHECK(back[1].error == b.error);
  CHECK(*back[1].recall == 0.25);
  CHECK(back[1].regime == data::Regime::Low);
  CHECK(metrics_csv(back) == csv);
}

TEST_CASE("ranking markdown") {
  std::vector<MetricsReport> rs;
  for (auto k : models::kAllKinds)
    for (auto v : {Variant::Original, Variant::Resampled}) rs.push_back(report(k, v, 2003, 0.5));
  const auto md = rankings_markdown(rs);
  CHECK(md.find("| Rank | Rank by Precision | Rank by Recall | Rank by ROC-AUC |") != std::string::npos);
  CHECK(md.find("| 24 |") != std::string::npos);
  CHECK(md.find("| 25 |") == std::string::npos);
  CHECK(md.find("RS (") != std::string::npos);
  CHECK(md.find("No vintages in this regime; table omitted.") != std::string::npos);
  // RS has no AUC, so the last two AUC cells are blank.
  const auto entire = md.substr(0, md.find("## ", md.find("## ") + 3));
  CHECK(entire.find("| 23 |") != std::string::npos);
  const auto row24 = entire.substr(entire.find("| 24 |"));
  CHECK(row24.substr(0, row24.find('\n')).ends_with("| |"));
  CHECK(rankings_csv(rs).rfind("scope,metric,rank,model,mean,cells\n", 0) == 0);
}
