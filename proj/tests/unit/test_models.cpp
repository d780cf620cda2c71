#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/models/classifiers.hpp"
#include "bpm/models/grid_search.hpp"

using namespace bpm;
using namespace bpm::models;

namespace {

data::Dataset blobs(std::size_t per_class, double gap, double sd, std::uint64_t seed, std::size_t dims = 2) {
  Rng rng(seed);
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int cls = i % 2;
    for (std::size_t j = 0; j < dims; ++j) x.push_back(rng.normal(cls ? gap : 0.0, sd));
    y.push_back(static_cast<std::uint8_t>(cls));
  }
  return data::make_numeric_dataset(dims, x, y);
}

// Label depends on x0 with flipped labels; x1..x3 are noise.
data::Dataset noisy(std::size_t n, double flip, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    x.push_back(a);
    for (int j = 0; j < 3; ++j) x.push_back(rng.normal());
    bool label = a + 0.5 * x[x.size() - 3] > 0.2;
    if (rng.bernoulli(flip)) label = !label;
    y.push_back(label ? 1 : 0);
  }
  return data::make_numeric_dataset(4, x, y);
}

double accuracy(const TrainedModel& m, const data::Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.rows(); ++i) ok += m.predict(d.row(i)) == d.label(i);
  return static_cast<double>(ok) / static_cast<double>(d.rows());
}

DecisionTree leaf(double value) { return DecisionTree({TreeNode{-1, 0.0, -1, -1, value}}); }

}  // namespace

TEST_CASE("kind names round-trip and unknown keys are rejected") {
  for (auto k : kAllKinds) CHECK(parse_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_kind("KNN"), ConfigError);
  CHECK_THROWS_AS(make_spec(ModelKind::RF, {{"trees", 5}}), ConfigError);
  CHECK(make_spec(ModelKind::RF, {{"n_trees", 5}}).param("n_trees") == 5);
}

TEST_CASE("decision tree memorises XOR") {
  const auto d = data::make_numeric_dataset(2, {0, 0, 0, 1, 1, 0, 1, 1}, {0, 1, 1, 0});
  const auto m = fit(make_spec(ModelKind::DT), d);
  CHECK(accuracy(*m, d) == 1.0);
}

TEST_CASE("naive bayes matches the closed-form Gaussian posterior") {
  const auto d = blobs(100, 6.0, 1.0, 3);
  const auto m = fit(make_spec(ModelKind::NB), d);
  double mean[2][2] = {}, var[2][2] = {};
  double count[2] = {};
  for (std::size_t i = 0; i < d.rows(); ++i) {
    count[d.label(i)] += 1;
    for (int j = 0; j < 2; ++j) mean[d.label(i)][j] += d.at(i, j);
  }
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j) mean[c][j] /= count[c];
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (int j = 0; j < 2; ++j) var[d.label(i)][j] += std::pow(d.at(i, j) - mean[d.label(i)][j], 2);
  for (int c = 0; c < 2; ++c)
    for (int j = 0; j < 2; ++j) var[c][j] /= count[c];
  auto posterior = [&](const std::vector<double>& x) {
    double ll[2];
    for (int c = 0; c < 2; ++c) {
      ll[c] = std::log(count[c] / d.rows());
      for (int j = 0; j < 2; ++j)
        ll[c] += -0.5 * std::log(2 * M_PI * var[c][j]) - std::pow(x[j] - mean[c][j], 2) / (2 * var[c][j]);
    }
    return 1.0 / (1.0 + std::exp(ll[0] - ll[1]));
  };
  CHECK(m->predict(std::vector<double>{mean[0][0], mean[0][1]}) == 0);
  CHECK(m->predict(std::vector<double>{mean[1][0], mean[1][1]}) == 1);
  for (const std::vector<double>& x : {std::vector<double>{2.5, 3.5}, std::vector<double>{3.2, 2.9},
                                       std::vector<double>{3.0, 3.0}}) {
    CHECK(m->score(x) == doctest::Approx(posterior(x)).epsilon(1e-6));
  }
}

TEST_CASE("one-round gradient boosting equals the best stump") {
  const auto d = noisy(120, 0.1, 21);
  const auto spec = make_spec(ModelKind::GB, {{"n_rounds", 1}, {"learning_rate", 1.0}, {"max_depth", 1}});
  const auto m = fit_gradient_boosting(spec, d);
  // Exhaustive oracle over every feature and midpoint threshold.
  const std::size_t n = d.rows();
  double best_sse = std::numeric_limits<double>::infinity();
  std::size_t best_j = 0;
  double best_t = 0, best_l = 0, best_r = 0;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    auto col = d.column(j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t s = 0; s + 1 < n; ++s) {
      if (sorted[s] == sorted[s + 1]) continue;
      const double t = 0.5 * (sorted[s] + sorted[s + 1]);
      double sl = 0, sr = 0, nl = 0, nr = 0;
      for (std::size_t i = 0; i < n; ++i) (col[i] <= t ? (sl += d.label(i), nl += 1) : (sr += d.label(i), nr += 1));
      const double ml = sl / nl, mr = sr / nr;
      double sse = 0;
      for (std::size_t i = 0; i < n; ++i) sse += std::pow(d.label(i) - (col[i] <= t ? ml : mr), 2);
      if (sse < best_sse - 1e-12) {
        best_sse = sse;
        best_j = j;
        best_t = t;
        best_l = ml;
        best_r = mr;
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double expect = d.at(i, best_j) <= best_t ? best_l : best_r;
    CHECK(m->raw(d.row(i)) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("gradient boosting training loss never increases") {
  const auto d = noisy(400, 0.15, 4);
  const auto m = fit_gradient_boosting(make_spec(ModelKind::GB, {{"n_rounds", 40}}, 3), d);
  const auto& loss = m->training_loss();
  REQUIRE(loss.size() == 41);
  for (std::size_t t = 1; t < loss.size(); ++t) CHECK(loss[t] <= loss[t - 1] + 1e-15);
}

TEST_CASE("forest score is the share of class-1 votes") {
  std::vector<DecisionTree> trees;
  for (int t = 0; t < 10; ++t) trees.push_back(leaf(t < 7 ? 0.9 : 0.2));
  ForestModel f(ModelKind::RF, std::move(trees), 3);
  CHECK(f.score(std::vector<double>{0, 0, 0}) == doctest::Approx(0.7));
}

TEST_CASE("logistic model with zero weights scores one half") {
  const auto d = blobs(10, 1.0, 1.0, 1);
  LogisticModel m(Standardizer::fit(d), {0.0, 0.0}, 0.0);
  CHECK(m.score(std::vector<double>{5, -3}) == 0.5);
  CHECK(m.score(std::vector<double>{0, 0}) == 0.5);
}

TEST_CASE("logistic regression converges and separates blobs") {
  const auto d = blobs(200, 3.0, 1.0, 8);
  const auto m = fit(make_spec(ModelKind::LR), d);
  CHECK(m->converged());
  CHECK(accuracy(*m, d) > 0.95);
}

TEST_CASE("rough-set models cannot score") {
  const auto d = blobs(50, 8.0, 0.5, 2);
  const auto m = fit(make_spec(ModelKind::RS, {{"k", 2}}), d);
  CHECK_FALSE(m->can_score());
  CHECK_THROWS_AS(m->score(d.row(0)), CapabilityError);
  CHECK(accuracy(*m, d) == 1.0);
}

TEST_CASE("adaboost reweighting drives the last learner's error to one half") {
  const auto d = noisy(300, 0.1, 12);
  AdaBoostTrace trace;
  const auto m = fit_adaboost(make_spec(ModelKind::AB, {{"n_rounds", 15}}, 5), d, &trace);
  REQUIRE(trace.weights_after_round.size() == m->learners().size());
  REQUIRE(m->learners().size() > 3);
  for (std::size_t t = 0; t < m->learners().size(); ++t) {
    const auto& w = trace.weights_after_round[t];
    double err = 0, total = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      const int pred = m->learners()[t].predict(d.row(i)) >= 0.5 ? 1 : 0;
      if (pred != d.label(i)) err += w[i];
      total += w[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(err - 0.5) <= 1e-9);
  }
}

TEST_CASE("mlp gradient matches central differences") {
  Rng rng(1);
  MlpShape shape{3, {5, 4}};
  auto params = mlp_init(shape, rng);
  for (auto& p : params) p += 0.1 * rng.normal();
  const std::size_t rows = 7;
  std::vector<double> x(rows * 3), y(rows);
  for (auto& v : x) v = rng.normal();
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
  std::vector<double> grad;
  mlp_loss_and_gradient(shape, params, x, y, 0.01, grad);
  REQUIRE(grad.size() == shape.param_count());
  std::vector<double> scratch;
  for (std::size_t p = 0; p < params.size(); ++p) {
    const double h = 1e-6;
    auto plus = params, minus = params;
    plus[p] += h;
    minus[p] -= h;
    const double numeric = (mlp_loss_and_gradient(shape, plus, x, y, 0.01, scratch) -
                            mlp_loss_and_gradient(shape, minus, x, y, 0.01, scratch)) /
                           (2 * h);
    const double scale = std::max({std::abs(numeric), std::abs(grad[p]), 1e-3});
    CHECK(std::abs(numeric - grad[p]) / scale <= 1e-5);
  }
}

TEST_CASE("mlp learns a separable task") {
  const auto d = blobs(200, 4.0, 1.0, 5);
  const auto m = fit(make_spec(ModelKind::ANN, {{"epochs", 30}}, 2), d);
  CHECK(accuracy(*m, d) > 0.95);
}

TEST_CASE("rough k-means with zero epsilon is Lloyd's k-means") {
  const auto d = blobs(60, 2.0, 1.2, 14, 3);
  const std::size_t k = 4;
  const auto init = kmeans_plus_plus(d, k, 9);
  const auto rough = rough_kmeans_fit(d, {.k = k, .epsilon = 0.0, .max_iterations = 200, .tolerance = 1e-12}, init);
  // Lloyd oracle from the same seeds.
  std::vector<double> c = init;
  std::vector<int> assign(d.rows(), -1);
  for (int it = 0; it < 200; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < d.rows(); ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t q = 0; q < k; ++q) {
        double s = 0;
        for (std::size_t j = 0; j < d.cols(); ++j) s += std::pow(d.at(i, j) - c[q * d.cols() + j], 2);
        if (s < bd) {
          bd = s;
          best = static_cast<int>(q);
        }
      }
      changed |= assign[i] != best;
      assign[i] = best;
    }
    if (!changed) break;
    std::vector<double> sum(k * d.cols(), 0.0);
    std::vector<double> cnt(k, 0.0);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      cnt[assign[i]] += 1;
      for (std::size_t j = 0; j < d.cols(); ++j) sum[assign[i] * d.cols() + j] += d.at(i, j);
    }
    for (std::size_t q = 0; q < k; ++q)
      if (cnt[q] > 0)
        for (std::size_t j = 0; j < d.cols(); ++j) c[q * d.cols() + j] = sum[q * d.cols() + j] / cnt[q];
  }
  CHECK(rough.lower_of == assign);
  for (std::size_t i = 0; i < d.rows(); ++i) CHECK(rough.upper_of[i] == std::vector<int>{assign[i]});
}

TEST_CASE("rough k-means on two tight blobs") {
  const auto d = blobs(50, 10.0, 0.3, 6);
  const auto m = rough_kmeans_fit(d, {.k = 2, .epsilon = 0.5}, 3);
  for (int l : m.lower_of) CHECK(l >= 0);
  double mean[2][2] = {};
  for (std::size_t i = 0; i < d.rows(); ++i)
    for (int j = 0; j < 2; ++j) mean[d.label(i)][j] += d.at(i, j) / 50.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const int cls = m.labels[c];
    CHECK(m.center(c)[0] == doctest::Approx(mean[cls][0]).epsilon(1e-9));
    CHECK(m.center(c)[1] == doctest::Approx(mean[cls][1]).epsilon(1e-9));
    CHECK(rough_predict(m, m.center(c)) == cls);
  }
  CHECK(m.labels[0] != m.labels[1]);
}

TEST_CASE("an equidistant object lands in both upper approximations") {
  const auto d = data::make_numeric_dataset(1, {0, 0.1, 5, 10, 9.9}, {0, 0, 0, 1, 1});
  const auto m = rough_kmeans_fit(d, {.k = 2, .epsilon = 0.5, .max_iterations = 1}, std::vector<double>{0.0, 10.0});
  CHECK(m.lower_of[2] == -1);
  CHECK(m.upper_of[2] == std::vector<int>{0, 1});
  CHECK(m.lower_of[0] == 0);
  CHECK(m.lower_of[3] == 1);
}

TEST_CASE("a cluster without lower members takes its label from the upper set") {
  const auto d = data::make_numeric_dataset(1, {0, 0.05, 0.1, 1.0, 1.04}, {0, 0, 1, 1, 1});
  // Every object is ambiguous under a huge epsilon.
  const auto m = rough_kmeans_fit(d, {.k = 2, .epsilon = 100.0, .max_iterations = 1}, std::vector<double>{0.0, 1.0});
  for (int l : m.lower_of) CHECK(l == -1);
  CHECK(m.labels[0] == 1);
  CHECK(m.labels[1] == 1);
}

TEST_CASE("rough k-means input errors") {
  const auto d = data::make_numeric_dataset(1, {1, 1, 1}, {0, 1, 0});
  CHECK_THROWS_AS(rough_kmeans_fit(d, {.k = 2}, 1), DataError);
  CHECK_THROWS_AS(rough_kmeans_fit(blobs(5, 3, 1, 1), {.k = 1}, 1), ConfigError);
  CHECK_THROWS_AS(rough_kmeans_fit(blobs(5, 3, 1, 1), {.k = 2, .w_lower = 0.5, .w_upper = 0.6}, 1), ConfigError);
}

TEST_CASE("linear svm reaches the hard margin on separable data") {
  const auto d = blobs(60, 6.0, 0.7, 10);
  const auto m = fit_linear_svm(make_spec(ModelKind::SVM, {{"c", 1e4}, {"tol", 1e-8}, {"max_epochs", 100000}}, 1), d);
  CHECK(m->converged());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const double yi = d.label(i) ? 1.0 : -1.0;
    CHECK(yi * m->decision(d.row(i)) >= 1.0 - 1e-6);
  }
}

TEST_CASE("qda separates blobs of different spread") {
  Rng rng(4);
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 400; ++i) {
    const bool pos = i % 2;
    const double sd = pos ? 3.0 : 0.5;
    x.push_back(rng.normal(0, sd));
    x.push_back(rng.normal(0, sd));
    y.push_back(pos);
  }
  const auto d = data::make_numeric_dataset(2, x, y);
  const auto m = fit(make_spec(ModelKind::MDA), d);
  CHECK(accuracy(*m, d) > 0.85);
  CHECK(m->predict(std::vector<double>{0, 0}) == 0);
  CHECK(m->predict(std::vector<double>{6, 6}) == 1);
}

TEST_CASE("single-class training data is rejected") {
  const auto d = data::make_numeric_dataset(1, {1, 2, 3}, {0, 0, 0});
  for (auto k : kAllKinds) {
    if (k == ModelKind::RS) continue;
    CHECK_THROWS_AS(fit(make_spec(k), d), DataError);
  }
}

TEST_CASE("every kind fits, is deterministic and survives save/load") {
  const auto d = noisy(300, 0.05, 30);
  for (auto k : kAllKinds) {
    HyperParams p;
    if (k == ModelKind::RF || k == ModelKind::ET || k == ModelKind::GA) p["n_trees"] = 10;
    if (k == ModelKind::GA) {
      p["generations"] = 3;
      p["population"] = 6;
    }
    if (k == ModelKind::GB || k == ModelKind::AB) p["n_rounds"] = 10;
    const auto spec = make_spec(k, p, 77);
    CAPTURE(to_string(k));
    const auto a = fit(spec, d);
    const auto b = fit(spec, d);
    CHECK(a->kind() == k);
    CHECK(a->feature_count() == d.cols());
    CHECK(save_model(*a) == save_model(*b));
    const auto doc = save_model(*a);
    CHECK(doc.at("format") == "bpm-model");
    CHECK(doc.at("version") == kModelFormatVersion);
    const auto loaded = load_model(nlohmann::json::parse(doc.dump()));
    CHECK(loaded->kind() == k);
    CHECK(loaded->converged() == a->converged());
    for (std::size_t i = 0; i < d.rows(); i += 7) {
      CHECK(loaded->predict(d.row(i)) == a->predict(d.row(i)));
      if (a->can_score()) {
        const double s = a->score(d.row(i));
        CHECK((s >= 0.0 && s <= 1.0));
        CHECK(loaded->score(d.row(i)) == s);
      }
    }
  }
  CHECK_THROWS(load_model(nlohmann::json{{"format", "bpm-model"}, {"version", 99}}));
}

TEST_CASE("random forest varies less across seeds than a single tree") {
  const auto test = noisy(1000, 0.2, 41);
  auto variance = [&](ModelKind kind, const HyperParams& p) {
    std::vector<double> acc;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto train = noisy(300, 0.2, 100 + s);
      acc.push_back(accuracy(*fit(make_spec(kind, p, s), train), test));
    }
    const double mean = std::accumulate(acc.begin(), acc.end(), 0.0) / acc.size();
    double v = 0;
    for (double a : acc) v += (a - mean) * (a - mean);
    return v / acc.size();
  };
  const double tree = variance(ModelKind::DT, {});
  const double forest = variance(ModelKind::RF, {{"n_trees", 50}});
  CHECK(forest < tree);
}

TEST_CASE("ga forest keeps its selected columns") {
  const auto d = noisy(300, 0.05, 9);
  const auto m = fit_ga_forest(make_spec(ModelKind::GA, {{"n_trees", 10}, {"generations", 4}, {"population", 8}}, 2), d);
  CHECK_FALSE(m->selected().empty());
  for (auto j : m->selected()) CHECK(j < d.cols());
}

TEST_CASE("grid search") {
  const auto d = blobs(60, 5.0, 1.0, 2);
  SUBCASE("a single point is returned unchanged") {
    const ParamGrid grid{{{"max_depth", {2}}}};
    const auto r = grid_search(make_spec(ModelKind::DT), d, grid, 3);
    CHECK(r.best.at("max_depth") == 2);
    CHECK(r.evaluations.size() == 1);
  }
  SUBCASE("the setting that reaches full recall wins") {
    // A huge min_samples_leaf forces a single leaf predicting the majority.
    std::vector<double> x;
    std::vector<std::uint8_t> y;
    for (int i = 0; i < 90; ++i) {
      x.push_back(i < 60 ? i : i + 40);
      y.push_back(i >= 60);
    }
    const auto sep = data::make_numeric_dataset(1, x, y);
    const ParamGrid grid{{{"min_samples_leaf", {1000, 1}}}};
    const auto r = grid_search(make_spec(ModelKind::DT), sep, grid, 3);
    CHECK(r.best.at("min_samples_leaf") == 1);
    CHECK(r.best_recall == 1.0);
  }
  SUBCASE("cartesian grids are evaluated exhaustively") {
    const ParamGrid grid{{{"hidden_layers", {1, 2}}, {"units", {8, 16}}}};
    CHECK(grid.size() == 4);
    const auto pts = grid.points();
    CHECK(pts[1].at("hidden_layers") == 1);
    CHECK(pts[1].at("units") == 16);
    const auto r = grid_search(make_spec(ModelKind::ANN, {{"epochs", 2}}), d, grid, 2);
    CHECK(r.evaluations.size() == 4);
  }
  SUBCASE("ties go to the first point") {
    const ParamGrid grid{{{"max_depth", {3, 4, 5}}}};
    const auto r = grid_search(make_spec(ModelKind::DT), d, grid, 3);
    double best = -1;
    std::size_t first = 0;
    for (std::size_t i = 0; i < r.evaluations.size(); ++i)
      if (r.evaluations[i].mean_recall > best) {
        best = r.evaluations[i].mean_recall;
        first = i;
      }
    CHECK(r.best == r.evaluations[first].params);
  }
  CHECK_THROWS_AS(grid_search(make_spec(ModelKind::DT), d, ParamGrid{}, 3), ConfigError);
  CHECK_THROWS_AS(grid_search(make_spec(ModelKind::DT), d, ParamGrid{{{"max_depth", {2}}}}, 1), ConfigError);
}
