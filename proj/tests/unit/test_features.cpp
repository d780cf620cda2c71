#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/features/selection.hpp"

using namespace bpm;
using namespace bpm::features;

namespace {

// x0 decides the label, x1..x3 are noise.
data::Dataset one_informative(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.normal();
    x.push_back(a);
    for (int j = 0; j < 3; ++j) x.push_back(rng.normal());
    y.push_back(a > 0 ? 1 : 0);
  }
  return data::make_numeric_dataset(4, x, y);
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

FeatureScores scores(const std::vector<std::pair<std::string, double>>& v) {
  FeatureScores out;
  for (const auto& [n, s] : v) out.push_back({n, s});
  return out;
}

}  // namespace

TEST_CASE("correlation filter") {
  const std::vector<std::uint8_t> y{0, 1, 0, 1, 1, 0, 0, 1, 0, 1};
  std::vector<double> x;
  for (std::size_t i = 0; i < y.size(); ++i) {
    x.push_back(y[i]);                   // identical to the label
    x.push_back(3.0);                    // constant
    x.push_back(i == 4 ? 0.0 : y[i]);    // one entry flipped
    x.push_back(-2.0 * y[i]);            // perfectly anti-correlated
  }
  const auto d = data::make_numeric_dataset(4, x, y);
  const auto c = correlation_filter(d);
  REQUIRE(c.size() == 4);
  CHECK(c[0].feature == "x0");
  CHECK(c[0].value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c[1].value == 0.0);
  const std::vector<double> yy(y.begin(), y.end());
  CHECK(c[2].value == doctest::Approx(std::abs(pearson(d.column(2), yy))).epsilon(1e-12));
  // 5 positives with one flipped: r = sqrt(2/3).
  CHECK(c[2].value == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-12));
  CHECK(c[3].value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("forest importance ranks the informative feature first") {
  const auto d = one_informative(400, 3);
  const auto imp = rf_importance(d, {{"n_trees", 20}}, 1);
  REQUIRE(imp.size() == 4);
  for (std::size_t j = 1; j < 4; ++j) CHECK(imp[0].value > imp[j].value);
  double sum = 0;
  for (const auto& s : imp) sum += s.value;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a single feature takes all the importance, an unused one none") {
  const auto d = data::make_numeric_dataset(1, {0, 1, 2, 3, 4, 5}, {0, 0, 0, 1, 1, 1});
  CHECK(rf_importance(d, {{"n_trees", 5}}, 1)[0].value == doctest::Approx(1.0));
  const auto c = data::make_numeric_dataset(2, {0, 7, 1, 7, 2, 7, 3, 7, 4, 7, 5, 7}, {0, 0, 0, 1, 1, 1});
  CHECK(rf_importance(c, {{"n_trees", 5}}, 1)[1].value == 0.0);
}

TEST_CASE("masks with the informative feature dominate GA fitness") {
  const auto d = one_informative(600, 5);
  GaParams p;
  p.seed = 2;
  GaFitness fitness(d, p);
  double with = 1.0, without = 0.0;
  for (unsigned bits = 1; bits < 16; ++bits) {
    Mask m(4);
    for (int j = 0; j < 4; ++j) m[j] = (bits >> j) & 1;
    const double f = fitness(m);
    if (m[0]) with = std::min(with, f);
    else without = std::max(without, f);
  }
  CHECK(with > without);
  CHECK(fitness.evaluations() == 15);
}

TEST_CASE("genetic search keeps the informative feature") {
  const auto d = one_informative(600, 8);
  GaParams p;
  p.generations = 30;
  p.seed = 4;
  const auto r = ga_select(d, p);
  CHECK(r.best_mask[0] == 1);
  CHECK(std::find(r.names.begin(), r.names.end(), "x0") != r.names.end());
  CHECK(r.generations_run >= 1);
  CHECK(r.generations_run <= 30);
  CHECK(r.best_fitness_history.size() == r.generations_run);
  for (std::size_t g = 1; g < r.best_fitness_history.size(); ++g)
    CHECK(r.best_fitness_history[g] >= r.best_fitness_history[g - 1]);
}

TEST_CASE("without variation operators the population is a fixed point") {
  const auto d = one_informative(200, 1);
  GaParams p;
  p.population = 6;
  p.generations = 5;
  p.crossover = 0.0;
  p.mutation = 0.0;
  p.stall_generations = 100;
  const Mask fixed{0, 1, 1, 0};
  p.initial_population.assign(6, fixed);
  const auto r = ga_select(d, p);
  CHECK(r.best_mask == fixed);
  CHECK(r.selected == std::vector<std::size_t>{1, 2});
  CHECK(r.evaluations == 1);
}

TEST_CASE("crosscheck discards only on a unanimous verdict") {
  const auto corr = scores({{"taxesAndInsurance", 0.095}, {"a", 0.15}, {"b", 0.02}, {"c", 0.01}});
  const auto imp = scores({{"taxesAndInsurance", 0.0}, {"a", 0.0}, {"b", 0.2}, {"c", 0.0}});
  const auto v = crosscheck_discard(corr, imp, {"c"});
  REQUIRE(v.size() == 4);
  CHECK(v[0].discarded);
  CHECK_FALSE(v[1].discarded);
  CHECK_FALSE(v[2].discarded);
  CHECK_FALSE(v[3].discarded);
  CHECK(v[3].ga_survived);
  CHECK_THROWS_AS(crosscheck_discard(corr, scores({{"x", 0}}), {}), DataError);
  CHECK_THROWS_AS(crosscheck_discard(corr, imp, {"zzz"}), DataError);
}

TEST_CASE("crosscheck is order-equivariant and monotone") {
  const auto corr = scores({{"a", 0.05}, {"b", 0.02}, {"c", 0.3}});
  const auto imp = scores({{"a", 0.0}, {"b", 0.0}, {"c", 0.0}});
  const auto v = crosscheck_discard(corr, imp, {});
  const auto w = crosscheck_discard(scores({{"c", 0.3}, {"a", 0.05}, {"b", 0.02}}),
                                    scores({{"b", 0.0}, {"c", 0.0}, {"a", 0.0}}), {});
  CHECK(w[0].feature == "c");
  CHECK(w[0].discarded == v[2].discarded);
  CHECK(w[1].discarded == v[0].discarded);
  CHECK(w[2].discarded == v[1].discarded);
  // Raising any signal never turns a retained feature into a discarded one.
  for (std::size_t i = 0; i < 3; ++i) {
    auto c2 = corr;
    c2[i].value += 0.5;
    auto i2 = imp;
    i2[i].value += 0.5;
    CHECK_FALSE(crosscheck_discard(c2, imp, {})[i].discarded);
    CHECK_FALSE(crosscheck_discard(corr, i2, {})[i].discarded);
    CHECK_FALSE(crosscheck_discard(corr, imp, {corr[i].feature})[i].discarded);
  }
}

TEST_CASE("the published deleted-feature list satisfies the discard rule") {
  const std::vector<std::pair<std::string, double>> table{
      {"taxesAndInsurance", 0.095},
      {"superConformingFlag", 0.004},
      {"repurchaseFlag", 0.006},
      {"remainingMonthToLegalMaturity", 0.033},
      {"originalLoanTerm", 0.053},
      {"numberOfBorrowers", 0.024},
      {"monthlyReportingPeriod", 0.094},
      {"modificationCost", 0.013},
      {"miscellaneousExpenses", 0.012},
      {"miRecoveries", 0.075},
      {"maintenanceAndPreservationCosts", 0.096},
      {"loanAge", 0.092},
      {"estimatedLoandToValue", 0.0},
      {"sellerName", 0.00997},
      {"ServicerName", 0.00603},
  };
  std::vector<std::pair<std::string, double>> zeros;
  for (const auto& [n, c] : table) zeros.push_back({n, 0.0});
  const auto v = crosscheck_discard(scores(table), scores(zeros), {});
  REQUIRE(v.size() == 15);
  for (const auto& f : v) CHECK(f.discarded);
}

TEST_CASE("verdict csv") {
  const auto v = crosscheck_discard(scores({{"a", 0.05}}), scores({{"a", 0.0}}), {});
  const auto csv = verdicts_to_csv(v);
  CHECK(csv.rfind("feature,rf_importance,ga_survived,corr_with_target,discarded\n", 0) == 0);
  CHECK(csv.find("a,0,0,0.05,1") != std::string::npos);
}
