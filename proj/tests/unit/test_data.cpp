#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "bpm/common/error.hpp"
#include "bpm/data/dataset.hpp"
#include "bpm/data/encode.hpp"
#include "bpm/data/layout.hpp"
#include "bpm/data/partition.hpp"
#include "bpm/data/vintage.hpp"
#include "fixtures.hpp"

using namespace bpm;
using namespace bpm::data;

TEST_CASE("layouts have the published field counts") {
  CHECK(Layout::origination().field_count() == 27);
  CHECK(Layout::performance().field_count() == 23);
  CHECK(Layout::performance().index_of("zeroBalanceCode").has_value());
  CHECK_FALSE(Layout::origination().index_of("nope").has_value());
}

TEST_CASE("zero balance codes") {
  CHECK(parse_zero_balance_code("") == ZeroBalanceCode::NotApplicable);
  CHECK(parse_zero_balance_code("01") == ZeroBalanceCode::Prepaid);
  CHECK(parse_zero_balance_code("03") == ZeroBalanceCode::ForeclosureAlternative);
  CHECK(parse_zero_balance_code("06") == ZeroBalanceCode::Repurchase);
  CHECK(parse_zero_balance_code("09") == ZeroBalanceCode::ReoDisposition);
  CHECK_FALSE(parse_zero_balance_code("02").has_value());
  CHECK(is_default_code(ZeroBalanceCode::ForeclosureAlternative));
  CHECK(is_default_code(ZeroBalanceCode::Repurchase));
  CHECK(is_default_code(ZeroBalanceCode::ReoDisposition));
  CHECK_FALSE(is_default_code(ZeroBalanceCode::Prepaid));
  CHECK_FALSE(is_default_code(ZeroBalanceCode::NotApplicable));
}

TEST_CASE("parsing a performance line keeps its zero balance code") {
  const auto o = fixtures::origination("F1");
  const auto p = fixtures::performance("F1", 200301, "03");
  std::istringstream orig(fixtures::lines(Layout::origination(), {o.values}));
  std::istringstream perf(fixtures::lines(Layout::performance(), {p.values}));
  const auto parsed = parse_vintage(orig, perf);
  REQUIRE(parsed.performance.size() == 1);
  CHECK(parsed.performance[0].zero_balance_code == ZeroBalanceCode::ForeclosureAlternative);
  CHECK(parsed.performance[0].text("zeroBalanceCode") == "03");
  CHECK(parsed.origination[0] == o);
}

TEST_CASE("empty files parse to empty lists") {
  std::istringstream orig(""), perf("");
  const auto parsed = parse_vintage(orig, perf);
  CHECK(parsed.origination.empty());
  CHECK(parsed.performance.empty());
  CHECK(parsed.issues.empty());
}

TEST_CASE("a short performance line is rejected with its line number") {
  const auto p = fixtures::performance("F1", 200301);
  std::string good = format_line(Layout::performance(), p.values);
  std::string bad = good.substr(0, good.rfind('|'));  // 22 fields
  std::istringstream orig("");
  std::istringstream perf(good + "\n" + bad + "\n");
  try {
    parse_vintage(orig, perf);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("22") != std::string::npos);
  }
  std::istringstream orig2("");
  std::istringstream perf2(good + "\n" + bad + "\n");
  const auto lenient = parse_vintage(orig2, perf2, {.strict = false});
  CHECK(lenient.performance.size() == 1);
  REQUIRE(lenient.issues.size() == 1);
  CHECK(lenient.issues[0].line == 2);
}

TEST_CASE("missing files name the path") {
  try {
    parse_vintage_files("/nonexistent/a.txt", "/nonexistent/b.txt");
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/a.txt") != std::string::npos);
  }
}

TEST_CASE("regimes cover 1999-2017") {
  for (int y = 1999; y <= 2017; ++y) {
    const Regime expected = y <= 2004 ? Regime::Medium : (y <= 2010 ? Regime::High : Regime::Low);
    CHECK(assign_regime(y) == expected);
  }
  CHECK(assign_regime(2003) == Regime::Medium);
  CHECK(assign_regime(2008) == Regime::High);
  CHECK(assign_regime(2015) == Regime::Low);
  CHECK_THROWS_AS(assign_regime(1998), DataError);
  CHECK_THROWS_AS(assign_regime(2018), DataError);
  CHECK(parse_regime(to_string(Regime::High)) == Regime::High);
}

TEST_CASE("cleaning drops incomplete loans and imputes the rest") {
  auto keep = fixtures::origination("A");
  auto drop = fixtures::origination("B");
  set_number(Layout::origination(), drop.values, "creditScore", kMissing);
  set_text(Layout::origination(), keep.values, "propertyType", "");
  std::vector<PerformanceRecord> perf{fixtures::performance("A", 200301), fixtures::performance("B", 200301),
                                      fixtures::performance("B", 200302)};
  const auto cleaned = clean({keep, drop}, perf);
  REQUIRE(cleaned.origination.size() == 1);
  CHECK(cleaned.origination[0].loan_id() == "A");
  CHECK(cleaned.performance.size() == 1);
  CHECK(cleaned.report.dropped_loans == 1);
  CHECK(cleaned.report.dropped_performance_rows == 2);
  CHECK(cleaned.origination[0].text("propertyType") == kNotAvailable);
  CHECK(cleaned.performance[0].number("miRecoveries") == 0.0);
  for (double v : cleaned.origination[0].values.numeric) CHECK_FALSE(is_missing(v));
  for (double v : cleaned.performance[0].values.numeric) CHECK_FALSE(is_missing(v));
}

TEST_CASE("labels come from each row's own zero balance code") {
  std::vector<OriginationRecord> orig{fixtures::origination("A")};
  std::vector<PerformanceRecord> perf{fixtures::performance("A", 200301, ""),
                                      fixtures::performance("A", 200302, "01"),
                                      fixtures::performance("A", 200303, "06"),
                                      fixtures::performance("A", 200304, "09"),
                                      fixtures::performance("A", 200305, "03"),
                                      fixtures::performance("Z", 200301, "03")};
  const auto joined = join_and_label(orig, perf, 2008);
  CHECK(joined.report.orphan_performance_rows == 1);
  const auto& v = joined.vintage;
  CHECK(v.regime == Regime::High);
  REQUIRE(v.rows.size() == 5);
  const std::vector<int> expected{0, 0, 1, 1, 1};
  for (std::size_t i = 0; i < 5; ++i) CHECK(v.rows[i].defaulted == expected[i]);
  CHECK(v.defaulted_rows() == 3);
  CHECK(v.defaulted_customers() == 1);
}

TEST_CASE("labeling ignores every field but the code") {
  auto p = fixtures::performance("A", 200301, "09");
  set_number(Layout::performance(), p.values, "currentActualUPB", 0);
  set_text(Layout::performance(), p.values, "currentLoanDelinquencyStatus", "5");
  const auto a = join_and_label({fixtures::origination("A", 500)}, {p}, 2003).vintage;
  const auto b = join_and_label({fixtures::origination("A", 800)}, {fixtures::performance("A", 200301, "09")}, 2003).vintage;
  CHECK(a.rows[0].defaulted == b.rows[0].defaulted);
}

TEST_CASE("stratified sampling allocates proportionally") {
  const auto v = fixtures::vintage(1000, 20);
  const auto s = stratified_sample(v, 100, 7);
  CHECK(s.customer_count() == 100);
  CHECK(s.defaulted_customers() == 2);
  CHECK(s.rows.size() == 300);
  CHECK(stratified_sample(v, 0, 7).rows.empty());
  CHECK_THROWS_AS(stratified_sample(v, 1001, 7), DataError);
  const auto again = stratified_sample(v, 100, 7);
  CHECK(again.origination == s.origination);
  CHECK(again.performance == s.performance);
}

TEST_CASE("sampled customers keep all rows in order") {
  const auto v = fixtures::vintage(50, 5, 4);
  const auto s = stratified_sample(v, 10, 3);
  REQUIRE(s.rows.size() == 40);
  for (std::size_t i = 0; i < s.rows.size(); i += 4) {
    const auto& id = s.performance[s.rows[i].performance_index].loan_id();
    for (std::size_t m = 1; m < 4; ++m) {
      const auto& p = s.performance[s.rows[i + m].performance_index];
      CHECK(p.loan_id() == id);
      CHECK(p.number("monthlyReportingPeriod") > s.performance[s.rows[i + m - 1].performance_index].number("monthlyReportingPeriod"));
    }
  }
}

TEST_CASE("encoding gives distinct codes and rejects dates") {
  std::vector<OriginationRecord> orig{fixtures::origination("A", 700, "TN"), fixtures::origination("B", 710, "TX")};
  std::vector<PerformanceRecord> perf{fixtures::performance("A", 200301), fixtures::performance("B", 200301)};
  const auto v = join_and_label(orig, perf, 2003).vintage;
  const auto enc = Encoder::fit(v, {"propertyState", "creditScore"});
  const auto d = enc.transform(v);
  REQUIRE(d.cols() == 2);
  CHECK(d.columns()[0].kind == ColumnKind::Categorical);
  CHECK(d.at(0, 0) != d.at(1, 0));
  CHECK(d.at(0, 1) == 700);
  CHECK(enc.vocabulary("propertyState")[0] == kNotAvailable);

  CHECK_THROWS_AS(Encoder::fit(v, {"firstPaymentDate"}), DataError);
  CHECK_THROWS_AS(Encoder::fit(v, {"monthlyReportingPeriod"}), DataError);
  CHECK_THROWS_AS(Encoder::fit(v, {"loanSequenceNumber"}), DataError);
  CHECK_THROWS_AS(Encoder::fit(v, {"zeroBalanceCode"}), DataError);
  CHECK_THROWS_AS(Encoder::fit(v, {"noSuchField"}), DataError);

  const auto other = join_and_label({fixtures::origination("C", 720, "WY")}, {fixtures::performance("C", 200301)}, 2003).vintage;
  CHECK(enc.transform(other).at(0, 0) == 0.0);
}

TEST_CASE("default feature set has no dates, keys or the code") {
  const auto names = default_feature_names();
  for (const auto& n : names) {
    const auto* f = find_joined_field(n);
    REQUIRE(f != nullptr);
    CHECK(f->kind != FieldKind::Date);
    CHECK(f->kind != FieldKind::Key);
    CHECK(f->kind != FieldKind::Code);
  }
  CHECK(std::find(names.begin(), names.end(), "taxesAndInsurance") != names.end());
}

TEST_CASE("datasets validate and checksum") {
  CHECK_THROWS_AS(make_numeric_dataset(2, {1, 2, 3}, {0, 1}), DataError);
  CHECK_THROWS_AS(make_numeric_dataset(1, {1, std::numeric_limits<double>::infinity()}, {0, 1}), DataError);
  auto a = make_numeric_dataset(1, {1, 2}, {0, 1});
  auto b = make_numeric_dataset(1, {1, 2}, {0, 1});
  CHECK(a.checksum() == b.checksum());
  auto c = make_numeric_dataset(1, {1, 3}, {0, 1});
  CHECK(a.checksum() != c.checksum());
  const std::vector<std::size_t> idx{1};
  CHECK(a.select_rows(idx).at(0, 0) == 2);
}

TEST_CASE("group holdout keeps customers whole and stratifies") {
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  std::vector<std::uint32_t> g;
  for (std::uint32_t c = 0; c < 100; ++c) {
    for (int r = 0; r < 3; ++r) {
      x.push_back(c);
      y.push_back(c < 10 && r == 2 ? 1 : 0);
      g.push_back(c);
    }
  }
  const Dataset d({{"x"}}, x, y, g);
  const auto flags = stratified_group_holdout(d, 0.3, 5);
  std::set<std::uint32_t> held, pos;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (flags[i]) {
      held.insert(g[i]);
      if (g[i] < 10) pos.insert(g[i]);
    }
    CHECK(flags[i] == flags[i - i % 3]);
  }
  CHECK(held.size() == 30);
  CHECK(pos.size() == 3);
  CHECK(stratified_group_holdout(d, 0.3, 5) == flags);

  const auto folds = stratified_group_folds(d, 3, 1);
  std::vector<int> pos_per_fold(3, 0);
  for (std::uint32_t c = 0; c < 10; ++c) ++pos_per_fold[folds[c * 3]];
  for (int n : pos_per_fold) CHECK((n == 3 || n == 4));
}

TEST_CASE("group holdout needs two groups per class") {
  const auto d = make_numeric_dataset(1, {0, 1, 2, 3}, {0, 0, 0, 1});
  CHECK_THROWS_AS(stratified_group_holdout(d, 0.3, 1), DataError);
}
