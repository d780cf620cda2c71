#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "bpm/data/layout.hpp"
#include "bpm/data/vintage.hpp"

namespace fixtures {

inline bpm::data::OriginationRecord origination(const std::string& id, double credit_score = 720,
                                                const std::string& state = "TN") {
  using namespace bpm::data;
  const auto& L = Layout::origination();
  auto r = make_origination_record();
  set_text(L, r.values, "loanSequenceNumber", id);
  set_number(L, r.values, "creditScore", credit_score);
  set_number(L, r.values, "originalLoanToValue", 80);
  set_number(L, r.values, "originalDebtToIncomeRatio", 35);
  set_number(L, r.values, "originalInterestRate", 5.5);
  set_number(L, r.values, "originalUPB", 200000);
  set_text(L, r.values, "propertyState", state);
  set_text(L, r.values, "propertyType", "SF");
  return r;
}

inline bpm::data::PerformanceRecord performance(const std::string& id, double period, const std::string& code = "") {
  using namespace bpm::data;
  const auto& L = Layout::performance();
  auto r = make_performance_record();
  set_text(L, r.values, "loanSequenceNumber", id);
  set_number(L, r.values, "monthlyReportingPeriod", period);
  set_number(L, r.values, "currentActualUPB", 150000);
  set_text(L, r.values, "currentLoanDelinquencyStatus", "0");
  set_text(L, r.values, "zeroBalanceCode", code);
  r.zero_balance_code = *parse_zero_balance_code(code);
  return r;
}

inline std::string lines(const bpm::data::Layout& layout, const std::vector<bpm::data::RecordValues>& rows) {
  std::string out;
  for (const auto& r : rows) out += bpm::data::format_line(layout, r) + "\n";
  return out;
}

// `customers` loans with `rows` monthly records each; the first `defaulters`
// loans end with code 03.
inline bpm::data::LabeledVintage vintage(std::size_t customers, std::size_t defaulters, std::size_t rows = 3,
                                         int year = 2003) {
  std::vector<bpm::data::OriginationRecord> orig;
  std::vector<bpm::data::PerformanceRecord> perf;
  for (std::size_t c = 0; c < customers; ++c) {
    const std::string id = "F" + std::to_string(100000 + c);
    orig.push_back(origination(id, 600 + static_cast<double>(c % 200)));
    for (std::size_t m = 0; m < rows; ++m) {
      const bool last = m + 1 == rows;
      perf.push_back(performance(id, 200301 + static_cast<double>(m), last && c < defaulters ? "03" : ""));
    }
  }
  return bpm::data::join_and_label(std::move(orig), std::move(perf), year).vintage;
}

}  // namespace fixtures
