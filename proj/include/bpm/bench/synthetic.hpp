#pragma once

// Synthetic vintages in the exact pipe-delimited layout, for runs without the
// licensed data.
//
// Signal model: four borrower features (creditScore, originalLoanToValue,
// originalDebtToIncomeRatio, originalInterestRate) are drawn independently;
// the first `informative_features` of them feed a logistic propensity
//   logit = signal * (-z_score + z_ltv + z_dti + z_rate) / sqrt(count)
// and exactly round(customers * rate * rows_per_customer) customers are drawn
// as defaulters by weighted sampling without replacement on exp(logit).
// A defaulter's last row carries a default zeroBalanceCode (03/06/09), a
// rising delinquency status before it, zero UPB and, with probability
// `loss_field_rate`, loss and expense amounts. Some healthy loans show a
// temporary delinquency or prepay (code 01) so the label is not trivial.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bpm/data/layout.hpp"
#include "bpm/data/vintage.hpp"

namespace bpm::bench {

// Per-row default rate presets: Medium 0.05%, High 0.09%, Low 0.01%.
double regime_default_rate(data::Regime r);

struct SyntheticSpec {
  int vintage_year = 2003;
  std::size_t customer_count = 2000;
  std::size_t rows_per_customer = 45;
  std::optional<double> default_rate;  // per joined row; regime preset when empty
  std::size_t informative_features = 4;
  double signal = 1.5;
  double loss_field_rate = 0.7;
  double blank_rate = 0.01;  // blanks in optional origination fields
  std::uint64_t seed = 0;

  double effective_default_rate() const;
  // round(customers * rate * rows_per_customer)
  std::size_t defaulter_count() const;
};

struct SyntheticVintage {
  std::vector<data::OriginationRecord> origination;
  std::vector<data::PerformanceRecord> performance;
  std::size_t defaulted_customers = 0;
};

// Throws ConfigError for an invalid spec.
SyntheticVintage generate_vintage(const SyntheticSpec& spec);

std::string origination_text(const std::vector<data::OriginationRecord>& records);
std::string performance_text(const std::vector<data::PerformanceRecord>& records);

struct GeneratedFiles {
  std::string origination_path;
  std::string performance_path;
  std::size_t defaulted_customers = 0;
  std::size_t rows = 0;
};

// Writes <data_dir>/sample_<year>/sample_{orig,svcg}_<year>.txt. Throws
// DataError when the files cannot be written.
GeneratedFiles write_synthetic(const SyntheticSpec& spec, const std::string& data_dir);

}  // namespace bpm::bench
