#include "bpm/bench/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numeric>

#include <fmt/format.h>

#include "bpm/bench/config.hpp"
#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"

namespace bpm::bench {

namespace {

using data::Layout;

constexpr std::array kStates{"CA", "TX", "FL", "NY", "IL", "PA", "OH", "GA", "NC", "MI", "TN", "AZ", "WA", "CO"};
constexpr std::array kSellers{"Other sellers", "Wells Fargo Bank, N.A.", "Bank of America, N.A.",
                              "JPMorgan Chase Bank, N.A.", "Quicken Loans Inc."};
constexpr std::array kServicers{"Other servicers", "Wells Fargo Bank, N.A.", "Specialized Loan Servicing LLC",
                                "JPMorgan Chase Bank, N.A."};
constexpr std::array kMsa{"12060", "16980", "19100", "26420", "31080", "33100", "35620", "37980", "47900"};
constexpr std::array kPropertyTypes{"SF", "PU", "CO", "MH", "CP"};
constexpr std::array kChannels{"R", "B", "C", "T"};
constexpr std::array kPurposes{"P", "C", "N"};
constexpr std::array kOccupancy{"P", "I", "S"};

template <std::size_t N>
std::string pick(Rng& rng, const std::array<const char*, N>& values) {
  return values[rng.below(N)];
}

double clamp_round(double v, double lo, double hi, double step) {
  return std::clamp(std::round(v / step) * step, lo, hi);
}

int add_months(int yyyymm, int months) {
  const int total = (yyyymm / 100) * 12 + (yyyymm % 100 - 1) + months;
  return (total / 12) * 100 + total % 12 + 1;
}

struct Borrower {
  double credit_score;
  double ltv;
  double dti;
  double rate;
};

// Means and spreads of the four informative features.
constexpr double kScoreMean = 720.0, kScoreSd = 50.0;
constexpr double kLtvMean = 75.0, kLtvSd = 12.0;
constexpr double kDtiMean = 34.0, kDtiSd = 9.0;
constexpr double kRateMean = 6.0, kRateSd = 0.9;

}  // namespace

double regime_default_rate(data::Regime r) {
  switch (r) {
    case data::Regime::Medium: return 0.0005;
    case data::Regime::High: return 0.0009;
    case data::Regime::Low: return 0.0001;
  }
  return 0.0005;
}

double SyntheticSpec::effective_default_rate() const {
  return default_rate ? *default_rate : regime_default_rate(data::assign_regime(vintage_year));
}

std::size_t SyntheticSpec::defaulter_count() const {
  return static_cast<std::size_t>(std::llround(static_cast<double>(customer_count) * effective_default_rate() *
                                               static_cast<double>(rows_per_customer)));
}

SyntheticVintage generate_vintage(const SyntheticSpec& spec) {
  data::assign_regime(spec.vintage_year);
  const double rate = spec.effective_default_rate();
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("synthetic default rate must lie in [0, 1]");
  if (spec.rows_per_customer < 2) throw ConfigError("synthetic data needs at least two rows per customer");
  if (spec.informative_features < 1 || spec.informative_features > 4) {
    throw ConfigError("synthetic informative feature count must be between 1 and 4");
  }
  if (!(spec.loss_field_rate >= 0.0 && spec.loss_field_rate <= 1.0) || !(spec.blank_rate >= 0.0 && spec.blank_rate <= 1.0)) {
    throw ConfigError("synthetic probabilities must lie in [0, 1]");
  }
  const std::size_t n = spec.customer_count;
  const std::size_t defaulters = spec.defaulter_count();
  if (defaulters > n) throw ConfigError("synthetic default rate asks for more defaulters than customers");

  Rng rng(derive_seed(spec.seed, "synthetic/" + std::to_string(spec.vintage_year)));

  std::vector<Borrower> borrowers(n);
  std::vector<double> logit(n);
  const double norm = std::sqrt(static_cast<double>(spec.informative_features));
  for (std::size_t c = 0; c < n; ++c) {
    auto& b = borrowers[c];
    b.credit_score = clamp_round(rng.normal(kScoreMean, kScoreSd), 300, 850, 1);
    b.ltv = clamp_round(rng.normal(kLtvMean, kLtvSd), 6, 105, 1);
    b.dti = clamp_round(rng.normal(kDtiMean, kDtiSd), 1, 65, 1);
    b.rate = clamp_round(rng.normal(kRateMean, kRateSd), 2.5, 11, 0.125);
    const double z[4] = {-(b.credit_score - kScoreMean) / kScoreSd, (b.ltv - kLtvMean) / kLtvSd,
                         (b.dti - kDtiMean) / kDtiSd, (b.rate - kRateMean) / kRateSd};
    double s = 0.0;
    for (std::size_t k = 0; k < spec.informative_features; ++k) s += z[k];
    logit[c] = spec.signal * s / norm;
  }

  // Weighted sampling without replacement: keep the largest log(u) / w.
  std::vector<std::uint8_t> defaulted(n, 0);
  {
    std::vector<std::pair<double, std::size_t>> keys(n);
    for (std::size_t c = 0; c < n; ++c) {
      const double u = std::max(rng.uniform(), 1e-300);
      keys[c] = {std::log(u) * std::exp(-logit[c]), c};
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(defaulters), keys.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    for (std::size_t k = 0; k < defaulters; ++k) defaulted[keys[k].second] = 1;
  }

  const auto& ol = Layout::origination();
  const auto& pl = Layout::performance();
  SyntheticVintage out;
  out.defaulted_customers = defaulters;
  out.origination.reserve(n);
  out.performance.reserve(n * spec.rows_per_customer);
  const int yy = spec.vintage_year % 100;

  for (std::size_t c = 0; c < n; ++c) {
    const auto& b = borrowers[c];
    auto rec = data::make_origination_record();
    auto& v = rec.values;
    auto maybe_blank = [&](std::string s) { return rng.uniform() < spec.blank_rate ? std::string() : s; };
    const int quarter = static_cast<int>(rng.below(4)) + 1;
    const int first_payment = spec.vintage_year * 100 + (quarter - 1) * 3 + static_cast<int>(rng.below(3)) + 1;
    const double term = rng.bernoulli(0.85) ? 360 : (rng.bernoulli(0.5) ? 180 : 240);
    const double upb = std::round(rng.uniform(60, 450)) * 1000;
    const std::string loan_id = fmt::format("F{:02d}Q{}{:07d}", yy, quarter, c + 1);

    data::set_number(ol, v, "creditScore", b.credit_score);
    data::set_number(ol, v, "firstPaymentDate", first_payment);
    data::set_text(ol, v, "firstTimeHomeBuyerFlag", maybe_blank(rng.bernoulli(0.2) ? "Y" : "N"));
    data::set_number(ol, v, "maturityDate", add_months(first_payment, static_cast<int>(term) - 1));
    data::set_text(ol, v, "metropolitanDivisionOrMSA", maybe_blank(pick(rng, kMsa)));
    data::set_number(ol, v, "mortgageInsurancePercentage", b.ltv > 80 ? std::min(35.0, std::round(b.ltv - 70)) : 0);
    data::set_number(ol, v, "numberOfUnits", rng.bernoulli(0.95) ? 1 : 2);
    data::set_text(ol, v, "occupancyStatus", pick(rng, kOccupancy));
    data::set_number(ol, v, "originalCombinedLoanToValue", std::min(105.0, b.ltv + (rng.bernoulli(0.2) ? 5 : 0)));
    data::set_number(ol, v, "originalDebtToIncomeRatio", b.dti);
    data::set_number(ol, v, "originalUPB", upb);
    data::set_number(ol, v, "originalLoanToValue", b.ltv);
    data::set_number(ol, v, "originalInterestRate", b.rate);
    data::set_text(ol, v, "channel", pick(rng, kChannels));
    data::set_text(ol, v, "prepaymentPenaltyMortgageFlag", "N");
    data::set_text(ol, v, "productType", "FRM");
    data::set_text(ol, v, "propertyState", pick(rng, kStates));
    data::set_text(ol, v, "propertyType", maybe_blank(pick(rng, kPropertyTypes)));
    data::set_text(ol, v, "postalCode", fmt::format("{:03d}00", rng.below(999) + 1));
    data::set_text(ol, v, "loanSequenceNumber", loan_id);
    data::set_text(ol, v, "loanPurpose", pick(rng, kPurposes));
    data::set_number(ol, v, "originalLoanTerm", term);
    data::set_number(ol, v, "numberOfBorrowers", rng.bernoulli(0.55) ? 2 : 1);
    data::set_text(ol, v, "sellerName", pick(rng, kSellers));
    data::set_text(ol, v, "servicerName", pick(rng, kServicers));
    data::set_text(ol, v, "superConformingFlag", rng.bernoulli(0.03) ? "Y" : "");
    out.origination.push_back(std::move(rec));

    const std::size_t rows = spec.rows_per_customer;
    const bool is_default = defaulted[c] != 0;
    const bool prepaid = !is_default && rng.bernoulli(0.1);
    // Months of delinquency before the terminal default row.
    const std::size_t ramp = is_default ? 3 + static_cast<std::size_t>(rng.below(6)) : 0;
    // A temporary, cured delinquency on some healthy loans.
    const bool episode = !is_default && rng.bernoulli(0.04);
    const std::size_t episode_start = episode ? static_cast<std::size_t>(rng.below(rows - 1)) : rows;
    const std::size_t episode_len = 1 + static_cast<std::size_t>(rng.below(4));
    const bool modified = is_default ? rng.bernoulli(0.25) : rng.bernoulli(0.005);

    for (std::size_t m = 0; m < rows; ++m) {
      auto pr = data::make_performance_record();
      auto& pv = pr.values;
      const int period = add_months(first_payment, static_cast<int>(m));
      const bool terminal = m + 1 == rows;
      const double age = static_cast<double>(m + 1);
      double balance = std::round(upb * std::max(0.0, 1.0 - age / term * 0.8) * 100) / 100;

      int delinquency = 0;
      if (is_default && m + ramp + 1 >= rows) delinquency = static_cast<int>(m + ramp + 2 - rows);
      if (episode && m >= episode_start && m < episode_start + episode_len) {
        delinquency = static_cast<int>(m - episode_start) + 1;
      }

      data::set_text(pl, pv, "loanSequenceNumber", loan_id);
      data::set_number(pl, pv, "monthlyReportingPeriod", period);
      data::set_text(pl, pv, "currentLoanDelinquencyStatus", std::to_string(delinquency));
      data::set_number(pl, pv, "loanAge", age);
      data::set_number(pl, pv, "remainingMonthToLegalMaturity", term - age);
      data::set_text(pl, pv, "modificationFlag", modified && m + 12 >= rows ? "Y" : "");
      data::set_number(pl, pv, "currentInterestRate", b.rate);
      data::set_number(pl, pv, "currentDeferredUPB", 0);

      if (terminal && (is_default || prepaid)) {
        data::ZeroBalanceCode code = data::ZeroBalanceCode::Prepaid;
        if (is_default) {
          const double u = rng.uniform();
          code = u < 0.3 ? data::ZeroBalanceCode::ForeclosureAlternative
                         : (u < 0.4 ? data::ZeroBalanceCode::Repurchase : data::ZeroBalanceCode::ReoDisposition);
        }
        pr.zero_balance_code = code;
        data::set_text(pl, pv, "zeroBalanceCode", std::string(data::to_string(code)));
        data::set_number(pl, pv, "zeroBalanceEffectiveDate", period);
        data::set_text(pl, pv, "repurchaseFlag", code == data::ZeroBalanceCode::Repurchase ? "Y" : "N");
        balance = 0;
        if (is_default) {
          data::set_number(pl, pv, "dueDateOfLastPaidInstallment", add_months(period, -static_cast<int>(ramp)));
          if (rng.uniform() < spec.loss_field_rate) {
            const double sale = std::round(upb * rng.uniform(0.4, 0.9));
            const double expenses = std::round(upb * rng.uniform(0.02, 0.08));
            data::set_number(pl, pv, "netSalesProceeds", sale);
            data::set_number(pl, pv, "miRecoveries", b.ltv > 80 ? std::round(upb * 0.05) : 0);
            data::set_number(pl, pv, "nonMiRecoveries", std::round(upb * rng.uniform(0.0, 0.02)));
            data::set_number(pl, pv, "expenses", -expenses);
            data::set_number(pl, pv, "legalCosts", -std::round(expenses * 0.3));
            data::set_number(pl, pv, "maintenanceAndPreservationCosts", -std::round(expenses * 0.3));
            data::set_number(pl, pv, "taxesAndInsurance", -std::round(expenses * 0.3));
            data::set_number(pl, pv, "miscellaneousExpenses", -std::round(expenses * 0.1));
            data::set_number(pl, pv, "actualLossCalculation", -std::round(upb - sale + expenses));
          }
        }
      }
      data::set_number(pl, pv, "currentActualUPB", balance);
      out.performance.push_back(std::move(pr));
    }
  }
  return out;
}

std::string origination_text(const std::vector<data::OriginationRecord>& records) {
  std::string out;
  for (const auto& r : records) out += data::format_line(data::Layout::origination(), r.values) + "\n";
  return out;
}

std::string performance_text(const std::vector<data::PerformanceRecord>& records) {
  std::string out;
  for (const auto& r : records) out += data::format_line(data::Layout::performance(), r.values) + "\n";
  return out;
}

GeneratedFiles write_synthetic(const SyntheticSpec& spec, const std::string& data_dir) {
  const auto vintage = generate_vintage(spec);
  GeneratedFiles files;
  files.origination_path = origination_path(data_dir, spec.vintage_year);
  files.performance_path = performance_path(data_dir, spec.vintage_year);
  std::error_code ec;
  std::filesystem::create_directories(std::filesystem::path(files.origination_path).parent_path(), ec);
  if (ec) throw DataError("cannot create directory for " + files.origination_path + ": " + ec.message());
  write_file(files.origination_path, origination_text(vintage.origination));
  write_file(files.performance_path, performance_text(vintage.performance));
  files.defaulted_customers = vintage.defaulted_customers;
  files.rows = vintage.performance.size();
  return files;
}

}  // namespace bpm::bench
