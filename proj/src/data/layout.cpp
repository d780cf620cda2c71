#include "bpm/data/layout.hpp"

#include <stdexcept>

#include "bpm/common/error.hpp"
#include "bpm/common/text.hpp"

namespace bpm::data {

namespace {

using K = FieldKind;

constexpr std::array<FieldSpec, 27> kOriginationFields{{
    {"creditScore", K::Numeric, false},
    {"firstPaymentDate", K::Date, false},
    {"firstTimeHomeBuyerFlag", K::Categorical, false},
    {"maturityDate", K::Date, false},
    {"metropolitanDivisionOrMSA", K::Categorical, false},
    {"mortgageInsurancePercentage", K::Numeric, false},
    {"numberOfUnits", K::Numeric, false},
    {"occupancyStatus", K::Categorical, false},
    {"originalCombinedLoanToValue", K::Numeric, false},
    {"originalDebtToIncomeRatio", K::Numeric, false},
    {"originalUPB", K::Numeric, false},
    {"originalLoanToValue", K::Numeric, false},
    {"originalInterestRate", K::Numeric, false},
    {"channel", K::Categorical, false},
    {"prepaymentPenaltyMortgageFlag", K::Categorical, false},
    {"productType", K::Categorical, false},
    {"propertyState", K::Categorical, false},
    {"propertyType", K::Categorical, false},
    {"postalCode", K::Categorical, false},
    {"loanSequenceNumber", K::Key, true},
    {"loanPurpose", K::Categorical, false},
    {"originalLoanTerm", K::Numeric, false},
    {"numberOfBorrowers", K::Numeric, false},
    {"sellerName", K::Categorical, false},
    {"servicerName", K::Categorical, false},
    {"superConformingFlag", K::Categorical, false},
    {"preHarpLoanSequenceNumber", K::Key, false},
}};

constexpr std::array<FieldSpec, 23> kPerformanceFields{{
    {"loanSequenceNumber", K::Key, true},
    {"monthlyReportingPeriod", K::Date, true},
    {"currentActualUPB", K::Numeric, false},
    {"currentLoanDelinquencyStatus", K::Categorical, false},
    {"loanAge", K::Numeric, false},
    {"remainingMonthToLegalMaturity", K::Numeric, false},
    {"repurchaseFlag", K::Categorical, false},
    {"modificationFlag", K::Categorical, false},
    {"zeroBalanceCode", K::Code, false},
    {"zeroBalanceEffectiveDate", K::Date, false},
    {"currentInterestRate", K::Numeric, false},
    {"currentDeferredUPB", K::Numeric, false},
    {"dueDateOfLastPaidInstallment", K::Date, false},
    {"miRecoveries", K::Numeric, false},
    {"netSalesProceeds", K::Numeric, false},
    {"nonMiRecoveries", K::Numeric, false},
    {"expenses", K::Numeric, false},
    {"legalCosts", K::Numeric, false},
    {"maintenanceAndPreservationCosts", K::Numeric, false},
    {"taxesAndInsurance", K::Numeric, false},
    {"miscellaneousExpenses", K::Numeric, false},
    {"actualLossCalculation", K::Numeric, false},
    {"modificationCost", K::Numeric, false},
}};

std::size_t field_or_throw(const Layout& layout, std::string_view name) {
  const auto idx = layout.index_of(name);
  if (!idx) {
    throw DataError("unknown " + std::string(layout.file_kind()) + " field '" + std::string(name) + "'");
  }
  return *idx;
}

}  // namespace

Layout::Layout(std::string_view file_kind, std::span<const FieldSpec> fields)
    : file_kind_(file_kind), fields_(fields), slot_(fields.size()) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (is_numeric_slot(i)) {
      slot_[i] = numeric_slots_++;
    } else {
      slot_[i] = text_slots_++;
    }
    if (fields[i].name == "loanSequenceNumber") key_field_ = i;
  }
}

const Layout& Layout::origination() {
  static const Layout layout("origination", kOriginationFields);
  return layout;
}

const Layout& Layout::performance() {
  static const Layout layout("performance", kPerformanceFields);
  return layout;
}

std::optional<std::size_t> Layout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < fields_.size(); ++i) {
    if (fields_[i].name == name) return i;
  }
  return std::nullopt;
}

bool RecordValues::operator==(const RecordValues& other) const {
  if (numeric.size() != other.numeric.size() || text != other.text) return false;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const bool a = is_missing(numeric[i]);
    const bool b = is_missing(other.numeric[i]);
    if (a != b || (!a && numeric[i] != other.numeric[i])) return false;
  }
  return true;
}

std::optional<ZeroBalanceCode> parse_zero_balance_code(std::string_view text) {
  text = trim(text);
  if (text.empty()) return ZeroBalanceCode::NotApplicable;
  if (text == "01") return ZeroBalanceCode::Prepaid;
  if (text == "03") return ZeroBalanceCode::ForeclosureAlternative;
  if (text == "06") return ZeroBalanceCode::Repurchase;
  if (text == "09") return ZeroBalanceCode::ReoDisposition;
  return std::nullopt;
}

std::string_view to_string(ZeroBalanceCode code) {
  switch (code) {
    case ZeroBalanceCode::NotApplicable:
      return "";
    case ZeroBalanceCode::Prepaid:
      return "01";
    case ZeroBalanceCode::ForeclosureAlternative:
      return "03";
    case ZeroBalanceCode::Repurchase:
      return "06";
    case ZeroBalanceCode::ReoDisposition:
      return "09";
  }
  return "";
}

bool is_default_code(ZeroBalanceCode code) {
  return code == ZeroBalanceCode::ForeclosureAlternative || code == ZeroBalanceCode::Repurchase ||
         code == ZeroBalanceCode::ReoDisposition;
}

namespace {

double number_of(const Layout& layout, const RecordValues& values, std::string_view field) {
  const auto idx = field_or_throw(layout, field);
  if (!layout.is_numeric_slot(idx)) throw DataError("field '" + std::string(field) + "' is not numeric");
  return values.numeric[layout.slot_of(idx)];
}

const std::string& text_of(const Layout& layout, const RecordValues& values, std::string_view field) {
  const auto idx = field_or_throw(layout, field);
  if (layout.is_numeric_slot(idx)) throw DataError("field '" + std::string(field) + "' is not textual");
  return values.text[layout.slot_of(idx)];
}

RecordValues empty_values(const Layout& layout) {
  return RecordValues{std::vector<double>(layout.numeric_slots(), kMissing),
                      std::vector<std::string>(layout.text_slots())};
}

}  // namespace

const std::string& OriginationRecord::loan_id() const {
  const auto& l = Layout::origination();
  return values.text[l.slot_of(l.key_field())];
}

double OriginationRecord::number(std::string_view field) const {
  return number_of(Layout::origination(), values, field);
}

const std::string& OriginationRecord::text(std::string_view field) const {
  return text_of(Layout::origination(), values, field);
}

const std::string& PerformanceRecord::loan_id() const {
  const auto& l = Layout::performance();
  return values.text[l.slot_of(l.key_field())];
}

double PerformanceRecord::number(std::string_view field) const {
  return number_of(Layout::performance(), values, field);
}

const std::string& PerformanceRecord::text(std::string_view field) const {
  return text_of(Layout::performance(), values, field);
}

OriginationRecord make_origination_record() { return {empty_values(Layout::origination())}; }

PerformanceRecord make_performance_record() {
  return {empty_values(Layout::performance()), ZeroBalanceCode::NotApplicable};
}

void set_number(const Layout& layout, RecordValues& values, std::string_view field, double v) {
  const auto idx = field_or_throw(layout, field);
  if (!layout.is_numeric_slot(idx)) throw DataError("field '" + std::string(field) + "' is not numeric");
  values.numeric[layout.slot_of(idx)] = v;
}

void set_text(const Layout& layout, RecordValues& values, std::string_view field, std::string v) {
  const auto idx = field_or_throw(layout, field);
  if (layout.is_numeric_slot(idx)) throw DataError("field '" + std::string(field) + "' is not textual");
  values.text[layout.slot_of(idx)] = std::move(v);
}

std::string format_line(const Layout& layout, const RecordValues& values) {
  std::string line;
  for (std::size_t i = 0; i < layout.field_count(); ++i) {
    if (i > 0) line.push_back('|');
    const auto slot = layout.slot_of(i);
    if (layout.is_numeric_slot(i)) {
      const double v = values.numeric[slot];
      if (!is_missing(v)) line += format_double(v);
    } else {
      line += values.text[slot];
    }
  }
  return line;
}

}  // namespace bpm::data
