#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "bpm/data/layout.hpp"

namespace bpm::data {

enum class Regime : std::uint8_t { Low, Medium, High };

inline constexpr int kFirstVintage = 1999;
inline constexpr int kLastVintage = 2017;

// 1999-2004 Medium, 2005-2010 High, 2011-2017 Low. Throws DataError outside
// 1999-2017.
Regime assign_regime(int vintage_year);
std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);

// -- parsing ---------------------------------------------------------------

struct ParseIssue {
  std::string source;
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct ParseOptions {
  // strict: the first malformed line throws ParseError.
  // lenient: malformed lines are skipped and reported in `issues`.
  bool strict = true;
};

struct ParsedVintage {
  std::vector<OriginationRecord> origination;
  std::vector<PerformanceRecord> performance;
  std::vector<ParseIssue> issues;
  std::size_t coerced_cells = 0;  // unparseable optional numerics set to missing
};

ParsedVintage parse_vintage(std::istream& origination, std::istream& performance,
                            const ParseOptions& options = {});
// Throws DataError naming the path when a file cannot be read.
ParsedVintage parse_vintage_files(const std::string& origination_path,
                                  const std::string& performance_path,
                                  const ParseOptions& options = {});

// -- cleaning --------------------------------------------------------------

struct CleaningReport {
  std::size_t dropped_loans = 0;             // missing a key origination field
  std::size_t dropped_performance_rows = 0;  // rows of dropped loans
  std::size_t imputed_categorical = 0;       // blank -> "Not Available"
  std::size_t imputed_numeric = 0;           // blank -> 0
};

struct CleanedVintage {
  std::vector<OriginationRecord> origination;
  std::vector<PerformanceRecord> performance;
  CleaningReport report;
};

// Loans missing creditScore, originalLoanToValue, originalDebtToIncomeRatio or
// originalInterestRate are removed together with their performance rows.
// Remaining blanks: categorical -> "Not Available", numeric/date -> 0.
CleanedVintage clean(std::vector<OriginationRecord> origination,
                     std::vector<PerformanceRecord> performance);

// -- join and label ----------------------------------------------------------

// One joined row: a performance record concatenated with its loan's
// origination record. Indices point into the owning LabeledVintage.
struct LoanRecord {
  std::uint32_t origination_index = 0;
  std::uint32_t performance_index = 0;
  std::uint8_t defaulted = 0;
};

struct LabeledVintage {
  int vintage_year = 0;
  Regime regime = Regime::Medium;
  std::vector<OriginationRecord> origination;
  std::vector<PerformanceRecord> performance;
  std::vector<LoanRecord> rows;

  std::size_t customer_count() const;
  std::size_t defaulted_rows() const;
  // Customers with at least one defaulted row.
  std::size_t defaulted_customers() const;
};

struct JoinReport {
  std::size_t orphan_performance_rows = 0;
};

struct JoinResult {
  LabeledVintage vintage;
  JoinReport report;
};

// defaulted is taken from each performance row's own zeroBalanceCode.
JoinResult join_and_label(std::vector<OriginationRecord> origination,
                          std::vector<PerformanceRecord> performance, int vintage_year);

// Joined field inventory: every origination field followed by every
// performance field except loanSequenceNumber and zeroBalanceCode.
struct JoinedField {
  std::string_view name;
  FieldKind kind;
  bool from_origination;
  std::size_t field;  // index in the source layout
};
const std::vector<JoinedField>& joined_fields();
const JoinedField* find_joined_field(std::string_view name);

double joined_number(const LabeledVintage& v, const LoanRecord& r, const JoinedField& f);
const std::string& joined_text(const LabeledVintage& v, const LoanRecord& r, const JoinedField& f);

// -- sampling -----------------------------------------------------------------

// Customer-level stratified sample on default status. Stratum sizes use
// largest-remainder proportional allocation, so each stratum is within one
// customer of its exact proportional share. All rows of a sampled customer
// are kept, in their original order. Throws DataError if customer_count
// exceeds the available customers.
LabeledVintage stratified_sample(const LabeledVintage& vintage, std::size_t customer_count,
                                 std::uint64_t seed);

}  // namespace bpm::data
