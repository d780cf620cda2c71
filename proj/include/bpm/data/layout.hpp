#pragma once

// Field inventory of the single-family loan-level files. Column order follows
// the published origination/performance layouts; one origination record per
// loan, many monthly performance records per loan, joined on
// loanSequenceNumber.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bpm::data {

enum class FieldKind : std::uint8_t {
  Numeric,      // ratios, amounts, counts
  Categorical,  // flags and codes, kept as text
  Date,         // YYYYMM integers; never model features
  Key,          // identifiers; never model features
  Code,         // zeroBalanceCode: source of the label
};

struct FieldSpec {
  std::string_view name;
  FieldKind kind;
  bool mandatory;  // blank or unparseable => the line is rejected
};

// Numeric/date fields land in a double slot (NaN = missing); everything else
// in a text slot ("" = missing).
class Layout {
 public:
  static const Layout& origination();
  static const Layout& performance();

  std::string_view file_kind() const { return file_kind_; }
  std::span<const FieldSpec> fields() const { return fields_; }
  std::size_t field_count() const { return fields_.size(); }
  std::size_t numeric_slots() const { return numeric_slots_; }
  std::size_t text_slots() const { return text_slots_; }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool is_numeric_slot(std::size_t field) const {
    const auto k = fields_[field].kind;
    return k == FieldKind::Numeric || k == FieldKind::Date;
  }
  std::size_t slot_of(std::size_t field) const { return slot_[field]; }
  std::size_t key_field() const { return key_field_; }

 private:
  Layout(std::string_view file_kind, std::span<const FieldSpec> fields);

  std::string_view file_kind_;
  std::span<const FieldSpec> fields_;
  std::vector<std::size_t> slot_;
  std::size_t numeric_slots_ = 0;
  std::size_t text_slots_ = 0;
  std::size_t key_field_ = 0;
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

inline constexpr std::string_view kNotAvailable = "Not Available";

// Values of one line, addressed through a Layout.
struct RecordValues {
  std::vector<double> numeric;
  std::vector<std::string> text;

  bool operator==(const RecordValues& other) const;
};

// Reason a loan balance reached zero.
enum class ZeroBalanceCode : std::uint8_t {
  NotApplicable,           // blank
  Prepaid,                 // 01
  ForeclosureAlternative,  // 03
  Repurchase,              // 06
  ReoDisposition,          // 09
};

std::optional<ZeroBalanceCode> parse_zero_balance_code(std::string_view text);
std::string_view to_string(ZeroBalanceCode code);
// 03, 06 and 09 are credit events; 01 and blank are not.
bool is_default_code(ZeroBalanceCode code);

struct OriginationRecord {
  RecordValues values;

  const std::string& loan_id() const;
  double number(std::string_view field) const;
  const std::string& text(std::string_view field) const;
  bool operator==(const OriginationRecord&) const = default;
};

struct PerformanceRecord {
  RecordValues values;
  ZeroBalanceCode zero_balance_code = ZeroBalanceCode::NotApplicable;

  const std::string& loan_id() const;
  double number(std::string_view field) const;
  const std::string& text(std::string_view field) const;
  bool operator==(const PerformanceRecord&) const = default;
};

// Empty records sized for the layout (all cells missing).
OriginationRecord make_origination_record();
PerformanceRecord make_performance_record();

// Setters used by the synthetic generator and tests; throw on unknown names
// or a kind mismatch.
void set_number(const Layout& layout, RecordValues& values, std::string_view field, double v);
void set_text(const Layout& layout, RecordValues& values, std::string_view field, std::string v);

// Serialises one record back into the pipe-delimited layout. Numbers use the
// shortest round-tripping representation.
std::string format_line(const Layout& layout, const RecordValues& values);

}  // namespace bpm::data
