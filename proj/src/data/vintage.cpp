#include "bpm/data/vintage.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"

namespace bpm::data {

Regime assign_regime(int vintage_year) {
  if (vintage_year < kFirstVintage || vintage_year > kLastVintage) {
    throw DataError("vintage year " + std::to_string(vintage_year) + " outside " +
                    std::to_string(kFirstVintage) + "-" + std::to_string(kLastVintage));
  }
  if (vintage_year <= 2004) return Regime::Medium;
  if (vintage_year <= 2010) return Regime::High;
  return Regime::Low;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::Low:
      return "Low";
    case Regime::Medium:
      return "Medium";
    case Regime::High:
      return "High";
  }
  return "?";
}

Regime parse_regime(std::string_view name) {
  if (name == "Low" || name == "low") return Regime::Low;
  if (name == "Medium" || name == "medium") return Regime::Medium;
  if (name == "High" || name == "high") return Regime::High;
  throw ConfigError("unknown regime '" + std::string(name) + "'");
}

// -- parsing ---------------------------------------------------------------

namespace {

struct LineParser {
  const Layout& layout;
  std::string source;
  std::size_t coerced = 0;

  // Returns an error message, or empty on success.
  std::string parse(std::string_view line, RecordValues& out, ZeroBalanceCode* code) {
    const auto cells = split_view(line, '|');
    if (cells.size() != layout.field_count()) {
      return "expected " + std::to_string(layout.field_count()) + " fields, found " +
             std::to_string(cells.size());
    }
    out.numeric.assign(layout.numeric_slots(), kMissing);
    out.text.assign(layout.text_slots(), std::string());
    std::size_t local_coerced = 0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const FieldSpec& f = layout.fields()[i];
      const auto cell = trim(cells[i]);
      const auto slot = layout.slot_of(i);
      switch (f.kind) {
        case FieldKind::Numeric:
        case FieldKind::Date: {
          if (cell.empty()) {
            if (f.mandatory) return "mandatory field " + std::string(f.name) + " is blank";
            break;
          }
          const auto v = parse_double(cell);
          if (!v) {
            if (f.mandatory) {
              return "unparseable numeric '" + std::string(cell) + "' in field " + std::string(f.name);
            }
            ++local_coerced;
            break;
          }
          out.numeric[slot] = *v;
          break;
        }
        case FieldKind::Categorical:
        case FieldKind::Key:
          if (cell.empty() && f.mandatory) return "mandatory field " + std::string(f.name) + " is blank";
          out.text[slot] = std::string(cell);
          break;
        case FieldKind::Code: {
          const auto parsed = parse_zero_balance_code(cell);
          if (!parsed) return "unknown zeroBalanceCode '" + std::string(cell) + "'";
          out.text[slot] = std::string(cell);
          if (code != nullptr) *code = *parsed;
          break;
        }
      }
    }
    coerced += local_coerced;
    return {};
  }
};

template <typename Record, typename OnRecord>
void parse_stream(std::istream& in, LineParser& parser, const ParseOptions& options,
                  std::vector<ParseIssue>& issues, OnRecord&& on_record) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    Record record;
    ZeroBalanceCode code = ZeroBalanceCode::NotApplicable;
    std::string error = parser.parse(line, record.values, &code);
    if (error.empty()) {
      if constexpr (std::is_same_v<Record, PerformanceRecord>) record.zero_balance_code = code;
      error = on_record(std::move(record));
    }
    if (!error.empty()) {
      if (options.strict) throw ParseError(parser.source, line_no, error);
      issues.push_back({parser.source, line_no, error});
    }
  }
  if (in.bad()) throw DataError("I/O failure while reading " + parser.source);
}

}  // namespace

ParsedVintage parse_vintage(std::istream& origination, std::istream& performance,
                            const ParseOptions& options) {
  ParsedVintage out;
  LineParser orig_parser{Layout::origination(), "origination"};
  std::unordered_set<std::string> seen;
  parse_stream<OriginationRecord>(origination, orig_parser, options, out.issues,
                                  [&](OriginationRecord r) -> std::string {
                                    if (!seen.insert(r.loan_id()).second) {
                                      return "duplicate loanSequenceNumber " + r.loan_id();
                                    }
                                    out.origination.push_back(std::move(r));
                                    return {};
                                  });
  LineParser perf_parser{Layout::performance(), "performance"};
  parse_stream<PerformanceRecord>(performance, perf_parser, options, out.issues,
                                  [&](PerformanceRecord r) -> std::string {
                                    out.performance.push_back(std::move(r));
                                    return {};
                                  });
  out.coerced_cells = orig_parser.coerced + perf_parser.coerced;
  return out;
}

ParsedVintage parse_vintage_files(const std::string& origination_path,
                                  const std::string& performance_path, const ParseOptions& options) {
  std::ifstream orig(origination_path);
  if (!orig) throw DataError("cannot open origination file: " + origination_path);
  std::ifstream perf(performance_path);
  if (!perf) throw DataError("cannot open performance file: " + performance_path);
  return parse_vintage(orig, perf, options);
}

// -- cleaning --------------------------------------------------------------

namespace {

void impute(const Layout& layout, RecordValues& values, CleaningReport& report) {
  for (std::size_t i = 0; i < layout.field_count(); ++i) {
    const auto kind = layout.fields()[i].kind;
    const auto slot = layout.slot_of(i);
    if (layout.is_numeric_slot(i)) {
      if (is_missing(values.numeric[slot])) {
        values.numeric[slot] = 0.0;
        ++report.imputed_numeric;
      }
    } else if (kind == FieldKind::Categorical && values.text[slot].empty()) {
      values.text[slot] = std::string(kNotAvailable);
      ++report.imputed_categorical;
    }
  }
}

}  // namespace

CleanedVintage clean(std::vector<OriginationRecord> origination,
                     std::vector<PerformanceRecord> performance) {
  static constexpr std::array<std::string_view, 4> kRequired{
      "creditScore", "originalLoanToValue", "originalDebtToIncomeRatio", "originalInterestRate"};
  CleanedVintage out;
  std::unordered_set<std::string> dropped;
  for (auto& r : origination) {
    const bool incomplete = std::any_of(kRequired.begin(), kRequired.end(),
                                        [&](std::string_view f) { return is_missing(r.number(f)); });
    if (incomplete) {
      dropped.insert(r.loan_id());
      ++out.report.dropped_loans;
      continue;
    }
    impute(Layout::origination(), r.values, out.report);
    out.origination.push_back(std::move(r));
  }
  for (auto& r : performance) {
    if (dropped.contains(r.loan_id())) {
      ++out.report.dropped_performance_rows;
      continue;
    }
    impute(Layout::performance(), r.values, out.report);
    out.performance.push_back(std::move(r));
  }
  return out;
}

// -- join and label ----------------------------------------------------------

const std::vector<JoinedField>& joined_fields() {
  static const std::vector<JoinedField> fields = [] {
    std::vector<JoinedField> out;
    const auto& orig = Layout::origination();
    for (std::size_t i = 0; i < orig.field_count(); ++i) {
      out.push_back({orig.fields()[i].name, orig.fields()[i].kind, true, i});
    }
    const auto& perf = Layout::performance();
    for (std::size_t i = 0; i < perf.field_count(); ++i) {
      const auto& f = perf.fields()[i];
      if (f.name == "loanSequenceNumber" || f.kind == FieldKind::Code) continue;
      out.push_back({f.name, f.kind, false, i});
    }
    return out;
  }();
  return fields;
}

const JoinedField* find_joined_field(std::string_view name) {
  for (const auto& f : joined_fields()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

double joined_number(const LabeledVintage& v, const LoanRecord& r, const JoinedField& f) {
  if (f.from_origination) {
    return v.origination[r.origination_index].values.numeric[Layout::origination().slot_of(f.field)];
  }
  return v.performance[r.performance_index].values.numeric[Layout::performance().slot_of(f.field)];
}

const std::string& joined_text(const LabeledVintage& v, const LoanRecord& r, const JoinedField& f) {
  if (f.from_origination) {
    return v.origination[r.origination_index].values.text[Layout::origination().slot_of(f.field)];
  }
  return v.performance[r.performance_index].values.text[Layout::performance().slot_of(f.field)];
}

JoinResult join_and_label(std::vector<OriginationRecord> origination,
                          std::vector<PerformanceRecord> performance, int vintage_year) {
  JoinResult out;
  LabeledVintage& v = out.vintage;
  v.vintage_year = vintage_year;
  v.regime = assign_regime(vintage_year);
  std::unordered_map<std::string, std::uint32_t> by_id;
  by_id.reserve(origination.size());
  for (std::size_t i = 0; i < origination.size(); ++i) {
    by_id.emplace(origination[i].loan_id(), static_cast<std::uint32_t>(i));
  }
  v.origination = std::move(origination);
  v.performance.reserve(performance.size());
  v.rows.reserve(performance.size());
  for (auto& p : performance) {
    const auto it = by_id.find(p.loan_id());
    if (it == by_id.end()) {
      ++out.report.orphan_performance_rows;
      continue;
    }
    const auto idx = static_cast<std::uint32_t>(v.performance.size());
    v.rows.push_back({it->second, idx, static_cast<std::uint8_t>(is_default_code(p.zero_balance_code))});
    v.performance.push_back(std::move(p));
  }
  return out;
}

std::size_t LabeledVintage::customer_count() const {
  std::vector<bool> seen(origination.size(), false);
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (!seen[r.origination_index]) {
      seen[r.origination_index] = true;
      ++n;
    }
  }
  return n;
}

std::size_t LabeledVintage::defaulted_rows() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const LoanRecord& r) { return r.defaulted != 0; }));
}

std::size_t LabeledVintage::defaulted_customers() const {
  std::vector<bool> flagged(origination.size(), false);
  for (const auto& r : rows) {
    if (r.defaulted) flagged[r.origination_index] = true;
  }
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

// -- sampling -----------------------------------------------------------------

LabeledVintage stratified_sample(const LabeledVintage& vintage, std::size_t customer_count,
                                 std::uint64_t seed) {
  // Customers in first-appearance order, and their default status.
  std::vector<int> status(vintage.origination.size(), -1);
  std::vector<std::uint32_t> customers;
  for (const auto& r : vintage.rows) {
    int& s = status[r.origination_index];
    if (s < 0) {
      s = 0;
      customers.push_back(r.origination_index);
    }
    if (r.defaulted) s = 1;
  }
  if (customer_count > customers.size()) {
    throw DataError("requested " + std::to_string(customer_count) + " customers but vintage " +
                    std::to_string(vintage.vintage_year) + " has only " +
                    std::to_string(customers.size()));
  }

  std::array<std::vector<std::uint32_t>, 2> strata;
  for (auto c : customers) strata[static_cast<std::size_t>(status[c])].push_back(c);

  // Largest-remainder allocation; a tie on the remainder goes to stratum 0.
  const double total = static_cast<double>(customers.size());
  std::array<std::size_t, 2> take{};
  std::array<double, 2> remainder{};
  std::size_t allocated = 0;
  for (std::size_t s = 0; s < 2; ++s) {
    const double quota =
        total > 0 ? static_cast<double>(customer_count) * static_cast<double>(strata[s].size()) / total : 0.0;
    take[s] = static_cast<std::size_t>(quota);
    remainder[s] = quota - static_cast<double>(take[s]);
    allocated += take[s];
  }
  while (allocated < customer_count) {
    const std::size_t s = remainder[1] > remainder[0] ? 1 : 0;
    const std::size_t pick = take[s] < strata[s].size() ? s : 1 - s;
    ++take[pick];
    remainder[pick] = -1.0;
    ++allocated;
  }

  Rng rng(seed);
  std::vector<bool> chosen(vintage.origination.size(), false);
  for (std::size_t s = 0; s < 2; ++s) {
    auto pool = strata[s];
    // Partial Fisher-Yates: the first take[s] entries become the sample.
    for (std::size_t i = 0; i < take[s]; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      chosen[pool[i]] = true;
    }
  }

  LabeledVintage out;
  out.vintage_year = vintage.vintage_year;
  out.regime = vintage.regime;
  std::vector<std::uint32_t> remap(vintage.origination.size(), 0);
  for (std::size_t i = 0; i < vintage.origination.size(); ++i) {
    if (chosen[i]) {
      remap[i] = static_cast<std::uint32_t>(out.origination.size());
      out.origination.push_back(vintage.origination[i]);
    }
  }
  for (const auto& r : vintage.rows) {
    if (!chosen[r.origination_index]) continue;
    const auto idx = static_cast<std::uint32_t>(out.performance.size());
    out.performance.push_back(vintage.performance[r.performance_index]);
    out.rows.push_back({remap[r.origination_index], idx, r.defaulted});
  }
  return out;
}

}  // namespace bpm::data
