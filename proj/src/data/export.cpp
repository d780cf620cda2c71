#include "bpm/data/export.hpp"

#include "bpm/common/text.hpp"

namespace bpm::data {

std::string dataset_to_csv(const Dataset& d) {
  std::string out;
  for (const auto& c : d.columns()) {
    out += csv_escape(c.name);
    out.push_back(',');
  }
  out += "defaulted,customer\n";
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (double v : d.row(i)) {
      out += format_double(v);
      out.push_back(',');
    }
    out += std::to_string(d.label(i));
    out.push_back(',');
    out += std::to_string(d.groups()[i]);
    out.push_back('\n');
  }
  return out;
}

std::string diagnostics_to_csv(const std::vector<DiagnosticEntry>& entries) {
  std::string out = "vintage_year,stage,metric,count\n";
  for (const auto& e : entries) {
    out += std::to_string(e.vintage_year) + "," + csv_escape(e.stage) + "," + csv_escape(e.metric) + "," +
           std::to_string(e.count) + "\n";
  }
  return out;
}

}  // namespace bpm::data
