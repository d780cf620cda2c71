#pragma once

#include <string>
#include <vector>

#include "bpm/data/dataset.hpp"

namespace bpm::data {

// Columnar CSV snapshot: one column per feature, then `defaulted`, then
// `customer`.
std::string dataset_to_csv(const Dataset& d);

struct DiagnosticEntry {
  int vintage_year = 0;
  std::string stage;
  std::string metric;
  std::size_t count = 0;
};

// stage,metric rows with a count column.
std::string diagnostics_to_csv(const std::vector<DiagnosticEntry>& entries);

}  // namespace bpm::data
