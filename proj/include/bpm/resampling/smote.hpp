#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bpm/data/dataset.hpp"

namespace bpm::resampling {

struct ResampleConfig {
  std::size_t k = 5;
  // Desired minority/majority row ratio after oversampling; a value at or
  // below the current ratio makes smote() a no-op.
  double target_ratio = 1.0;
  std::uint64_t seed = 0;
  // Neighbour search on z-scored copies of the numeric columns.
  bool standardize = true;
};

// Exact k nearest minority neighbours of every minority row.
struct NeighborIndex {
  std::uint8_t minority_label = 1;
  std::vector<std::size_t> minority_rows;           // dataset row indices, ascending
  std::vector<std::vector<std::size_t>> neighbors;  // parallel to minority_rows; dataset row indices
};

// The minority class is the label with fewer rows (label 1 on a tie).
std::uint8_t minority_label(const data::Dataset& d);

// Euclidean distance, sorted ascending with ties on the lower row index; a
// row is never its own neighbour. Lists are clamped to m-1 entries. Throws
// DataError when fewer than two minority rows exist.
NeighborIndex knn_minority(const data::Dataset& d, std::size_t k, bool standardize = true);

// Where a synthetic row came from: row = source + u * (neighbor - source).
struct SyntheticProvenance {
  std::size_t source_row = 0;
  std::size_t neighbor_row = 0;
  double u = 0.0;
};

struct SmoteResult {
  // Original rows first (unchanged, same order), then synthetic rows.
  data::Dataset data;
  std::vector<SyntheticProvenance> provenance;  // one per synthetic row
};

// Interpolates one synthetic row. Categorical columns are rounded to the
// nearest valid code.
std::vector<double> synthesize(std::span<const double> source, std::span<const double> neighbor, double u,
                               const std::vector<data::Column>& columns);

// Throws DataError on holdout-flagged input.
SmoteResult smote_with_provenance(const data::Dataset& d, const ResampleConfig& cfg);
data::Dataset smote(const data::Dataset& d, const ResampleConfig& cfg);

// Number of synthetic rows smote() adds for the given class counts.
std::size_t synthetic_count(std::size_t minority, std::size_t majority, double target_ratio);

}  // namespace bpm::resampling
