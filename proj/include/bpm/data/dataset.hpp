#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bpm::data {

enum class ColumnKind : std::uint8_t { Numeric, Categorical };

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  // Categorical columns hold integer codes in [0, cardinality).
  std::size_t cardinality = 0;

  bool operator==(const Column&) const = default;
};

// Dense row-major feature matrix with binary labels. `groups` carries the
// customer (loan) each row belongs to so splits can keep customers whole.
class Dataset {
 public:
  Dataset() = default;
  // Validates shapes and rejects non-finite cells (DataError). Empty `groups`
  // means every row is its own group.
  Dataset(std::vector<Column> columns, std::vector<double> values, std::vector<std::uint8_t> labels,
          std::vector<std::uint32_t> groups = {}, int vintage_year = 0);

  std::size_t rows() const { return labels_.size(); }
  std::size_t cols() const { return columns_.size(); }
  bool empty() const { return labels_.empty(); }

  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
  double at(std::size_t i, std::size_t j) const { return values_[i * cols() + j]; }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<const std::uint8_t> labels() const { return labels_; }
  std::span<const std::uint32_t> groups() const { return groups_; }
  const std::vector<Column>& columns() const { return columns_; }
  std::vector<std::string> feature_names() const;
  std::vector<double> column(std::size_t j) const;

  int vintage_year() const { return vintage_year_; }
  bool is_holdout() const { return holdout_; }
  void mark_holdout() { holdout_ = true; }

  std::size_t count_label(std::uint8_t y) const;

  Dataset select_rows(std::span<const std::size_t> indices) const;
  Dataset select_columns(std::span<const std::size_t> indices) const;

  // SHA-256 over shape, cells, labels and groups.
  std::string checksum() const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<Column> columns_;
  std::vector<double> values_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint32_t> groups_;
  int vintage_year_ = 0;
  bool holdout_ = false;
};

// Convenience for tests and synthetic tasks: all-numeric columns named
// x0..x{d-1}.
Dataset make_numeric_dataset(std::size_t cols, std::vector<double> values,
                             std::vector<std::uint8_t> labels);

}  // namespace bpm::data
