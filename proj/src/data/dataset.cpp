#include "bpm/data/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/common/hash.hpp"

namespace bpm::data {

Dataset::Dataset(std::vector<Column> columns, std::vector<double> values, std::vector<std::uint8_t> labels,
                 std::vector<std::uint32_t> groups, int vintage_year)
    : columns_(std::move(columns)),
      values_(std::move(values)),
      labels_(std::move(labels)),
      groups_(std::move(groups)),
      vintage_year_(vintage_year) {
  if (values_.size() != labels_.size() * columns_.size()) {
    throw DataError("dataset shape mismatch: " + std::to_string(values_.size()) + " cells for " +
                    std::to_string(labels_.size()) + " rows x " + std::to_string(columns_.size()) +
                    " columns");
  }
  if (groups_.empty()) {
    groups_.resize(labels_.size());
    std::iota(groups_.begin(), groups_.end(), 0U);
  } else if (groups_.size() != labels_.size()) {
    throw DataError("dataset group vector length does not match row count");
  }
  for (auto y : labels_) {
    if (y > 1) throw DataError("dataset labels must be 0 or 1");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("dataset cell (" + std::to_string(i / columns_.size()) + ", " +
                      columns_[i % columns_.size()].name + ") is not finite");
    }
  }
}

std::vector<std::string> Dataset::feature_names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

std::vector<double> Dataset::column(std::size_t j) const {
  std::vector<double> out(rows());
  for (std::size_t i = 0; i < rows(); ++i) out[i] = at(i, j);
  return out;
}

std::size_t Dataset::count_label(std::uint8_t y) const {
  return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), y));
}

Dataset Dataset::select_rows(std::span<const std::size_t> indices) const {
  Dataset out;
  out.columns_ = columns_;
  out.vintage_year_ = vintage_year_;
  out.holdout_ = holdout_;
  out.values_.reserve(indices.size() * cols());
  out.labels_.reserve(indices.size());
  out.groups_.reserve(indices.size());
  for (auto i : indices) {
    const auto r = row(i);
    out.values_.insert(out.values_.end(), r.begin(), r.end());
    out.labels_.push_back(labels_[i]);
    out.groups_.push_back(groups_[i]);
  }
  return out;
}

Dataset Dataset::select_columns(std::span<const std::size_t> indices) const {
  Dataset out;
  for (auto j : indices) out.columns_.push_back(columns_.at(j));
  out.vintage_year_ = vintage_year_;
  out.holdout_ = holdout_;
  out.labels_ = labels_;
  out.groups_ = groups_;
  out.values_.reserve(rows() * indices.size());
  for (std::size_t i = 0; i < rows(); ++i) {
    for (auto j : indices) out.values_.push_back(at(i, j));
  }
  return out;
}

std::string Dataset::checksum() const {
  Sha256 h;
  const std::uint64_t shape[2] = {rows(), cols()};
  h.update(shape, sizeof(shape));
  h.update(values_.data(), values_.size() * sizeof(double));
  h.update(labels_.data(), labels_.size());
  h.update(groups_.data(), groups_.size() * sizeof(std::uint32_t));
  return h.hex_digest();
}

Dataset make_numeric_dataset(std::size_t cols, std::vector<double> values, std::vector<std::uint8_t> labels) {
  std::vector<Column> columns;
  for (std::size_t j = 0; j < cols; ++j) columns.push_back({"x" + std::to_string(j), ColumnKind::Numeric, 0});
  return Dataset(std::move(columns), std::move(values), std::move(labels));
}

}  // namespace bpm::data
