#include "bpm/resampling/smote.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/simd/kernels.hpp"

namespace bpm::resampling {

using data::ColumnKind;
using data::Dataset;

std::uint8_t minority_label(const Dataset& d) {
  const auto ones = d.count_label(1);
  return ones <= d.rows() - ones ? 1 : 0;
}

NeighborIndex knn_minority(const Dataset& d, std::size_t k, bool standardize) {
  if (k == 0) throw ConfigError("SMOTE neighbour count k must be >= 1");
  NeighborIndex index;
  index.minority_label = minority_label(d);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d.label(i) == index.minority_label) index.minority_rows.push_back(i);
  }
  const std::size_t m = index.minority_rows.size();
  if (m < 2) {
    throw DataError("SMOTE needs at least 2 minority rows, found " + std::to_string(m));
  }

  // Scaled copy of the minority rows.
  const std::size_t cols = d.cols();
  std::vector<double> scale(cols, 1.0);
  std::vector<double> shift(cols, 0.0);
  if (standardize) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (d.columns()[j].kind != ColumnKind::Numeric) continue;
      double mean = 0.0;
      for (std::size_t i = 0; i < d.rows(); ++i) mean += d.at(i, j);
      mean /= static_cast<double>(d.rows());
      double var = 0.0;
      for (std::size_t i = 0; i < d.rows(); ++i) var += (d.at(i, j) - mean) * (d.at(i, j) - mean);
      const double sd = std::sqrt(var / static_cast<double>(d.rows()));
      shift[j] = mean;
      scale[j] = sd > 0.0 ? 1.0 / sd : 1.0;
    }
  }
  std::vector<double> points(m * cols);
  for (std::size_t a = 0; a < m; ++a) {
    const auto r = d.row(index.minority_rows[a]);
    for (std::size_t j = 0; j < cols; ++j) points[a * cols + j] = (r[j] - shift[j]) * scale[j];
  }

  const std::size_t kk = std::min(k, m - 1);
  const auto& kernels = simd::kernels();
  index.neighbors.resize(m);
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(m);
  for (std::size_t a = 0; a < m; ++a) {
    dist.clear();
    for (std::size_t b = 0; b < m; ++b) {
      if (b == a) continue;
      dist.emplace_back(kernels.squared_distance(&points[a * cols], &points[b * cols], cols), b);
    }
    // (distance, minority position) ordering == (distance, row index) ordering.
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());
    auto& out = index.neighbors[a];
    out.reserve(kk);
    for (std::size_t t = 0; t < kk; ++t) out.push_back(index.minority_rows[dist[t].second]);
  }
  return index;
}

std::vector<double> synthesize(std::span<const double> source, std::span<const double> neighbor, double u,
                               const std::vector<data::Column>& columns) {
  std::vector<double> out(source.size());
  for (std::size_t j = 0; j < source.size(); ++j) {
    double v = source[j] + u * (neighbor[j] - source[j]);
    if (j < columns.size() && columns[j].kind == ColumnKind::Categorical) {
      v = std::round(v);
      if (columns[j].cardinality > 0) v = std::clamp(v, 0.0, static_cast<double>(columns[j].cardinality - 1));
    }
    out[j] = v;
  }
  return out;
}

std::size_t synthetic_count(std::size_t minority, std::size_t majority, double target_ratio) {
  const auto target = static_cast<std::size_t>(std::llround(target_ratio * static_cast<double>(majority)));
  return target > minority ? target - minority : 0;
}

SmoteResult smote_with_provenance(const Dataset& d, const ResampleConfig& cfg) {
  if (d.is_holdout()) throw DataError("refusing to resample a holdout dataset");
  if (cfg.target_ratio <= 0.0 || cfg.target_ratio > 1.0) {
    throw ConfigError("SMOTE target ratio must be in (0, 1]");
  }
  const std::uint8_t minority = minority_label(d);
  const std::size_t m = d.count_label(minority);
  const std::size_t n_synth = synthetic_count(m, d.rows() - m, cfg.target_ratio);
  if (n_synth == 0) return {d, {}};

  const NeighborIndex index = knn_minority(d, cfg.k, cfg.standardize);

  std::vector<double> values(d.values().begin(), d.values().end());
  std::vector<std::uint8_t> labels(d.labels().begin(), d.labels().end());
  std::vector<std::uint32_t> groups(d.groups().begin(), d.groups().end());
  values.reserve(values.size() + n_synth * d.cols());
  std::uint32_t next_group =
      groups.empty() ? 0U : *std::max_element(groups.begin(), groups.end()) + 1U;

  Rng rng(cfg.seed);
  std::vector<SyntheticProvenance> provenance;
  provenance.reserve(n_synth);
  for (std::size_t s = 0; s < n_synth; ++s) {
    const std::size_t a = s % index.minority_rows.size();
    const auto& nbrs = index.neighbors[a];
    const std::size_t nb = nbrs[static_cast<std::size_t>(rng.below(nbrs.size()))];
    const double u = rng.uniform();
    const std::size_t src = index.minority_rows[a];
    const auto row = synthesize(d.row(src), d.row(nb), u, d.columns());
    values.insert(values.end(), row.begin(), row.end());
    labels.push_back(minority);
    groups.push_back(next_group++);
    provenance.push_back({src, nb, u});
  }
  return {Dataset(d.columns(), std::move(values), std::move(labels), std::move(groups), d.vintage_year()),
          std::move(provenance)};
}

Dataset smote(const Dataset& d, const ResampleConfig& cfg) { return smote_with_provenance(d, cfg).data; }

}  // namespace bpm::resampling
