#pragma once

#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpm/data/dataset.hpp"

namespace bpm::models {

// Per-column z-scoring with training statistics. Constant columns are
// centred but not scaled.
class Standardizer {
 public:
  Standardizer() = default;
  static Standardizer fit(const data::Dataset& d);

  std::size_t size() const { return mean_.size(); }
  void apply(std::span<const double> x, std::span<double> out) const;
  std::vector<double> apply(std::span<const double> x) const;
  // Row-major transformed copy of all rows.
  std::vector<double> transform(const data::Dataset& d) const;

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);

 private:
  std::vector<double> mean_;
  std::vector<double> inv_scale_;
};

}  // namespace bpm::models
