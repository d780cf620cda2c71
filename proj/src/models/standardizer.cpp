#include "bpm/models/standardizer.hpp"

#include <cmath>

#include "bpm/common/error.hpp"

namespace bpm::models {

Standardizer Standardizer::fit(const data::Dataset& d) {
  Standardizer s;
  const std::size_t cols = d.cols();
  s.mean_.assign(cols, 0.0);
  s.inv_scale_.assign(cols, 1.0);
  if (d.rows() == 0) return s;
  const double n = static_cast<double>(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto r = d.row(i);
    for (std::size_t j = 0; j < cols; ++j) s.mean_[j] += r[j];
  }
  for (auto& m : s.mean_) m /= n;
  std::vector<double> var(cols, 0.0);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto r = d.row(i);
    for (std::size_t j = 0; j < cols; ++j) {
      const double c = r[j] - s.mean_[j];
      var[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < cols; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.inv_scale_[j] = sd > 1e-12 ? 1.0 / sd : 1.0;
  }
  return s;
}

void Standardizer::apply(std::span<const double> x, std::span<double> out) const {
  for (std::size_t j = 0; j < mean_.size(); ++j) out[j] = (x[j] - mean_[j]) * inv_scale_[j];
}

std::vector<double> Standardizer::apply(std::span<const double> x) const {
  std::vector<double> out(mean_.size());
  apply(x, out);
  return out;
}

std::vector<double> Standardizer::transform(const data::Dataset& d) const {
  std::vector<double> out(d.rows() * d.cols());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    apply(d.row(i), std::span<double>(out.data() + i * d.cols(), d.cols()));
  }
  return out;
}

nlohmann::json Standardizer::to_json() const { return {{"mean", mean_}, {"inv_scale", inv_scale_}}; }

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  Standardizer s;
  s.mean_ = j.at("mean").get<std::vector<double>>();
  s.inv_scale_ = j.at("inv_scale").get<std::vector<double>>();
  if (s.mean_.size() != s.inv_scale_.size()) throw DataError("malformed standardizer document");
  return s;
}

}  // namespace bpm::models
