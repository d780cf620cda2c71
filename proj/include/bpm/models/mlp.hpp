#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bpm/common/random.hpp"

namespace bpm::models {

// Fully connected network: inputs -> hidden layers (ReLU) -> 1 sigmoid unit.
// Parameters are one flat vector, layer by layer: weights (out x in,
// row-major) then biases.
struct MlpShape {
  std::size_t inputs = 0;
  std::vector<std::size_t> hidden;

  std::size_t layer_count() const { return hidden.size() + 1; }
  std::size_t layer_inputs(std::size_t l) const { return l == 0 ? inputs : hidden[l - 1]; }
  std::size_t layer_outputs(std::size_t l) const { return l < hidden.size() ? hidden[l] : 1; }
  std::size_t param_count() const;
  // Offset of layer l's weight block; its bias block follows the weights.
  std::size_t layer_offset(std::size_t l) const;

  bool operator==(const MlpShape&) const = default;
};

// He-initialised weights, zero biases.
std::vector<double> mlp_init(const MlpShape& shape, Rng& rng);

// Pre-sigmoid output for one (already scaled) input row.
double mlp_logit(const MlpShape& shape, std::span<const double> params, std::span<const double> x);

// Mean binary cross-entropy over `rows` examples plus (l2 / 2) * ||W||^2
// (weights only). Writes d(loss)/d(params) into `grad` (resized).
double mlp_loss_and_gradient(const MlpShape& shape, std::span<const double> params,
                             std::span<const double> inputs, std::span<const double> targets, double l2,
                             std::vector<double>& grad);

}  // namespace bpm::models
