#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace bpm::eval {

// Columns of the matrix are ground truth; class 1 (default) is positive.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Throws DataError on length mismatch or labels outside {0, 1}.
ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred);

// A rate whose denominator is zero is undefined, never 0.
struct Metrics {
  std::optional<double> precision;  // tp / (tp + fp)
  std::optional<double> recall;     // tp / (tp + fn)
  std::optional<double> fpr;        // fp / (fp + tn)
  std::optional<double> accuracy;   // (tp + tn) / total
};

Metrics metrics(const ConfusionMatrix& cm);

// Trapezoidal area under the ROC curve, one step per distinct score (tied
// scores move TPR and FPR together). Equals the Mann-Whitney probability that
// a random positive outscores a random negative, ties counting one half.
// Throws DataError unless both classes are present.
double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> scores);

}  // namespace bpm::eval
