#include "bpm/eval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "bpm/common/error.hpp"

namespace bpm::eval {

ConfusionMatrix confusion(std::span<const std::uint8_t> y_true, std::span<const std::uint8_t> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw DataError("confusion: " + std::to_string(y_true.size()) + " labels but " +
                    std::to_string(y_pred.size()) + " predictions");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] > 1 || y_pred[i] > 1) throw DataError("confusion: labels must be 0 or 1");
    if (y_true[i] == 1) {
      ++(y_pred[i] == 1 ? cm.tp : cm.fn);
    } else {
      ++(y_pred[i] == 1 ? cm.fp : cm.tn);
    }
  }
  return cm;
}

namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Metrics metrics(const ConfusionMatrix& cm) {
  return {ratio(cm.tp, cm.tp + cm.fp), ratio(cm.tp, cm.tp + cm.fn), ratio(cm.fp, cm.fp + cm.tn),
          ratio(cm.tp + cm.tn, cm.total())};
}

double roc_auc(std::span<const std::uint8_t> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw DataError("roc_auc: label and score lengths differ");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const std::uint64_t positives = static_cast<std::uint64_t>(std::count(y_true.begin(), y_true.end(), 1));
  const std::uint64_t negatives = y_true.size() - positives;
  if (positives == 0 || negatives == 0) throw DataError("roc_auc needs both classes");

  // Twice the area in (fp, tp) count units, kept exact in integers.
  std::uint64_t area2 = 0;
  std::uint64_t tp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::uint64_t dtp = 0;
    std::uint64_t dfp = 0;
    const double s = scores[order[i]];
    for (; i < order.size() && scores[order[i]] == s; ++i) ++(y_true[order[i]] == 1 ? dtp : dfp);
    area2 += dfp * (2 * tp + dtp);
    tp += dtp;
  }
  return static_cast<double>(area2) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

}  // namespace bpm::eval
