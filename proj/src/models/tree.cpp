#include "bpm/models/tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"

namespace bpm::models {

BinnedMatrix::BinnedMatrix(const data::Dataset& d, std::size_t max_bins)
    : rows_(d.rows()), bins_(d.rows() * d.cols()), thresholds_(d.cols()) {
  max_bins = std::clamp<std::size_t>(max_bins, 2, 256);
  std::vector<double> col(rows_);
  std::vector<std::pair<double, std::size_t>> distinct;
  for (std::size_t j = 0; j < d.cols(); ++j) {
    for (std::size_t i = 0; i < rows_; ++i) col[i] = d.at(i, j);
    std::vector<double> sorted = col;
    std::sort(sorted.begin(), sorted.end());
    distinct.clear();
    for (double v : sorted) {
      if (distinct.empty() || distinct.back().first != v) {
        distinct.emplace_back(v, 1);
      } else {
        ++distinct.back().second;
      }
    }
    auto midpoint = [](double a, double b) {
      const double m = a + (b - a) / 2.0;
      return m < b ? m : a;
    };
    auto& th = thresholds_[j];
    if (distinct.size() <= max_bins) {
      for (std::size_t t = 0; t + 1 < distinct.size(); ++t) {
        th.push_back(midpoint(distinct[t].first, distinct[t + 1].first));
      }
    } else {
      // Cut after the distinct value where the running count crosses the
      // next equal-frequency boundary.
      const double per_bin = static_cast<double>(rows_) / static_cast<double>(max_bins);
      std::size_t cumulative = 0;
      double next_cut = per_bin;
      for (std::size_t t = 0; t + 1 < distinct.size() && th.size() + 1 < max_bins; ++t) {
        cumulative += distinct[t].second;
        if (static_cast<double>(cumulative) >= next_cut) {
          th.push_back(midpoint(distinct[t].first, distinct[t + 1].first));
          while (next_cut <= static_cast<double>(cumulative)) next_cut += per_bin;
        }
      }
    }
    std::uint8_t* out = bins_.data() + j * rows_;
    for (std::size_t i = 0; i < rows_; ++i) {
      out[i] = static_cast<std::uint8_t>(std::lower_bound(th.begin(), th.end(), col[i]) - th.begin());
    }
  }
}

namespace {

double binary_entropy(double w_pos, double w) {
  if (w <= 0.0) return 0.0;
  const double p = w_pos / w;
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

// Weighted impurity "mass" of a node: w * H for entropy, SSE-equivalent
// -(sum^2 / w) for squared error (constant term dropped).
double node_cost(SplitCriterion c, double w, double wy) {
  if (w <= 0.0) return 0.0;
  if (c == SplitCriterion::Entropy) return w * binary_entropy(wy, w);
  return -(wy * wy) / w;
}

struct Candidate {
  bool valid = false;
  double cost = 0.0;  // children cost; lower is better
  std::size_t feature = 0;
  double threshold = 0.0;
  std::size_t bin = 0;  // Best mode: left iff bin <= this
};

class Grower {
 public:
  Grower(const TreeTrainingSet& set, const TreeParams& params, Rng& rng, std::vector<double>* importance)
      : set_(set), params_(params), rng_(rng), importance_(importance) {
    const std::size_t cols = set.data != nullptr ? set.data->cols() : set.bins->cols();
    if (set.allowed_features.empty()) {
      features_.resize(cols);
      std::iota(features_.begin(), features_.end(), std::size_t{0});
    } else {
      features_.assign(set.allowed_features.begin(), set.allowed_features.end());
    }
    if (importance_ != nullptr) importance_->assign(cols, 0.0);
    const std::size_t n = set.targets.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (set.weights[i] > 0.0) rows_.push_back(i);
    }
  }

  std::vector<TreeNode> run() {
    if (rows_.empty()) throw DataError("cannot grow a tree on zero-weight data");
    nodes_.reserve(64);
    build(0, rows_.size(), 0);
    return std::move(nodes_);
  }

 private:
  std::int32_t build(std::size_t begin, std::size_t end, std::size_t depth) {
    double w = 0.0, wy = 0.0;
    bool constant = true;
    const double first_target = set_.targets[rows_[begin]];
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = rows_[k];
      w += set_.weights[i];
      wy += set_.weights[i] * set_.targets[i];
      if (set_.targets[i] != first_target) constant = false;
    }
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back(TreeNode{-1, 0.0, -1, -1, w > 0.0 ? wy / w : 0.0});

    const std::size_t n = end - begin;
    const bool depth_reached = params_.max_depth != 0 && depth >= params_.max_depth;
    if (constant || depth_reached || n < 2 * params_.min_samples_leaf || n < 2) return id;

    const Candidate best = find_split(begin, end);
    if (!best.valid) return id;

    const double parent_cost = node_cost(params_.criterion, w, wy);
    if (importance_ != nullptr) (*importance_)[best.feature] += std::max(0.0, parent_cost - best.cost);

    const auto mid_it = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(begin), rows_.begin() + static_cast<std::ptrdiff_t>(end),
        [&](std::size_t i) { return goes_left(i, best); });
    const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());

    nodes_[static_cast<std::size_t>(id)].feature = static_cast<std::int32_t>(best.feature);
    nodes_[static_cast<std::size_t>(id)].threshold = best.threshold;
    const std::int32_t left = build(begin, mid, depth + 1);
    const std::int32_t right = build(mid, end, depth + 1);
    nodes_[static_cast<std::size_t>(id)].left = left;
    nodes_[static_cast<std::size_t>(id)].right = right;
    return id;
  }

  bool goes_left(std::size_t i, const Candidate& c) const {
    if (params_.mode == ThresholdMode::Best) return set_.bins->bin(i, c.feature) <= c.bin;
    return set_.data->at(i, c.feature) <= c.threshold;
  }

  Candidate find_split(std::size_t begin, std::size_t end) {
    const std::size_t total = features_.size();
    const std::size_t wanted =
        params_.max_features == 0 ? total : std::min(params_.max_features, total);
    // Lazily shuffled candidate order; keep drawing past `wanted` until a
    // valid split turns up.
    Candidate best;
    for (std::size_t t = 0; t < total; ++t) {
      if (wanted < total) {
        const std::size_t j = t + static_cast<std::size_t>(rng_.below(total - t));
        std::swap(features_[t], features_[j]);
      }
      const std::size_t f = features_[t];
      const Candidate c = params_.mode == ThresholdMode::Best ? best_on_bins(f, begin, end)
                                                              : random_cut(f, begin, end);
      if (c.valid && (!best.valid || c.cost < best.cost)) best = c;
      if (t + 1 >= wanted && best.valid) break;
    }
    return best;
  }

  Candidate best_on_bins(std::size_t f, std::size_t begin, std::size_t end) {
    const std::size_t nb = set_.bins->bin_count(f);
    Candidate out;
    if (nb < 2) return out;
    hist_w_.assign(nb, 0.0);
    hist_wy_.assign(nb, 0.0);
    hist_n_.assign(nb, 0);
    const std::uint8_t* col = set_.bins->column_bins(f);
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = rows_[k];
      const std::uint8_t b = col[i];
      hist_w_[b] += set_.weights[i];
      hist_wy_[b] += set_.weights[i] * set_.targets[i];
      ++hist_n_[b];
    }
    double tw = 0.0, twy = 0.0;
    std::size_t tn = 0;
    for (std::size_t b = 0; b < nb; ++b) {
      tw += hist_w_[b];
      twy += hist_wy_[b];
      tn += hist_n_[b];
    }
    double lw = 0.0, lwy = 0.0;
    std::size_t ln = 0;
    for (std::size_t b = 0; b + 1 < nb; ++b) {
      lw += hist_w_[b];
      lwy += hist_wy_[b];
      ln += hist_n_[b];
      if (hist_n_[b] == 0) continue;  // same partition as the previous cut
      if (ln < params_.min_samples_leaf) continue;
      if (tn - ln < params_.min_samples_leaf) break;
      if (ln == tn) break;
      const double cost =
          node_cost(params_.criterion, lw, lwy) + node_cost(params_.criterion, tw - lw, twy - lwy);
      if (!out.valid || cost < out.cost) {
        out = Candidate{true, cost, f, set_.bins->threshold(f, b), b};
      }
    }
    return out;
  }

  Candidate random_cut(std::size_t f, std::size_t begin, std::size_t end) {
    Candidate out;
    double lo = set_.data->at(rows_[begin], f);
    double hi = lo;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = set_.data->at(rows_[k], f);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (!(hi > lo)) return out;
    double t = lo + rng_.uniform() * (hi - lo);
    if (t >= hi) t = lo;
    double lw = 0.0, lwy = 0.0, tw = 0.0, twy = 0.0;
    std::size_t ln = 0;
    for (std::size_t k = begin; k < end; ++k) {
      const std::size_t i = rows_[k];
      const double wi = set_.weights[i];
      tw += wi;
      twy += wi * set_.targets[i];
      if (set_.data->at(i, f) <= t) {
        lw += wi;
        lwy += wi * set_.targets[i];
        ++ln;
      }
    }
    const std::size_t n = end - begin;
    if (ln < params_.min_samples_leaf || n - ln < params_.min_samples_leaf) return out;
    out.valid = true;
    out.cost = node_cost(params_.criterion, lw, lwy) + node_cost(params_.criterion, tw - lw, twy - lwy);
    out.feature = f;
    out.threshold = t;
    return out;
  }

  const TreeTrainingSet& set_;
  const TreeParams& params_;
  Rng& rng_;
  std::vector<double>* importance_;
  std::vector<std::size_t> features_;
  std::vector<std::size_t> rows_;
  std::vector<TreeNode> nodes_;
  std::vector<double> hist_w_, hist_wy_;
  std::vector<std::size_t> hist_n_;
};

}  // namespace

DecisionTree DecisionTree::grow(const TreeTrainingSet& set, const TreeParams& params, Rng& rng,
                                std::vector<double>* importance) {
  if (params.mode == ThresholdMode::Best && set.bins == nullptr) {
    throw Error("best-split tree growth needs a binned matrix");
  }
  if (params.mode == ThresholdMode::Random && set.data == nullptr) {
    throw Error("random-threshold tree growth needs the raw dataset");
  }
  if (params.min_samples_leaf == 0) throw ConfigError("min_samples_leaf must be >= 1");
  Grower g(set, params, rng, importance);
  return DecisionTree(g.run());
}

double DecisionTree::predict(std::span<const double> x) const {
  std::size_t n = 0;
  while (nodes_[n].feature >= 0) {
    const TreeNode& node = nodes_[n];
    n = static_cast<std::size_t>(x[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                              : node.right);
  }
  return nodes_[n].value;
}

std::size_t DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  std::size_t best = 0;
  while (!stack.empty()) {
    const auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes_[n].feature >= 0) {
      stack.emplace_back(static_cast<std::size_t>(nodes_[n].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes_[n].right), d + 1);
    }
  }
  return best;
}

std::size_t DecisionTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

nlohmann::json DecisionTree::to_json() const {
  std::vector<std::int32_t> feature, left, right;
  std::vector<double> threshold, value;
  for (const auto& n : nodes_) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back(n.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

DecisionTree DecisionTree::from_json(const nlohmann::json& j) {
  const auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  const auto threshold = j.at("threshold").get<std::vector<double>>();
  const auto left = j.at("left").get<std::vector<std::int32_t>>();
  const auto right = j.at("right").get<std::vector<std::int32_t>>();
  const auto value = j.at("value").get<std::vector<double>>();
  const std::size_t n = feature.size();
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n || n == 0) {
    throw DataError("malformed tree document");
  }
  std::vector<TreeNode> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i] = TreeNode{feature[i], threshold[i], left[i], right[i], value[i]};
    if (feature[i] >= 0 && (left[i] <= 0 || right[i] <= 0 || static_cast<std::size_t>(left[i]) >= n ||
                            static_cast<std::size_t>(right[i]) >= n)) {
      throw DataError("malformed tree document: bad child index");
    }
  }
  return DecisionTree(std::move(nodes));
}

}  // namespace bpm::models
