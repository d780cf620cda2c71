#include "bpm/data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"

namespace bpm::data {

namespace {

// Distinct groups per stratum, in first-appearance order.
struct Strata {
  std::vector<std::uint32_t> groups[2];
  std::map<std::uint32_t, std::size_t> slot;  // group -> position in its stratum
  std::map<std::uint32_t, std::uint8_t> label;
};

Strata strata_of(const Dataset& d) {
  std::map<std::uint32_t, std::uint8_t> label;
  std::vector<std::uint32_t> order;
  for (std::size_t i = 0; i < d.rows(); ++i) {
    const auto g = d.groups()[i];
    auto [it, fresh] = label.emplace(g, d.label(i));
    if (fresh) order.push_back(g);
    it->second = static_cast<std::uint8_t>(it->second | d.label(i));
  }
  Strata s;
  s.label = std::move(label);
  for (const auto g : order) s.groups[s.label[g]].push_back(g);
  return s;
}

}  // namespace

std::vector<std::uint8_t> stratified_group_holdout(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("holdout fraction must lie in (0, 1)");
  Strata s = strata_of(d);
  Rng rng(seed);
  std::map<std::uint32_t, std::uint8_t> held;
  for (int cls = 0; cls < 2; ++cls) {
    auto& groups = s.groups[cls];
    if (groups.size() < 2) {
      throw DataError("cannot stratify: class " + std::to_string(cls) + " has " + std::to_string(groups.size()) +
                      " customer(s)");
    }
    auto take = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(groups.size())));
    take = std::clamp<std::size_t>(take, 1, groups.size() - 1);
    rng.shuffle(groups);
    for (std::size_t k = 0; k < groups.size(); ++k) held[groups[k]] = k < take ? 1 : 0;
  }
  std::vector<std::uint8_t> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) out[i] = held[d.groups()[i]];
  return out;
}

std::vector<std::size_t> stratified_group_folds(const Dataset& d, std::size_t folds, std::uint64_t seed) {
  if (folds < 2) throw ConfigError("need at least two folds");
  Strata s = strata_of(d);
  Rng rng(seed);
  std::map<std::uint32_t, std::size_t> fold_of;
  for (auto& groups : s.groups) {
    rng.shuffle(groups);
    for (std::size_t k = 0; k < groups.size(); ++k) fold_of[groups[k]] = k % folds;
  }
  std::vector<std::size_t> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) out[i] = fold_of[d.groups()[i]];
  return out;
}

}  // namespace bpm::data
