#pragma once

#include <cstdint>
#include <vector>

#include "bpm/data/dataset.hpp"

namespace bpm::data {

// Customer-level stratification: a group is positive when any of its rows is.

// Per-row holdout flags. Each stratum sends llround(fraction * groups) whole
// groups to the holdout, clamped so both sides keep at least one group of
// each class. Throws DataError when a class has fewer than two groups.
std::vector<std::uint8_t> stratified_group_holdout(const Dataset& d, double fraction, std::uint64_t seed);

// Per-row fold index in [0, folds). Groups of each stratum are dealt
// round-robin over the folds after a seeded shuffle.
std::vector<std::size_t> stratified_group_folds(const Dataset& d, std::size_t folds, std::uint64_t seed);

}  // namespace bpm::data
