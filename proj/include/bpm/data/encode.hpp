#pragma once

#include <map>
#include <string>
#include <vector>

#include "bpm/data/dataset.hpp"
#include "bpm/data/vintage.hpp"

namespace bpm::data {

// Joined fields usable as model inputs: everything except dates, identifiers
// and zeroBalanceCode, in joined-layout order.
std::vector<std::string> default_feature_names();

// Ordinal encoder for categorical fields. Code 0 is always "Not Available";
// categories seen while fitting get codes 1.. in lexicographic order. Values
// not seen while fitting map to code 0.
class Encoder {
 public:
  // Throws DataError for unknown names and for date, identifier or label
  // fields.
  static Encoder fit(const LabeledVintage& training, std::vector<std::string> feature_names);

  Dataset transform(const LabeledVintage& vintage) const;

  const std::vector<std::string>& feature_names() const { return feature_names_; }
  // Vocabulary for a categorical feature (index = code); empty for numerics.
  const std::vector<std::string>& vocabulary(const std::string& feature) const;

 private:
  std::vector<std::string> feature_names_;
  std::vector<const JoinedField*> fields_;
  std::map<std::string, std::vector<std::string>> vocabularies_;
};

// fit + transform on the same data.
Dataset encode(const LabeledVintage& vintage, std::vector<std::string> feature_names);

}  // namespace bpm::data
