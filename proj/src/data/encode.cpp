#include "bpm/data/encode.hpp"

#include <algorithm>
#include <set>

#include "bpm/common/error.hpp"

namespace bpm::data {

std::vector<std::string> default_feature_names() {
  std::vector<std::string> out;
  for (const auto& f : joined_fields()) {
    if (f.kind == FieldKind::Numeric || f.kind == FieldKind::Categorical) out.emplace_back(f.name);
  }
  return out;
}

Encoder Encoder::fit(const LabeledVintage& training, std::vector<std::string> feature_names) {
  Encoder enc;
  for (const auto& name : feature_names) {
    const JoinedField* f = find_joined_field(name);
    if (f == nullptr) throw DataError("feature '" + name + "' is not present in the joined records");
    switch (f->kind) {
      case FieldKind::Date:
        throw DataError("feature '" + name +
                        "' is a date field; date fields are excluded from model inputs");
      case FieldKind::Key:
        throw DataError("feature '" + name + "' is an identifier and cannot be a model input");
      case FieldKind::Code:
        throw DataError("feature '" + name + "' defines the target label");
      default:
        break;
    }
    enc.fields_.push_back(f);
    if (f->kind == FieldKind::Categorical) {
      std::set<std::string> seen;
      for (const auto& r : training.rows) {
        const auto& v = joined_text(training, r, *f);
        if (!v.empty() && v != kNotAvailable) seen.insert(v);
      }
      std::vector<std::string> vocab{std::string(kNotAvailable)};
      vocab.insert(vocab.end(), seen.begin(), seen.end());
      enc.vocabularies_[name] = std::move(vocab);
    }
  }
  enc.feature_names_ = std::move(feature_names);
  return enc;
}

const std::vector<std::string>& Encoder::vocabulary(const std::string& feature) const {
  static const std::vector<std::string> kEmpty;
  const auto it = vocabularies_.find(feature);
  return it == vocabularies_.end() ? kEmpty : it->second;
}

Dataset Encoder::transform(const LabeledVintage& vintage) const {
  const std::size_t cols = fields_.size();
  std::vector<Column> columns;
  columns.reserve(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    if (fields_[j]->kind == FieldKind::Categorical) {
      columns.push_back({feature_names_[j], ColumnKind::Categorical, vocabulary(feature_names_[j]).size()});
    } else {
      columns.push_back({feature_names_[j], ColumnKind::Numeric, 0});
    }
  }
  std::vector<double> values(vintage.rows.size() * cols);
  std::vector<std::uint8_t> labels(vintage.rows.size());
  std::vector<std::uint32_t> groups(vintage.rows.size());
  for (std::size_t j = 0; j < cols; ++j) {
    const JoinedField& f = *fields_[j];
    if (f.kind == FieldKind::Categorical) {
      const auto& vocab = vocabulary(feature_names_[j]);
      for (std::size_t i = 0; i < vintage.rows.size(); ++i) {
        const auto& v = joined_text(vintage, vintage.rows[i], f);
        const auto it = std::lower_bound(vocab.begin() + 1, vocab.end(), v);
        const bool known = it != vocab.end() && *it == v;
        values[i * cols + j] = known ? static_cast<double>(it - vocab.begin()) : 0.0;
      }
    } else {
      for (std::size_t i = 0; i < vintage.rows.size(); ++i) {
        const double v = joined_number(vintage, vintage.rows[i], f);
        // Uncleaned input: treat a missing numeric as 0, matching the cleaning rule.
        values[i * cols + j] = is_missing(v) ? 0.0 : v;
      }
    }
  }
  for (std::size_t i = 0; i < vintage.rows.size(); ++i) {
    labels[i] = vintage.rows[i].defaulted;
    groups[i] = vintage.rows[i].origination_index;
  }
  return Dataset(std::move(columns), std::move(values), std::move(labels), std::move(groups),
                 vintage.vintage_year);
}

Dataset encode(const LabeledVintage& vintage, std::vector<std::string> feature_names) {
  return Encoder::fit(vintage, std::move(feature_names)).transform(vintage);
}

}  // namespace bpm::data
