#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "bpm/common/error.hpp"
#include "bpm/models/classifiers.hpp"
#include "loaders.hpp"

namespace bpm::models {

namespace {

constexpr double kLogTwoPi = 1.8378770664093453;

std::size_t code_of(double v, std::size_t cardinality) {
  if (!(v >= 0.0)) return 0;
  const auto c = static_cast<std::size_t>(std::llround(v));
  return c < cardinality ? c : 0;
}

}  // namespace

// ---- naive Bayes ----------------------------------------------------------------

NaiveBayesModel::NaiveBayesModel(std::vector<data::Column> columns, ClassStats negative, ClassStats positive)
    : columns_(std::move(columns)), stats_{std::move(negative), std::move(positive)} {}

double NaiveBayesModel::log_likelihood(std::span<const double> x, int cls) const {
  const ClassStats& s = stats_[cls];
  double ll = s.log_prior;
  std::size_t num = 0;
  std::size_t cat = 0;
  for (std::size_t j = 0; j < columns_.size(); ++j) {
    if (columns_[j].kind == data::ColumnKind::Categorical) {
      const auto& freq = s.log_freq[cat++];
      ll += freq[code_of(x[j], freq.size())];
    } else {
      const double d = x[j] - s.mean[num];
      const double v = s.variance[num++];
      ll += -0.5 * (kLogTwoPi + std::log(v) + d * d / v);
    }
  }
  return ll;
}

double NaiveBayesModel::score(std::span<const double> x) const {
  return logistic(log_likelihood(x, 1) - log_likelihood(x, 0));
}

nlohmann::json NaiveBayesModel::state() const {
  auto cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    cols.push_back({{"name", c.name},
                    {"categorical", c.kind == data::ColumnKind::Categorical},
                    {"cardinality", c.cardinality}});
  }
  auto stats = nlohmann::json::array();
  for (const auto& s : stats_) {
    stats.push_back(
        {{"log_prior", s.log_prior}, {"mean", s.mean}, {"variance", s.variance}, {"log_freq", s.log_freq}});
  }
  return {{"columns", cols}, {"classes", stats}};
}

std::unique_ptr<NaiveBayesModel> fit_naive_bayes(const ClassifierSpec& spec, const data::Dataset& train) {
  const double smoothing = spec.param("var_smoothing");
  if (smoothing < 0.0) throw ConfigError("NB var_smoothing must be >= 0");
  const auto& columns = train.columns();
  const std::size_t n = train.rows();

  NaiveBayesModel::ClassStats stats[2];
  double max_variance = 0.0;
  for (int cls = 0; cls < 2; ++cls) {
    auto& s = stats[cls];
    const std::size_t count = train.count_label(static_cast<std::uint8_t>(cls));
    s.log_prior = std::log(static_cast<double>(count) / static_cast<double>(n));
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].kind == data::ColumnKind::Categorical) {
        const std::size_t card = std::max<std::size_t>(columns[j].cardinality, 1);
        std::vector<double> freq(card, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (train.label(i) == cls) freq[code_of(train.at(i, j), card)] += 1.0;
        }
        const double total = static_cast<double>(count + card);
        for (auto& f : freq) f = std::log(f / total);
        s.log_freq.push_back(std::move(freq));
      } else {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (train.label(i) == cls) mean += train.at(i, j);
        }
        mean /= static_cast<double>(count);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (train.label(i) == cls) var += (train.at(i, j) - mean) * (train.at(i, j) - mean);
        }
        var /= static_cast<double>(count);
        s.mean.push_back(mean);
        s.variance.push_back(var);
        max_variance = std::max(max_variance, var);
      }
    }
  }
  // Variance floor relative to the widest feature, plus an absolute floor for
  // all-constant data.
  const double floor = std::max(smoothing * max_variance, 1e-12);
  for (auto& s : stats) {
    for (auto& v : s.variance) v += floor;
  }
  return std::make_unique<NaiveBayesModel>(columns, std::move(stats[0]), std::move(stats[1]));
}

// ---- quadratic discriminant -------------------------------------------------------

QdaModel::QdaModel(Standardizer scaler, ClassStats negative, ClassStats positive)
    : scaler_(std::move(scaler)), stats_{std::move(negative), std::move(positive)} {}

double QdaModel::discriminant(std::span<const double> x, int cls) const {
  const ClassStats& s = stats_[cls];
  const std::size_t d = scaler_.size();
  const auto z = scaler_.apply(x);
  std::vector<double> c(d);
  for (std::size_t j = 0; j < d; ++j) c[j] = z[j] - s.mean[j];
  double quad = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    double row = 0.0;
    for (std::size_t b = 0; b < d; ++b) row += s.precision[a * d + b] * c[b];
    quad += c[a] * row;
  }
  return s.log_prior - 0.5 * s.log_det - 0.5 * quad;
}

double QdaModel::score(std::span<const double> x) const { return logistic(discriminant(x, 1) - discriminant(x, 0)); }

nlohmann::json QdaModel::state() const {
  auto stats = nlohmann::json::array();
  for (const auto& s : stats_) {
    stats.push_back(
        {{"log_prior", s.log_prior}, {"mean", s.mean}, {"precision", s.precision}, {"log_det", s.log_det}});
  }
  return {{"scaler", scaler_.to_json()}, {"classes", stats}};
}

std::unique_ptr<QdaModel> fit_qda(const ClassifierSpec& spec, const data::Dataset& train) {
  const double reg = spec.param("reg");
  if (!(reg > 0.0)) throw ConfigError("MDA reg must be > 0");
  const Standardizer scaler = Standardizer::fit(train);
  const std::size_t d = train.cols();
  const std::size_t n = train.rows();
  const auto di = static_cast<Eigen::Index>(d);

  QdaModel::ClassStats stats[2];
  std::vector<double> z(d);
  for (int cls = 0; cls < 2; ++cls) {
    const std::size_t count = train.count_label(static_cast<std::uint8_t>(cls));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(di);
    Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(di, di);
    for (std::size_t i = 0; i < n; ++i) {
      if (train.label(i) != cls) continue;
      scaler.apply(train.row(i), z);
      mean += Eigen::Map<const Eigen::VectorXd>(z.data(), di);
    }
    mean /= static_cast<double>(count);
    for (std::size_t i = 0; i < n; ++i) {
      if (train.label(i) != cls) continue;
      scaler.apply(train.row(i), z);
      const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(z.data(), di) - mean;
      scatter.selfadjointView<Eigen::Lower>().rankUpdate(c);
    }
    Eigen::MatrixXd cov = scatter.selfadjointView<Eigen::Lower>();
    cov /= static_cast<double>(count > 1 ? count - 1 : 1);

    // Grow the ridge until the factorisation succeeds.
    double lambda = reg;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
      Eigen::MatrixXd a = cov;
      a.diagonal().array() += lambda;
      llt.compute(a);
      if (llt.info() == Eigen::Success) break;
      lambda *= 10.0;
      if (lambda > 1e6) throw DataError("MDA covariance is not positive definite");
    }
    auto& s = stats[cls];
    s.log_prior = std::log(static_cast<double>(count) / static_cast<double>(n));
    s.mean.assign(mean.data(), mean.data() + d);
    const Eigen::MatrixXd precision = llt.solve(Eigen::MatrixXd::Identity(di, di));
    s.precision.resize(d * d);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        s.precision[a * d + b] = precision(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
      }
    }
    s.log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  }
  return std::make_unique<QdaModel>(scaler, std::move(stats[0]), std::move(stats[1]));
}

namespace detail {

std::unique_ptr<TrainedModel> load_naive_bayes(const nlohmann::json& s) {
  std::vector<data::Column> columns;
  for (const auto& c : s.at("columns")) {
    columns.push_back({c.at("name").get<std::string>(),
                       c.at("categorical").get<bool>() ? data::ColumnKind::Categorical : data::ColumnKind::Numeric,
                       c.at("cardinality").get<std::size_t>()});
  }
  NaiveBayesModel::ClassStats stats[2];
  for (int cls = 0; cls < 2; ++cls) {
    const auto& j = s.at("classes").at(static_cast<std::size_t>(cls));
    stats[cls].log_prior = j.at("log_prior").get<double>();
    stats[cls].mean = j.at("mean").get<std::vector<double>>();
    stats[cls].variance = j.at("variance").get<std::vector<double>>();
    stats[cls].log_freq = j.at("log_freq").get<std::vector<std::vector<double>>>();
  }
  return std::make_unique<NaiveBayesModel>(std::move(columns), std::move(stats[0]), std::move(stats[1]));
}

std::unique_ptr<TrainedModel> load_qda(const nlohmann::json& s) {
  QdaModel::ClassStats stats[2];
  for (int cls = 0; cls < 2; ++cls) {
    const auto& j = s.at("classes").at(static_cast<std::size_t>(cls));
    stats[cls].log_prior = j.at("log_prior").get<double>();
    stats[cls].mean = j.at("mean").get<std::vector<double>>();
    stats[cls].precision = j.at("precision").get<std::vector<double>>();
    stats[cls].log_det = j.at("log_det").get<double>();
  }
  return std::make_unique<QdaModel>(Standardizer::from_json(s.at("scaler")), std::move(stats[0]),
                                    std::move(stats[1]));
}

}  // namespace detail

}  // namespace bpm::models
