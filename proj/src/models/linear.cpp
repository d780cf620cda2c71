#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/models/classifiers.hpp"
#include "bpm/simd/kernels.hpp"
#include "loaders.hpp"

namespace bpm::models {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Standardised rows with a trailing constant 1 column.
RowMatrix augmented(const Standardizer& scaler, const data::Dataset& d) {
  RowMatrix x(static_cast<Eigen::Index>(d.rows()), static_cast<Eigen::Index>(d.cols() + 1));
  for (std::size_t i = 0; i < d.rows(); ++i) {
    double* out = x.row(static_cast<Eigen::Index>(i)).data();
    scaler.apply(d.row(i), std::span<double>(out, d.cols()));
    out[d.cols()] = 1.0;
  }
  return x;
}

// log(1 + e^z) without overflow
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

// ---- logistic regression -----------------------------------------------------

LogisticModel::LogisticModel(Standardizer scaler, std::vector<double> weights, double bias)
    : scaler_(std::move(scaler)), weights_(std::move(weights)), bias_(bias) {
  if (scaler_.size() != weights_.size()) throw DataError("logistic model: scaler and weight sizes differ");
}

double LogisticModel::score(std::span<const double> x) const {
  const auto z = scaler_.apply(x);
  return logistic(simd::dot(z, weights_) + bias_);
}

nlohmann::json LogisticModel::state() const {
  return {{"scaler", scaler_.to_json()}, {"weights", weights_}, {"bias", bias_}};
}

std::unique_ptr<LogisticModel> fit_logistic(const ClassifierSpec& spec, const data::Dataset& train) {
  const double l2 = spec.param("l2");
  const double tol = spec.param("tol");
  const std::size_t max_iter = detail::as_count(spec, "max_iter", 1);
  if (l2 < 0.0) throw ConfigError("LR l2 must be >= 0");

  const Standardizer scaler = Standardizer::fit(train);
  const RowMatrix x = augmented(scaler, train);
  const auto n = x.rows();
  const auto p = x.cols();
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = train.label(static_cast<std::size_t>(i));

  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(p, l2);
  penalty[p - 1] = 0.0;

  auto loss_at = [&](const Eigen::VectorXd& beta) {
    const Eigen::VectorXd z = x * beta;
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += softplus(z[i]) - y[i] * z[i];
    return s / static_cast<double>(n) + 0.5 * beta.cwiseProduct(penalty).dot(beta);
  };

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  double loss = loss_at(beta);
  bool converged = false;
  Eigen::VectorXd prob(n);
  Eigen::VectorXd curvature(n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd z = x * beta;
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = logistic(z[i]);
      curvature[i] = prob[i] * (1.0 - prob[i]);
    }
    const Eigen::VectorXd grad =
        x.transpose() * (prob - y) / static_cast<double>(n) + penalty.cwiseProduct(beta);
    if (grad.lpNorm<Eigen::Infinity>() < tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd hessian = x.transpose() * (x.array().colwise() * curvature.array()).matrix();
    hessian /= static_cast<double>(n);
    hessian.diagonal() += penalty + Eigen::VectorXd::Constant(p, 1e-10);
    const Eigen::VectorXd step = hessian.ldlt().solve(-grad);

    // Backtracking (Armijo) line search.
    const double slope = grad.dot(step);
    double t = 1.0;
    double next_loss = loss_at(beta + step);
    while (next_loss > loss + 1e-4 * t * slope && t > 1e-10) {
      t *= 0.5;
      next_loss = loss_at(beta + t * step);
    }
    if (!(next_loss <= loss)) {
      converged = true;  // no further progress possible in double precision
      break;
    }
    beta += t * step;
    const double change = loss - next_loss;
    loss = next_loss;
    if (change <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(loss))) {
      converged = true;
      break;
    }
  }

  std::vector<double> weights(beta.data(), beta.data() + p - 1);
  auto model = std::make_unique<LogisticModel>(scaler, std::move(weights), beta[p - 1]);
  model->set_converged(converged);
  return model;
}

// ---- linear SVM ---------------------------------------------------------------

LinearSvmModel::LinearSvmModel(Standardizer scaler, std::vector<double> weights, double bias)
    : scaler_(std::move(scaler)), weights_(std::move(weights)), bias_(bias) {
  if (scaler_.size() != weights_.size()) throw DataError("SVM model: scaler and weight sizes differ");
}

double LinearSvmModel::decision(std::span<const double> x) const {
  const auto z = scaler_.apply(x);
  return simd::dot(z, weights_) + bias_;
}

double LinearSvmModel::score(std::span<const double> x) const { return logistic(decision(x)); }

nlohmann::json LinearSvmModel::state() const {
  return {{"scaler", scaler_.to_json()}, {"weights", weights_}, {"bias", bias_}};
}

// Dual coordinate descent for the L1-loss (hinge) SVM
//   min 0.5 ||w||^2 + C sum_i max(0, 1 - y_i w . x_i)
// with the bias folded in as a constant feature.
std::unique_ptr<LinearSvmModel> fit_linear_svm(const ClassifierSpec& spec, const data::Dataset& train) {
  const double c = spec.param("c");
  const double tol = spec.param("tol");
  const std::size_t max_epochs = detail::as_count(spec, "max_epochs", 1);
  if (!(c > 0.0)) throw ConfigError("SVM c must be > 0");
  if (!(tol > 0.0)) throw ConfigError("SVM tol must be > 0");

  const Standardizer scaler = Standardizer::fit(train);
  const RowMatrix x = augmented(scaler, train);
  const std::size_t n = train.rows();
  const std::size_t p = train.cols() + 1;
  auto row = [&](std::size_t i) { return std::span<const double>(x.row(static_cast<Eigen::Index>(i)).data(), p); };

  std::vector<double> y(n);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = train.label(i) == 1 ? 1.0 : -1.0;
    q[i] = simd::dot(row(i), row(i));
  }
  std::vector<double> alpha(n, 0.0);
  std::vector<double> w(p, 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(spec.seed, "svm"));

  bool converged = false;
  for (std::size_t epoch = 0; epoch < max_epochs; ++epoch) {
    rng.shuffle(order);
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (const std::size_t i : order) {
      const double g = y[i] * simd::dot(w, row(i)) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (alpha[i] >= c) {
        pg = std::max(g, 0.0);
      }
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg != 0.0) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / q[i], 0.0, c);
        simd::axpy((alpha[i] - old) * y[i], row(i), w);
      }
    }
    if (pg_max - pg_min < tol) {
      converged = true;
      break;
    }
  }

  const double bias = w.back();
  w.pop_back();
  auto model = std::make_unique<LinearSvmModel>(scaler, std::move(w), bias);
  model->set_converged(converged);
  return model;
}

namespace detail {

std::unique_ptr<TrainedModel> load_logistic(const nlohmann::json& s) {
  return std::make_unique<LogisticModel>(Standardizer::from_json(s.at("scaler")),
                                         s.at("weights").get<std::vector<double>>(), s.at("bias").get<double>());
}

std::unique_ptr<TrainedModel> load_linear_svm(const nlohmann::json& s) {
  return std::make_unique<LinearSvmModel>(Standardizer::from_json(s.at("scaler")),
                                          s.at("weights").get<std::vector<double>>(), s.at("bias").get<double>());
}

}  // namespace detail

}  // namespace bpm::models
