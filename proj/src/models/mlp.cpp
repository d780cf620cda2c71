#include "bpm/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bpm/common/error.hpp"
#include "bpm/models/classifiers.hpp"
#include "bpm/simd/kernels.hpp"
#include "loaders.hpp"

namespace bpm::models {

std::size_t MlpShape::param_count() const { return layer_offset(layer_count()); }

std::size_t MlpShape::layer_offset(std::size_t l) const {
  std::size_t off = 0;
  for (std::size_t k = 0; k < l; ++k) off += layer_outputs(k) * (layer_inputs(k) + 1);
  return off;
}

std::vector<double> mlp_init(const MlpShape& shape, Rng& rng) {
  std::vector<double> params(shape.param_count(), 0.0);
  for (std::size_t l = 0; l < shape.layer_count(); ++l) {
    const std::size_t in = shape.layer_inputs(l);
    const double sd = std::sqrt(2.0 / static_cast<double>(in));
    double* w = params.data() + shape.layer_offset(l);
    for (std::size_t k = 0; k < shape.layer_outputs(l) * in; ++k) w[k] = rng.normal(0.0, sd);
  }
  return params;
}

namespace {

// Forward pass keeping every layer's activations; returns the output logit.
double forward(const MlpShape& shape, std::span<const double> params, std::span<const double> x,
               std::vector<std::vector<double>>& acts) {
  acts.resize(shape.layer_count());
  std::span<const double> in = x;
  double logit = 0.0;
  for (std::size_t l = 0; l < shape.layer_count(); ++l) {
    const std::size_t ni = shape.layer_inputs(l);
    const std::size_t no = shape.layer_outputs(l);
    const double* w = params.data() + shape.layer_offset(l);
    const double* b = w + no * ni;
    if (l + 1 == shape.layer_count()) {
      logit = simd::dot({w, ni}, in) + b[0];
      break;
    }
    auto& out = acts[l];
    out.resize(no);
    for (std::size_t o = 0; o < no; ++o) out[o] = std::max(0.0, simd::dot({w + o * ni, ni}, in) + b[o]);
    in = out;
  }
  return logit;
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

double mlp_logit(const MlpShape& shape, std::span<const double> params, std::span<const double> x) {
  std::vector<std::vector<double>> acts;
  return forward(shape, params, x, acts);
}

double mlp_loss_and_gradient(const MlpShape& shape, std::span<const double> params,
                             std::span<const double> inputs, std::span<const double> targets, double l2,
                             std::vector<double>& grad) {
  const std::size_t rows = targets.size();
  if (rows == 0 || inputs.size() != rows * shape.inputs || params.size() != shape.param_count()) {
    throw DataError("mlp_loss_and_gradient: shape mismatch");
  }
  grad.assign(params.size(), 0.0);
  std::vector<std::vector<double>> acts;
  std::vector<double> delta;
  std::vector<double> prev_delta;
  const double scale = 1.0 / static_cast<double>(rows);
  double loss = 0.0;

  for (std::size_t r = 0; r < rows; ++r) {
    const std::span<const double> x(inputs.data() + r * shape.inputs, shape.inputs);
    const double z = forward(shape, params, x, acts);
    loss += softplus(z) - targets[r] * z;
    delta.assign(1, (logistic(z) - targets[r]) * scale);
    for (std::size_t l = shape.layer_count(); l-- > 0;) {
      const std::size_t ni = shape.layer_inputs(l);
      const std::size_t no = shape.layer_outputs(l);
      const std::size_t off = shape.layer_offset(l);
      const std::span<const double> in = l == 0 ? x : std::span<const double>(acts[l - 1]);
      double* gw = grad.data() + off;
      double* gb = gw + no * ni;
      for (std::size_t o = 0; o < no; ++o) {
        simd::axpy(delta[o], in, {gw + o * ni, ni});
        gb[o] += delta[o];
      }
      if (l == 0) break;
      prev_delta.assign(ni, 0.0);
      const double* w = params.data() + off;
      for (std::size_t o = 0; o < no; ++o) simd::axpy(delta[o], {w + o * ni, ni}, prev_delta);
      for (std::size_t i = 0; i < ni; ++i) {
        if (acts[l - 1][i] <= 0.0) prev_delta[i] = 0.0;
      }
      std::swap(delta, prev_delta);
    }
  }
  loss *= scale;

  if (l2 > 0.0) {
    for (std::size_t l = 0; l < shape.layer_count(); ++l) {
      const std::size_t off = shape.layer_offset(l);
      const std::size_t count = shape.layer_outputs(l) * shape.layer_inputs(l);
      for (std::size_t k = off; k < off + count; ++k) {
        loss += 0.5 * l2 * params[k] * params[k];
        grad[k] += l2 * params[k];
      }
    }
  }
  return loss;
}

// ---- classifier -------------------------------------------------------------------

MlpModel::MlpModel(Standardizer scaler, MlpShape shape, std::vector<double> params)
    : scaler_(std::move(scaler)), shape_(std::move(shape)), params_(std::move(params)) {
  if (params_.size() != shape_.param_count() || scaler_.size() != shape_.inputs) {
    throw DataError("MLP parameters do not match the network shape");
  }
}

double MlpModel::score(std::span<const double> x) const {
  const auto z = scaler_.apply(x);
  return logistic(mlp_logit(shape_, params_, z));
}

nlohmann::json MlpModel::state() const {
  return {{"scaler", scaler_.to_json()}, {"inputs", shape_.inputs}, {"hidden", shape_.hidden}, {"params", params_}};
}

// Mini-batch training with Adam steps.
std::unique_ptr<MlpModel> fit_mlp(const ClassifierSpec& spec, const data::Dataset& train) {
  const std::size_t layers = detail::as_count(spec, "hidden_layers", 1);
  const std::size_t units = detail::as_count(spec, "units", 1);
  const std::size_t epochs = detail::as_count(spec, "epochs", 1);
  const std::size_t batch = detail::as_count(spec, "batch_size", 1);
  const double lr = spec.param("learning_rate");
  const double l2 = spec.param("l2");
  if (!(lr > 0.0)) throw ConfigError("ANN learning_rate must be > 0");
  if (l2 < 0.0) throw ConfigError("ANN l2 must be >= 0");

  const Standardizer scaler = Standardizer::fit(train);
  const std::vector<double> x = scaler.transform(train);
  const std::size_t n = train.rows();
  const std::size_t d = train.cols();
  MlpShape shape{d, std::vector<std::size_t>(layers, units)};
  Rng rng(derive_seed(spec.seed, "mlp"));
  std::vector<double> params = mlp_init(shape, rng);

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  std::vector<double> m(params.size(), 0.0);
  std::vector<double> v(params.size(), 0.0);
  std::vector<double> grad;
  std::vector<double> bx;
  std::vector<double> by;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::size_t step = 0;
  bool finite = true;

  for (std::size_t e = 0; e < epochs && finite; ++e) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t end = std::min(n, start + batch);
      bx.resize((end - start) * d);
      by.resize(end - start);
      for (std::size_t k = start; k < end; ++k) {
        std::copy_n(x.data() + order[k] * d, d, bx.data() + (k - start) * d);
        by[k - start] = train.label(order[k]);
      }
      const double loss = mlp_loss_and_gradient(shape, params, bx, by, l2, grad);
      if (!std::isfinite(loss)) {
        finite = false;
        break;
      }
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      for (std::size_t k = 0; k < params.size(); ++k) {
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * grad[k];
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * grad[k] * grad[k];
        params[k] -= lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
      }
    }
  }
  auto model = std::make_unique<MlpModel>(scaler, std::move(shape), std::move(params));
  model->set_converged(finite);
  return model;
}

namespace detail {

std::unique_ptr<TrainedModel> load_mlp(const nlohmann::json& s) {
  MlpShape shape{s.at("inputs").get<std::size_t>(), s.at("hidden").get<std::vector<std::size_t>>()};
  return std::make_unique<MlpModel>(Standardizer::from_json(s.at("scaler")), std::move(shape),
                                    s.at("params").get<std::vector<double>>());
}

}  // namespace detail

}  // namespace bpm::models
