#include "bpm/models/rough_kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bpm/common/error.hpp"
#include "bpm/common/random.hpp"
#include "bpm/models/classifiers.hpp"
#include "bpm/simd/kernels.hpp"
#include "loaders.hpp"

namespace bpm::models {

namespace {

void validate(const RoughKMeansParams& p) {
  if (p.k < 2) throw ConfigError("rough k-means needs k >= 2");
  if (!(p.w_lower > 0.0) || !(p.w_upper > 0.0) || std::abs(p.w_lower + p.w_upper - 1.0) > 1e-9) {
    throw ConfigError("rough k-means weights must be positive and sum to 1");
  }
  if (!(p.epsilon >= 0.0)) throw ConfigError("rough k-means epsilon must be >= 0");
  if (p.max_iterations == 0) throw ConfigError("rough k-means needs max_iterations >= 1");
}

std::size_t nearest_of(std::span<const double> centers, std::size_t k, std::span<const double> x,
                       std::vector<double>& dist) {
  const std::size_t dims = x.size();
  dist.resize(k);
  std::size_t best = 0;
  for (std::size_t c = 0; c < k; ++c) {
    dist[c] = std::sqrt(simd::squared_distance(centers.subspan(c * dims, dims), x));
    if (dist[c] < dist[best]) best = c;
  }
  return best;
}

void assign(const data::Dataset& points, RoughClusterModel& m) {
  const std::size_t n = points.rows();
  m.lower_of.assign(n, -1);
  m.upper_of.assign(n, {});
  std::vector<double> dist;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t best = nearest_of(m.centers, m.k, points.row(i), dist);
    auto& upper = m.upper_of[i];
    upper.push_back(static_cast<int>(best));
    for (std::size_t c = 0; c < m.k; ++c) {
      if (c != best && dist[c] - dist[best] < m.epsilon) upper.push_back(static_cast<int>(c));
    }
    if (upper.size() == 1) {
      m.lower_of[i] = static_cast<int>(best);
    } else {
      std::sort(upper.begin(), upper.end());
    }
  }
}

// Returns the largest centre displacement.
double update(const data::Dataset& points, RoughClusterModel& m) {
  const std::size_t dims = m.dims;
  std::vector<double> lower_sum(m.k * dims, 0.0);
  std::vector<double> boundary_sum(m.k * dims, 0.0);
  std::vector<std::size_t> lower_count(m.k, 0);
  std::vector<std::size_t> boundary_count(m.k, 0);
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto x = points.row(i);
    if (m.lower_of[i] >= 0) {
      const auto c = static_cast<std::size_t>(m.lower_of[i]);
      simd::axpy(1.0, x, {lower_sum.data() + c * dims, dims});
      ++lower_count[c];
    } else {
      for (const int c : m.upper_of[i]) {
        simd::axpy(1.0, x, {boundary_sum.data() + static_cast<std::size_t>(c) * dims, dims});
        ++boundary_count[static_cast<std::size_t>(c)];
      }
    }
  }
  double shift = 0.0;
  std::vector<double> next(dims);
  for (std::size_t c = 0; c < m.k; ++c) {
    const double nl = static_cast<double>(lower_count[c]);
    const double nb = static_cast<double>(boundary_count[c]);
    double wl = 0.0;
    double wb = 0.0;
    if (lower_count[c] > 0 && boundary_count[c] > 0) {
      wl = m.w_lower / nl;
      wb = m.w_upper / nb;
    } else if (lower_count[c] > 0) {
      wl = 1.0 / nl;
    } else if (boundary_count[c] > 0) {
      wb = 1.0 / nb;
    } else {
      continue;  // empty cluster keeps its centre
    }
    for (std::size_t j = 0; j < dims; ++j) {
      next[j] = wl * lower_sum[c * dims + j] + wb * boundary_sum[c * dims + j];
    }
    auto center = std::span<double>(m.centers.data() + c * dims, dims);
    shift = std::max(shift, std::sqrt(simd::squared_distance(next, center)));
    std::copy(next.begin(), next.end(), center.begin());
  }
  return shift;
}

void attach_labels(const data::Dataset& points, RoughClusterModel& m) {
  std::vector<std::size_t> lower[2] = {std::vector<std::size_t>(m.k, 0), std::vector<std::size_t>(m.k, 0)};
  std::vector<std::size_t> upper[2] = {std::vector<std::size_t>(m.k, 0), std::vector<std::size_t>(m.k, 0)};
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto y = points.label(i);
    if (m.lower_of[i] >= 0) ++lower[y][static_cast<std::size_t>(m.lower_of[i])];
    for (const int c : m.upper_of[i]) ++upper[y][static_cast<std::size_t>(c)];
  }
  m.labels.assign(m.k, 0);
  for (std::size_t c = 0; c < m.k; ++c) {
    const bool has_lower = lower[0][c] + lower[1][c] > 0;
    const auto& counts = has_lower ? lower : upper;
    m.labels[c] = counts[1][c] > counts[0][c] ? 1 : 0;
  }
}

}  // namespace

std::vector<double> kmeans_plus_plus(const data::Dataset& points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.rows();
  const std::size_t dims = points.cols();
  if (k == 0 || n == 0) throw DataError("k-means++ needs points and k >= 1");
  Rng rng(seed);
  std::vector<double> centers;
  centers.reserve(k * dims);
  const auto first = points.row(static_cast<std::size_t>(rng.below(n)));
  centers.insert(centers.end(), first.begin(), first.end());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    const std::span<const double> last(centers.data() + (c - 1) * dims, dims);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], simd::squared_distance(points.row(i), last));
      total += d2[i];
    }
    if (!(total > 0.0)) {
      throw DataError("k = " + std::to_string(k) + " exceeds the number of distinct points");
    }
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    const auto row = points.row(pick);
    centers.insert(centers.end(), row.begin(), row.end());
  }
  return centers;
}

double mean_nearest_gap(const data::Dataset& points, std::span<const double> centers, std::size_t k) {
  if (k < 2 || points.rows() == 0) return 0.0;
  std::vector<double> dist;
  double sum = 0.0;
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const std::size_t best = nearest_of(centers, k, points.row(i), dist);
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != best) second = std::min(second, dist[c]);
    }
    sum += second - dist[best];
  }
  return sum / static_cast<double>(points.rows());
}

RoughClusterModel rough_kmeans_fit(const data::Dataset& points, const RoughKMeansParams& params,
                                   std::uint64_t seed) {
  validate(params);
  return rough_kmeans_fit(points, params, kmeans_plus_plus(points, params.k, seed));
}

RoughClusterModel rough_kmeans_fit(const data::Dataset& points, const RoughKMeansParams& params,
                                   std::vector<double> initial_centers) {
  validate(params);
  if (initial_centers.size() != params.k * points.cols()) {
    throw DataError("initial centres do not match k x dims");
  }
  RoughClusterModel m;
  m.k = params.k;
  m.dims = points.cols();
  m.centers = std::move(initial_centers);
  m.epsilon = params.epsilon;
  m.w_lower = params.w_lower;
  m.w_upper = params.w_upper;
  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    assign(points, m);
    const double shift = update(points, m);
    m.iterations = it + 1;
    if (shift < params.tolerance) {
      m.converged = true;
      break;
    }
  }
  assign(points, m);
  attach_labels(points, m);
  return m;
}

std::size_t nearest_center(const RoughClusterModel& model, std::span<const double> x) {
  std::vector<double> dist;
  return nearest_of(model.centers, model.k, x, dist);
}

std::uint8_t rough_predict(const RoughClusterModel& model, std::span<const double> x) {
  return model.labels[nearest_center(model, x)];
}

nlohmann::json RoughClusterModel::to_json() const {
  return {{"k", k},
          {"dims", dims},
          {"centers", centers},
          {"epsilon", epsilon},
          {"w_lower", w_lower},
          {"w_upper", w_upper},
          {"labels", labels},
          {"iterations", iterations},
          {"converged", converged}};
}

RoughClusterModel RoughClusterModel::from_json(const nlohmann::json& j) {
  RoughClusterModel m;
  m.k = j.at("k").get<std::size_t>();
  m.dims = j.at("dims").get<std::size_t>();
  m.centers = j.at("centers").get<std::vector<double>>();
  m.epsilon = j.at("epsilon").get<double>();
  m.w_lower = j.at("w_lower").get<double>();
  m.w_upper = j.at("w_upper").get<double>();
  m.labels = j.at("labels").get<std::vector<std::uint8_t>>();
  m.iterations = j.at("iterations").get<std::size_t>();
  m.converged = j.at("converged").get<bool>();
  if (m.centers.size() != m.k * m.dims || m.labels.size() != m.k) {
    throw DataError("malformed rough cluster document");
  }
  return m;
}

// ---- classifier ------------------------------------------------------------------

RoughSetModel::RoughSetModel(Standardizer scaler, RoughClusterModel clusters)
    : scaler_(std::move(scaler)), clusters_(std::move(clusters)) {
  if (scaler_.size() != clusters_.dims) throw DataError("rough-set model: scaler and centres differ in size");
}

double RoughSetModel::score(std::span<const double>) const {
  throw CapabilityError("the rough-set model gives decisions only and has no score");
}

std::uint8_t RoughSetModel::predict(std::span<const double> x) const {
  const auto z = scaler_.apply(x);
  return rough_predict(clusters_, z);
}

nlohmann::json RoughSetModel::state() const {
  return {{"scaler", scaler_.to_json()}, {"clusters", clusters_.to_json()}};
}

std::unique_ptr<RoughSetModel> fit_rough_set(const ClassifierSpec& spec, const data::Dataset& train) {
  RoughKMeansParams p;
  p.k = detail::as_count(spec, "k", 2);
  p.w_lower = spec.param("w_lower");
  p.w_upper = spec.param("w_upper");
  p.max_iterations = detail::as_count(spec, "max_iter", 1);
  p.tolerance = spec.param("tol");
  validate(RoughKMeansParams{p.k, 0.0, p.w_lower, p.w_upper, p.max_iterations, p.tolerance});

  const Standardizer scaler = Standardizer::fit(train);
  const data::Dataset z(train.columns(), scaler.transform(train),
                        std::vector<std::uint8_t>(train.labels().begin(), train.labels().end()));
  auto init = kmeans_plus_plus(z, p.k, derive_seed(spec.seed, "rs/init"));
  const double eps = spec.param("epsilon");
  p.epsilon = eps >= 0.0 ? eps : spec.param("epsilon_fraction") * mean_nearest_gap(z, init, p.k);
  auto clusters = rough_kmeans_fit(z, p, std::move(init));
  const bool converged = clusters.converged;
  // Training memberships are not needed for prediction.
  clusters.lower_of.clear();
  clusters.upper_of.clear();
  auto model = std::make_unique<RoughSetModel>(scaler, std::move(clusters));
  model->set_converged(converged);
  return model;
}

namespace detail {

std::unique_ptr<TrainedModel> load_rough_set(const nlohmann::json& s) {
  return std::make_unique<RoughSetModel>(Standardizer::from_json(s.at("scaler")),
                                         RoughClusterModel::from_json(s.at("clusters")));
}

}  // namespace detail

}  // namespace bpm::models
