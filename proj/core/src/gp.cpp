#include "gpgrade/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "gpgrade/cholesky.hpp"
#include "gpgrade/error.hpp"

namespace gpgrade {

namespace {

constexpr Eigen::Index kPredictBatch = 512;

void check_training_inputs(const Matrix& x, const Vector& y) {
  if (x.rows() < 2) throw InputError("gp: need at least 2 training rows");
  if (x.cols() < 1) throw InputError("gp: feature dimension must be >= 1");
  if (y.size() != x.rows()) {
    throw InputError("gp: " + std::to_string(x.rows()) + " inputs but " +
                     std::to_string(y.size()) + " targets");
  }
  if (!x.allFinite() || !y.allFinite()) throw InputError("gp: non-finite training data");
}

struct Factorized {
  CholeskyResult chol;
  Vector alpha;
  double lml;
};

Factorized factorize(const SquareMatrix& k, const Vector& y, double noise_variance) {
  SquareMatrix c = k;
  c.diagonal().array() += noise_variance;
  Factorized f{cholesky_with_jitter(c), {}, 0.0};
  f.alpha = cholesky_solve(f.chol.lower, y);
  const double n = static_cast<double>(y.size());
  f.lml = -0.5 * y.dot(f.alpha) - f.chol.lower.diagonal().array().log().sum() -
          0.5 * n * std::log(2.0 * std::numbers::pi);
  return f;
}

}  // namespace

LmlResult log_marginal_likelihood(const Matrix& x, const Vector& y, const Hyperparams& hp) {
  check_training_inputs(x, y);
  hp.validate();
  const KernelGradients grads = kernel_matrix_gradients(x, hp);
  const SquareMatrix& k = grads.d_log_signal_variance;
  const double sn2 = hp.noise_variance();
  const Factorized f = factorize(k, y, sn2);

  // W = alpha alpha^T - C^{-1}; each gradient is 0.5 * <W, dC/dtheta>.
  SquareMatrix w = -cholesky_inverse(f.chol.lower);
  w.noalias() += f.alpha * f.alpha.transpose();

  LmlResult out;
  out.lml = f.lml;
  out.jitter = f.chol.jitter;
  out.gradient[0] = 0.5 * w.cwiseProduct(grads.d_log_length_scale).sum();
  out.gradient[1] = 0.5 * w.cwiseProduct(k).sum();
  out.gradient[2] = hp.noise_at_floor() ? 0.0 : 0.5 * sn2 * w.trace();
  return out;
}

double log_marginal_likelihood_value(const Matrix& x, const Vector& y, const Hyperparams& hp) {
  check_training_inputs(x, y);
  hp.validate();
  return factorize(kernel_matrix(x, hp), y, hp.noise_variance()).lml;
}

GPModel GPModel::condition(Matrix x_train, Vector y_train, const Hyperparams& hp,
                           NormStats normalizer, std::uint64_t subset_seed, bool subsampled) {
  check_training_inputs(x_train, y_train);
  hp.validate();
  Factorized f = factorize(kernel_matrix(x_train, hp), y_train, hp.noise_variance());

  GPModel m;
  m.hp_ = hp;
  m.x_train_ = std::move(x_train);
  m.y_train_ = std::move(y_train);
  m.chol_lower_ = std::move(f.chol.lower);
  m.alpha_ = std::move(f.alpha);
  m.jitter_ = f.chol.jitter;
  m.lml_ = f.lml;
  m.normalizer_ = std::move(normalizer);
  m.subset_seed_ = subset_seed;
  m.subsampled_ = subsampled;
  return m;
}

double median_pairwise_distance(const Matrix& x) {
  if (x.rows() < 2) throw InputError("median_pairwise_distance: need at least 2 rows");
  const SquareMatrix d2 = squared_distances(x);
  const Eigen::Index n = x.rows();
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) upper.push_back(d2(i, j));
  }
  const std::size_t mid = upper.size() / 2;
  std::nth_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(mid), upper.end());
  double med = upper[mid];
  if (upper.size() % 2 == 0) {
    const double lower = *std::max_element(upper.begin(), upper.begin() + static_cast<std::ptrdiff_t>(mid));
    med = 0.5 * (med + lower);
  }
  return std::sqrt(med);
}

std::vector<Hyperparams> initial_hyperparams(const Matrix& x, const Vector& y, int restarts,
                                             std::uint64_t seed) {
  if (restarts < 1) throw InputError("restarts must be >= 1");
  double med = median_pairwise_distance(x);
  if (!(med > 0.0)) med = 1.0;

  const double n = static_cast<double>(y.size());
  const double mean = y.mean();
  double var = (y.array() - mean).square().sum() / n;
  if (!(var > 1e-12)) {
    // Constant targets: fall back to the second moment so sf2 can carry the level.
    var = std::max(y.squaredNorm() / n, 1e-2);
  }

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> log_ell(std::log(0.5 * med), std::log(2.0 * med));

  std::vector<Hyperparams> starts;
  starts.reserve(static_cast<std::size_t>(restarts));
  for (int r = 0; r < restarts; ++r) {
    Hyperparams hp;
    hp.log_length_scale = r == 0 ? std::log(med) : log_ell(rng);
    hp.log_signal_variance = std::log(var);
    hp.log_noise_variance = std::log(0.1 * var);
    starts.push_back(hp);
  }
  return starts;
}

namespace {

Hyperparams from_vector(const Eigen::VectorXd& v) { return {v[0], v[1], v[2]}; }
Eigen::VectorXd to_vector(const Hyperparams& hp) {
  return Eigen::Vector3d(hp.log_length_scale, hp.log_signal_variance, hp.log_noise_variance);
}

}  // namespace

GPModel fit(const Matrix& x, const Vector& y, const FitConfig& config) {
  check_training_inputs(x, y);
  if (config.max_train < 2) throw InputError("max_train must be >= 2");
  if (config.restarts < 1) throw InputError("restarts must be >= 1");

  Matrix xs;
  Vector ys;
  const auto n = static_cast<std::size_t>(x.rows());
  const bool subsample = n > config.max_train;
  if (subsample) {
    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::mt19937_64 rng(config.seed);
    // Partial Fisher-Yates: the first max_train slots become the subset.
    for (std::size_t i = 0; i < config.max_train; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(config.max_train);
    std::sort(idx.begin(), idx.end());
    xs = x(idx, Eigen::all);
    ys = y(idx);
  } else {
    xs = x;
    ys = y;
  }

  const Objective objective = [&](const Eigen::VectorXd& theta) -> ObjectiveValue {
    const Hyperparams hp = from_vector(theta);
    if (!theta.allFinite() || theta.cwiseAbs().maxCoeff() > 50.0) {
      return {std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(3)};
    }
    try {
      const LmlResult r = log_marginal_likelihood(xs, ys, hp);
      return {-r.lml, -Eigen::VectorXd(r.gradient)};
    } catch (const NumericalError&) {
      return {std::numeric_limits<double>::infinity(), Eigen::VectorXd::Zero(3)};
    }
  };

  bool found = false;
  Hyperparams best{};
  double best_lml = -std::numeric_limits<double>::infinity();
  for (const Hyperparams& start : initial_hyperparams(xs, ys, config.restarts, config.seed)) {
    const BfgsResult r = minimize_bfgs(objective, to_vector(start), config.optimizer);
    if (!std::isfinite(r.value)) continue;
    const double lml = -r.value;
    if (!found || lml > best_lml) {
      found = true;
      best_lml = lml;
      best = from_vector(r.x);
    }
  }
  if (!found) throw OptimizationError("gp fit: log marginal likelihood non-finite at every restart");

  return GPModel::condition(std::move(xs), std::move(ys), best, {}, config.seed, subsample);
}

GPModel fit_grades(const Matrix& x, std::span<const int> grades, const FitConfig& config) {
  Vector y(static_cast<Eigen::Index>(grades.size()));
  for (std::size_t i = 0; i < grades.size(); ++i) {
    validate_grade(grades[i]);
    y[static_cast<Eigen::Index>(i)] = grades[i];
  }
  return fit(x, y, config);
}

std::vector<Prediction> predict(const GPModel& model, const Matrix& queries) {
  if (model.n_train() == 0) throw InputError("predict: model is empty");
  if (queries.cols() != model.dimension()) {
    throw InputError("predict: query dimension " + std::to_string(queries.cols()) +
                     " does not match model dimension " + std::to_string(model.dimension()));
  }
  const Hyperparams& hp = model.hyperparams();
  const double prior = hp.signal_variance() + hp.noise_variance();
  const auto lower = model.chol_lower().triangularView<Eigen::Lower>();

  std::vector<Prediction> out(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index start = 0; start < queries.rows(); start += kPredictBatch) {
    const Eigen::Index m = std::min(kPredictBatch, queries.rows() - start);
    const Matrix block = queries.middleRows(start, m);
    SquareMatrix k_star = kernel_matrix(model.x_train(), block, hp);  // n x m
    const Vector mean = k_star.transpose() * model.alpha();
    lower.solveInPlace(k_star);
    const Vector reduction = k_star.colwise().squaredNorm().transpose();
    for (Eigen::Index j = 0; j < m; ++j) {
      const double var = std::max(prior - reduction[j], 0.0);
      out[static_cast<std::size_t>(start + j)] = {mean[j], std::sqrt(var)};
    }
  }
  return out;
}

}  // namespace gpgrade
