#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gpgrade/dataset.hpp"
#include "gpgrade/kernel.hpp"
#include "gpgrade/optimizer.hpp"

namespace gpgrade {

/// Posterior predictive at one query point, in grade units.
struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

struct LmlResult {
  double lml = 0.0;
  /// d lml / d (log ell, log sf2, log sn2).
  Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
  /// Diagonal jitter the factorization needed on top of sn2.
  double jitter = 0.0;
};

/// Log evidence of y under a zero-mean GP with RBF kernel plus noise, and its
/// analytic gradient via 0.5 * tr((a a^T - C^{-1}) dC/dtheta).
LmlResult log_marginal_likelihood(const Matrix& x, const Vector& y, const Hyperparams& hp);

/// Evidence only; skips the O(n^3) inverse the gradient needs.
double log_marginal_likelihood_value(const Matrix& x, const Vector& y, const Hyperparams& hp);

struct FitConfig {
  /// Larger training sets are uniformly subsampled down to this size.
  std::size_t max_train = 2000;
  int restarts = 3;
  std::uint64_t seed = 0;
  BfgsOptions optimizer{};
};

/// Trained regression state. Immutable once built; safe to share across
/// threads for prediction.
class GPModel {
 public:
  GPModel() = default;

  /// Factorizes K + sn2 I for fixed hyperparameters and precomputes alpha.
  static GPModel condition(Matrix x_train, Vector y_train, const Hyperparams& hp,
                           NormStats normalizer = {}, std::uint64_t subset_seed = 0,
                           bool subsampled = false);

  const Hyperparams& hyperparams() const { return hp_; }
  const Matrix& x_train() const { return x_train_; }
  const Vector& y_train() const { return y_train_; }
  const SquareMatrix& chol_lower() const { return chol_lower_; }
  const Vector& alpha() const { return alpha_; }
  double jitter() const { return jitter_; }
  double log_marginal_likelihood() const { return lml_; }
  const NormStats& normalizer() const { return normalizer_; }
  std::uint64_t train_subset_seed() const { return subset_seed_; }
  bool subsampled() const { return subsampled_; }

  Eigen::Index n_train() const { return x_train_.rows(); }
  Eigen::Index dimension() const { return x_train_.cols(); }

  /// Replaces the embedded normalizer (the model's training inputs are
  /// assumed to already be in normalized space).
  void set_normalizer(NormStats stats) { normalizer_ = std::move(stats); }

 private:
  Hyperparams hp_{};
  Matrix x_train_;
  Vector y_train_;
  SquareMatrix chol_lower_;
  Vector alpha_;
  double jitter_ = 0.0;
  double lml_ = 0.0;
  NormStats normalizer_;
  std::uint64_t subset_seed_ = 0;
  bool subsampled_ = false;
};

/// Median Euclidean distance over all distinct row pairs.
double median_pairwise_distance(const Matrix& x);

/// Starting points for the evidence search, one per restart.
std::vector<Hyperparams> initial_hyperparams(const Matrix& x, const Vector& y, int restarts,
                                             std::uint64_t seed);

/// Learns hyperparameters by maximizing the evidence from several starts and
/// conditions on the best. Targets are used as-is (no centering).
GPModel fit(const Matrix& x, const Vector& y, const FitConfig& config);

/// Grade-label entry point: checks every grade is in 0..4 before fitting.
GPModel fit_grades(const Matrix& x, std::span<const int> grades, const FitConfig& config);

/// Posterior mean k*^T alpha and std sqrt(sf2 - |L^{-1} k*|^2 + sn2).
std::vector<Prediction> predict(const GPModel& model, const Matrix& queries);

}  // namespace gpgrade
