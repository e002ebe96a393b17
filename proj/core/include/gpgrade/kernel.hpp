#pragma once

#include <Eigen/Dense>

namespace gpgrade {

/// Row-major storage keeps one sample per contiguous row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
/// Column-major square matrices for the linear algebra side.
using SquareMatrix = Eigen::MatrixXd;

/// Smallest noise variance the model will ever use.
inline constexpr double kNoiseVarianceFloor = 1e-8;

/// RBF kernel hyperparameters, stored as logs so the optimizer works in an
/// unconstrained space.
///
/// Convention: k(x, y) = sf2 * exp(-|x - y|^2 / (2 * ell^2)), where ell is the
/// length-scale and sf2 the signal variance. The noise variance sn2 is only
/// added to the diagonal by the regression layer.
struct Hyperparams {
  double log_length_scale = 0.0;
  double log_signal_variance = 0.0;
  double log_noise_variance = -2.0;

  static Hyperparams from_natural(double length_scale, double signal_variance,
                                  double noise_variance);

  double length_scale() const;
  double signal_variance() const;
  /// exp(log_noise_variance), floored at kNoiseVarianceFloor.
  double noise_variance() const;
  /// True when the noise floor is active (gradient w.r.t. the log is zero).
  bool noise_at_floor() const;

  /// Throws InputError when any field is non-finite.
  void validate() const;

  friend bool operator==(const Hyperparams&, const Hyperparams&) = default;
};

/// Single kernel evaluation from the direct difference x - y.
double rbf_eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                const Hyperparams& hp);

/// Pairwise squared distances via |a|^2 + |b|^2 - 2 a.b, clamped at zero.
SquareMatrix squared_distances(const Matrix& a, const Matrix& b);

/// Symmetric variant: exact zeros on the diagonal and an exactly mirrored
/// lower triangle.
SquareMatrix squared_distances(const Matrix& a);

/// Cross-covariance K(A, B), n x m.
SquareMatrix kernel_matrix(const Matrix& a, const Matrix& b, const Hyperparams& hp);

/// Gram matrix K(A, A) without any noise term. Exactly symmetric with
/// diagonal sf2.
SquareMatrix kernel_matrix(const Matrix& a, const Hyperparams& hp);

struct KernelGradients {
  SquareMatrix d_log_length_scale;
  SquareMatrix d_log_signal_variance;
};

/// Derivatives of the noise-free gram matrix with respect to the two kernel
/// log-parameters.
KernelGradients kernel_matrix_gradients(const Matrix& a, const Hyperparams& hp);

}  // namespace gpgrade
