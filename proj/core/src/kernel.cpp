#include "gpgrade/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpgrade/error.hpp"

namespace gpgrade {

Hyperparams Hyperparams::from_natural(double length_scale, double signal_variance,
                                      double noise_variance) {
  if (!(length_scale > 0.0) || !(signal_variance > 0.0) || !(noise_variance > 0.0)) {
    throw InputError("hyperparameters must be strictly positive");
  }
  return {std::log(length_scale), std::log(signal_variance), std::log(noise_variance)};
}

double Hyperparams::length_scale() const { return std::exp(log_length_scale); }
double Hyperparams::signal_variance() const { return std::exp(log_signal_variance); }

double Hyperparams::noise_variance() const {
  return std::max(std::exp(log_noise_variance), kNoiseVarianceFloor);
}

bool Hyperparams::noise_at_floor() const {
  return std::exp(log_noise_variance) <= kNoiseVarianceFloor;
}

void Hyperparams::validate() const {
  if (!std::isfinite(log_length_scale) || !std::isfinite(log_signal_variance) ||
      !std::isfinite(log_noise_variance)) {
    throw InputError("hyperparameters must be finite");
  }
}

double rbf_eval(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y,
                const Hyperparams& hp) {
  if (x.size() != y.size()) {
    throw InputError("rbf_eval: dimension mismatch (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() == 0) throw InputError("rbf_eval: empty vectors");
  const double ell = hp.length_scale();
  return hp.signal_variance() * std::exp(-(x - y).squaredNorm() / (2.0 * ell * ell));
}

namespace {

void check_same_dimension(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw InputError("kernel: feature dimension mismatch (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.cols()) + ")");
  }
}

SquareMatrix rbf_from_sqdist(SquareMatrix d2, const Hyperparams& hp) {
  const double ell = hp.length_scale();
  const double scale = -1.0 / (2.0 * ell * ell);
  const double sf2 = hp.signal_variance();
  d2 = (d2.array() * scale).exp() * sf2;
  return d2;
}

}  // namespace

SquareMatrix squared_distances(const Matrix& a, const Matrix& b) {
  check_same_dimension(a, b);
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  SquareMatrix d2 = -2.0 * (a * b.transpose());
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return d2.cwiseMax(0.0);
}

SquareMatrix squared_distances(const Matrix& a) {
  const Eigen::Index n = a.rows();
  const Vector an = a.rowwise().squaredNorm();
  SquareMatrix gram = a * a.transpose();
  SquareMatrix d2(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    d2(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = std::max(an[i] + an[j] - 2.0 * gram(i, j), 0.0);
      d2(i, j) = v;
      d2(j, i) = v;
    }
  }
  return d2;
}

SquareMatrix kernel_matrix(const Matrix& a, const Matrix& b, const Hyperparams& hp) {
  return rbf_from_sqdist(squared_distances(a, b), hp);
}

SquareMatrix kernel_matrix(const Matrix& a, const Hyperparams& hp) {
  return rbf_from_sqdist(squared_distances(a), hp);
}

KernelGradients kernel_matrix_gradients(const Matrix& a, const Hyperparams& hp) {
  if (a.rows() == 0) throw InputError("kernel_matrix_gradients: empty input");
  const SquareMatrix d2 = squared_distances(a);
  SquareMatrix k = rbf_from_sqdist(d2, hp);
  const double ell2 = std::exp(2.0 * hp.log_length_scale);
  SquareMatrix d_ell = k.cwiseProduct(d2) / ell2;
  return {std::move(d_ell), std::move(k)};
}

}  // namespace gpgrade
