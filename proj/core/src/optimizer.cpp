#include "gpgrade/optimizer.hpp"

#include <cmath>

namespace gpgrade {

namespace {

bool finite(const ObjectiveValue& v) {
  return std::isfinite(v.value) && v.gradient.allFinite();
}

}  // namespace

BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options) {
  const Eigen::Index dim = x0.size();
  BfgsResult result;
  result.x = std::move(x0);
  ObjectiveValue current = objective(result.x);
  result.value = current.value;
  result.gradient = current.gradient;
  if (!finite(current)) return result;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (current.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd direction = -h_inv * current.gradient;
    double slope = current.gradient.dot(direction);
    if (!(slope < 0.0)) {
      // Curvature information went bad; fall back to steepest descent.
      h_inv.setIdentity();
      direction = -current.gradient;
      slope = -current.gradient.squaredNorm();
    }
    const double norm = direction.norm();
    if (norm > options.max_step) {
      direction *= options.max_step / norm;
      slope *= options.max_step / norm;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_next;
    ObjectiveValue next;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      x_next = result.x + step * direction;
      next = objective(x_next);
      if (finite(next) && next.value <= current.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= options.backtrack;
    }
    result.iterations = iter + 1;
    if (!accepted) break;

    const Eigen::VectorXd s = x_next - result.x;
    const Eigen::VectorXd y = next.gradient - current.gradient;
    const double decrease = current.value - next.value;

    result.x = x_next;
    current = std::move(next);
    result.value = current.value;
    result.gradient = current.gradient;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (iter == 0) h_inv *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }

    if (std::abs(decrease) < options.value_tolerance) {
      result.converged = true;
      break;
    }
  }
  if (current.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
    result.converged = true;
  }
  return result;
}

}  // namespace gpgrade
