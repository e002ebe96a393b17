#pragma once

#include <functional>

#include <Eigen/Dense>

namespace gpgrade {

struct ObjectiveValue {
  double value;
  Eigen::VectorXd gradient;
};

/// Objective to be minimized. Non-finite values are treated as infeasible
/// and make the line search back off.
using Objective = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

struct BfgsOptions {
  int max_iterations = 200;
  double value_tolerance = 1e-6;     // stop when |f_k - f_{k+1}| < tol
  double gradient_tolerance = 1e-5;  // stop when |g|_inf < tol
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double max_step = 2.0;  // cap on the step length in parameter space
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  bool converged = false;
};

/// Dense BFGS with an Armijo backtracking line search. Every accepted step
/// decreases the objective, so the result is never worse than the start.
BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x0,
                         const BfgsOptions& options = {});

}  // namespace gpgrade
