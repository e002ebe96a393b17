#pragma once

#include <array>

#include "gpgrade/kernel.hpp"

namespace gpgrade {

/// Jitter multipliers tried in order, relative to mean(diag(M)).
inline constexpr std::array<double, 5> kJitterLadder = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};

struct CholeskyResult {
  /// Lower triangular, L * L^T = M + jitter * I.
  SquareMatrix lower;
  double jitter = 0.0;
};

/// Plain Cholesky factorization. Returns the failing diagonal index, or -1
/// on success; `lower` is only meaningful on success.
std::ptrdiff_t cholesky_in_place(const SquareMatrix& m, SquareMatrix& lower);

/// Factorizes M, escalating diagonal jitter through kJitterLadder until one
/// level succeeds. Throws NumericalError (carrying the last failing index)
/// when every level fails.
CholeskyResult cholesky_with_jitter(const SquareMatrix& m);

/// Solves L L^T x = b for a lower Cholesky factor.
Vector cholesky_solve(const SquareMatrix& lower, const Vector& b);

/// (L L^T)^{-1}.
SquareMatrix cholesky_inverse(const SquareMatrix& lower);

}  // namespace gpgrade
