#include "gpgrade/cholesky.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpgrade/error.hpp"

namespace gpgrade {

namespace {

constexpr Eigen::Index kBlock = 64;

// Unblocked left-looking factorization of the leading n x n block of `a`
// (lower triangle, in place). Returns the failing column or -1.
std::ptrdiff_t factor_block(Eigen::Ref<SquareMatrix> a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    const double pivot = a(j, j) - a.row(j).head(j).squaredNorm();
    if (!(pivot > 0.0) || !std::isfinite(pivot)) return j;
    const double ljj = std::sqrt(pivot);
    a(j, j) = ljj;
    const Eigen::Index rest = n - j - 1;
    if (rest > 0) {
      a.col(j).tail(rest) =
          (a.col(j).tail(rest) - a.block(j + 1, 0, rest, j) * a.row(j).head(j).transpose()) / ljj;
    }
  }
  return -1;
}

}  // namespace

std::ptrdiff_t cholesky_in_place(const SquareMatrix& m, SquareMatrix& lower) {
  const Eigen::Index n = m.rows();
  lower = m;
  // Right-looking blocked variant: factor the diagonal block, solve the panel
  // below it, then apply a symmetric rank-k update to the trailing block.
  for (Eigen::Index k = 0; k < n; k += kBlock) {
    const Eigen::Index b = std::min(kBlock, n - k);
    const Eigen::Index rest = n - k - b;
    auto diag = lower.block(k, k, b, b);
    const std::ptrdiff_t failed = factor_block(diag);
    if (failed >= 0) return k + failed;
    if (rest > 0) {
      auto panel = lower.block(k + b, k, rest, b);
      diag.triangularView<Eigen::Lower>().transpose().solveInPlace<Eigen::OnTheRight>(panel);
      lower.block(k + b, k + b, rest, rest).selfadjointView<Eigen::Lower>().rankUpdate(panel, -1.0);
    }
  }
  lower.triangularView<Eigen::StrictlyUpper>().setZero();
  return -1;
}

CholeskyResult cholesky_with_jitter(const SquareMatrix& m) {
  if (m.rows() != m.cols()) throw InputError("cholesky: matrix is not square");
  if (m.rows() == 0) throw InputError("cholesky: empty matrix");
  if (!m.allFinite()) throw NumericalError("cholesky: non-finite entries");

  const double scale = m.diagonal().mean();
  CholeskyResult result;
  std::ptrdiff_t failed_at = -1;
  for (const double level : kJitterLadder) {
    const double jitter = level * scale;
    if (level > 0.0 && !(jitter > 0.0)) continue;
    SquareMatrix shifted = m;
    shifted.diagonal().array() += jitter;
    failed_at = cholesky_in_place(shifted, result.lower);
    if (failed_at < 0) {
      result.jitter = jitter;
      return result;
    }
  }
  throw NumericalError("cholesky: matrix not positive definite after maximum jitter (diagonal " +
                           std::to_string(failed_at) + ")",
                       failed_at);
}

Vector cholesky_solve(const SquareMatrix& lower, const Vector& b) {
  const auto l = lower.triangularView<Eigen::Lower>();
  Vector x = l.solve(b);
  l.transpose().solveInPlace(x);
  return x;
}

SquareMatrix cholesky_inverse(const SquareMatrix& lower) {
  const Eigen::Index n = lower.rows();
  SquareMatrix lower_inv = SquareMatrix::Identity(n, n);
  lower.triangularView<Eigen::Lower>().solveInPlace(lower_inv);
  // (L L^T)^{-1} = L^{-T} L^{-1}, accumulated as a symmetric rank-n update.
  SquareMatrix inv = SquareMatrix::Zero(n, n);
  inv.selfadjointView<Eigen::Lower>().rankUpdate(lower_inv.transpose());
  inv.triangularView<Eigen::StrictlyUpper>() = inv.transpose();
  return inv;
}

}  // namespace gpgrade
