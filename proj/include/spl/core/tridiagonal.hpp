#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "spl/core/errors.hpp"

namespace spl {

/// Tridiagonal matrix stored by diagonals; lower[0] and upper[n-1] are unused.
struct Tridiagonal {
  std::vector<double> lower, diag, upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const noexcept { return diag.size(); }

  std::vector<double> apply(const std::vector<double>& x) const {
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = diag[i] * x[i];
      if (i > 0) s += lower[i] * x[i - 1];
      if (i + 1 < n) s += upper[i] * x[i + 1];
      y[i] = s;
    }
    return y;
  }

  /// Thomas algorithm. Stable for the diagonally dominant M-matrices built here.
  std::vector<double> solve(std::vector<double> rhs) const {
    const std::size_t n = size();
    if (rhs.size() != n) throw InvalidParameter("tridiagonal solve: size mismatch");
    if (n == 0) return rhs;
    std::vector<double> c(n, 0.0);
    double beta = diag[0];
    if (beta == 0.0 || !std::isfinite(beta)) throw StepFailure("singular tridiagonal pivot", 0.0);
    c[0] = n > 1 ? upper[0] / beta : 0.0;
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
      beta = diag[i] - lower[i] * c[i - 1];
      if (beta == 0.0 || !std::isfinite(beta)) throw StepFailure("singular tridiagonal pivot", 0.0);
      c[i] = i + 1 < n ? upper[i] / beta : 0.0;
      rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
    return rhs;
  }
};

}  // namespace spl
