#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace resetfp {

/// Tridiagonal matrix, row i reads lower[i] u[i-1] + diag[i] u[i] + upper[i] u[i+1].
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;

  explicit Tridiagonal(std::size_t n) : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0) {}
  std::size_t size() const { return diag.size(); }
};

/// Thomas elimination, factored once and applied to several right-hand sides.
/// Throws IllConditioned on a zero (or denormal) pivot.
class ThomasFactorization {
 public:
  explicit ThomasFactorization(const Tridiagonal& matrix);

  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  std::vector<double> lower_;
  std::vector<double> pivot_;
  std::vector<double> upper_scaled_;
};

}  // namespace resetfp
