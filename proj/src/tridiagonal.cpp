#include "resetfp/tridiagonal.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "resetfp/error.hpp"

namespace resetfp {

ThomasFactorization::ThomasFactorization(const Tridiagonal& matrix)
    : lower_(matrix.lower), pivot_(matrix.size()), upper_scaled_(matrix.size(), 0.0) {
  const std::size_t n = matrix.size();
  if (n == 0) throw Error(Errc::InvalidArgument, "empty tridiagonal system");
  for (std::size_t i = 0; i < n; ++i) {
    double pivot = matrix.diag[i];
    if (i > 0) pivot -= matrix.lower[i] * upper_scaled_[i - 1];
    if (!(std::abs(pivot) > std::numeric_limits<double>::min())) {
      throw Error(Errc::IllConditioned, "zero pivot in tridiagonal solve at row " + std::to_string(i));
    }
    pivot_[i] = pivot;
    if (i + 1 < n) upper_scaled_[i] = matrix.upper[i] / pivot;
  }
}

std::vector<double> ThomasFactorization::solve(std::span<const double> rhs) const {
  const std::size_t n = pivot_.size();
  if (rhs.size() != n) throw Error(Errc::InvalidArgument, "right-hand side size mismatch");
  std::vector<double> u(n);
  u[0] = rhs[0] / pivot_[0];
  for (std::size_t i = 1; i < n; ++i) {
    u[i] = (rhs[i] - lower_[i] * u[i - 1]) / pivot_[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) {
    u[i] -= upper_scaled_[i] * u[i + 1];
  }
  return u;
}

}  // namespace resetfp
