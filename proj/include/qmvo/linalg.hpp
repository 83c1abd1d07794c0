#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qmvo {

using SquareMatrix = std::vector<std::vector<double>>;

// Eigenvalues of a small symmetric matrix by cyclic Jacobi rotations.
// Sized for covariance matrices (n up to a few dozen); not a general
// purpose eigensolver.
inline std::vector<double> symmetric_eigenvalues(SquareMatrix a) {
  const std::size_t n = a.size();
  if (n == 0) throw std::invalid_argument("symmetric_eigenvalues: empty matrix");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("symmetric_eigenvalues: not square");
  if (n == 1) return {a[0][0]};

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += a[i][j] * a[i][j];
    return std::sqrt(2.0 * s);
  };

  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
  const double tol = (scale > 0 ? scale : 1.0) * 1e-15;

  for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) <= tol * 1e-2) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
  return eig;
}

inline double min_symmetric_eigenvalue(const SquareMatrix& a) {
  double lo = std::numeric_limits<double>::infinity();
  for (double e : symmetric_eigenvalues(a)) lo = std::min(lo, e);
  return lo;
}

}  // namespace qmvo
