#pragma once

// Principal component analysis and the Kaiser / Broken-Stick component-count
// rules.

#include <cstddef>
#include <vector>

#include "citesem/errors.hpp"
#include "citesem/linalg.hpp"

namespace citesem {

struct PcaModel {
  RowVector mean;
  Matrix axes;         // columns, orthonormal, sign-fixed
  Vector eigenvalues;  // non-increasing, clamped to >= 0

  Eigen::Index dimension() const { return axes.rows(); }
  Eigen::Index rank() const { return numerical_rank(eigenvalues); }

  // Coordinates of the rows of x on the first p axes.
  Matrix project(const Matrix& x, Eigen::Index p) const {
    return (x.rowwise() - mean) * axes.leftCols(p);
  }
  Matrix reconstruct(const Matrix& coords) const {
    return (coords * axes.leftCols(coords.cols()).transpose()).rowwise() + mean;
  }
};

inline PcaModel fit_pca(const Matrix& x) {
  if (x.rows() < 2) throw DomainError("fit_pca: need at least 2 rows");
  auto eig = symmetric_eigen(sample_covariance(x));
  for (auto& v : eig.values)
    if (v < 0) v = 0;
  return {column_means(x), std::move(eig.vectors), std::move(eig.values)};
}

namespace detail {

inline double positive_total(const Vector& eigenvalues) {
  double total = 0;
  for (double v : eigenvalues) total += v > 0 ? v : 0;
  if (!(total > 0)) throw DomainError("component count: spectrum has no positive eigenvalue");
  return total;
}

}  // namespace detail

// Eigenvalues strictly greater than the mean eigenvalue; at least 1.
inline std::size_t kaiser_count(const Vector& eigenvalues) {
  detail::positive_total(eigenvalues);
  const double mean = eigenvalues.mean();
  std::size_t k = 0;
  for (double v : eigenvalues)
    if (v > mean) ++k;
  return k == 0 ? 1 : k;
}

// Broken-stick expectations b_i = (1/m) sum_{j=i..m} 1/j, i = 1..m.
inline std::vector<double> broken_stick_expectations(std::size_t m) {
  std::vector<double> b(m);
  double tail = 0;
  for (std::size_t i = m; i >= 1; --i) {
    tail += 1.0 / static_cast<double>(i);
    b[i - 1] = tail / static_cast<double>(m);
  }
  return b;
}

// Leading run of components whose variance share strictly exceeds the
// broken-stick expectation; at least 1. Expects non-increasing eigenvalues.
inline std::size_t broken_stick_count(const Vector& eigenvalues) {
  const double total = detail::positive_total(eigenvalues);
  const auto b = broken_stick_expectations(static_cast<std::size_t>(eigenvalues.size()));
  std::size_t k = 0;
  while (k < b.size() && eigenvalues(static_cast<Eigen::Index>(k)) / total > b[k]) ++k;
  return k == 0 ? 1 : k;
}

}  // namespace citesem
