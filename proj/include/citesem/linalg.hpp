#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "citesem/errors.hpp"

namespace citesem {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

// Orients v so that its largest-magnitude component is positive. The first
// index wins among equal magnitudes.
inline void fix_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  Eigen::Index arg = 0;
  double best = std::abs(v(0));
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (std::abs(v(i)) > best) {
      best = std::abs(v(i));
      arg = i;
    }
  }
  if (v(arg) < 0) v = -v;
}

// Eigenpairs of a symmetric matrix, values non-increasing, each vector
// sign-fixed.
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

inline EigenPairs symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw DomainError("symmetric_eigen: matrix is not square");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw DomainError("symmetric_eigen: solver did not converge");
  const Eigen::Index m = sym.rows();
  EigenPairs out{Vector(m), Matrix(m, m)};
  // Eigen returns ascending order.
  for (Eigen::Index j = 0; j < m; ++j) {
    out.values(j) = solver.eigenvalues()(m - 1 - j);
    out.vectors.col(j) = solver.eigenvectors().col(m - 1 - j);
    fix_sign(out.vectors.col(j));
  }
  return out;
}

inline RowVector column_means(const Matrix& x) { return x.colwise().mean(); }

inline Matrix centered(const Matrix& x) { return x.rowwise() - column_means(x); }

// Sample covariance (n-1 denominator). Requires at least two rows.
inline Matrix sample_covariance(const Matrix& x) {
  if (x.rows() < 2) throw DomainError("sample_covariance: need at least 2 rows");
  const Matrix c = centered(x);
  return (c.transpose() * c) / static_cast<double>(x.rows() - 1);
}

// Number of eigenvalues above a relative tolerance of the largest one.
inline Eigen::Index numerical_rank(const Vector& eigenvalues, double rel_tol = 1e-10) {
  if (eigenvalues.size() == 0) return 0;
  const double top = eigenvalues.maxCoeff();
  if (top <= 0) return 0;
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    if (eigenvalues(i) > rel_tol * top) ++r;
  return r;
}

}  // namespace citesem
