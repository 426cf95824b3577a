#pragma once

// Supervised PCA: the orthonormal projection V maximizing
//
//   D_C = D_B - (alpha/2) (D_W1 + D_W2)
//
// where D_B averages squared projected distances over cross-class pairs and
// D_Wk averages them over unordered pairs inside class k. Each term is a
// quadratic form tr(V^T S V), so the optimum is the top-p eigenvectors of
// Q = S_B - (alpha/2)(S_W1 + S_W2), with
//
//   S_B  = C_1 + C_2 + (m_1 - m_2)(m_1 - m_2)^T        (C_k: population covariance)
//   S_Wk = 2 n_k / (n_k - 1) C_k                        (0 when n_k = 1)

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "citesem/classify.hpp"
#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"
#include "citesem/linalg.hpp"
#include "citesem/parallel.hpp"
#include "citesem/pca.hpp"

namespace citesem {

inline constexpr double kDefaultAlpha = 1.0;

struct SupervisedScatter {
  Matrix between;    // S_B
  Matrix within1;    // S_W1 (positive class)
  Matrix within2;    // S_W2 (negative class)

  Matrix objective(double alpha) const { return between - (alpha / 2) * (within1 + within2); }
};

namespace detail {

inline Matrix population_covariance(const Matrix& x) {
  const Matrix c = centered(x);
  return (c.transpose() * c) / static_cast<double>(x.rows());
}

}  // namespace detail

inline SupervisedScatter supervised_scatter(const Matrix& x, std::span<const Label> y) {
  auto [pos, neg] = detail::split_by_label(x, y);
  if (pos.rows() == 0 || neg.rows() == 0) throw DomainError("supervised PCA: both classes must be non-empty");
  const RowVector global = column_means(x);
  pos.rowwise() -= global;
  neg.rowwise() -= global;
  const Matrix c1 = detail::population_covariance(pos);
  const Matrix c2 = detail::population_covariance(neg);
  const Vector dm = (column_means(pos) - column_means(neg)).transpose();
  auto within = [](const Matrix& c, Eigen::Index n) -> Matrix {
    if (n < 2) return Matrix::Zero(c.rows(), c.cols());
    return (2.0 * static_cast<double>(n) / static_cast<double>(n - 1)) * c;
  };
  return {c1 + c2 + dm * dm.transpose(), within(c1, pos.rows()), within(c2, neg.rows())};
}

struct SupervisedBasis {
  Matrix v;             // m x p, orthonormal columns
  RowVector mean;       // centering applied before projection
  double alpha = kDefaultAlpha;
  double objective = 0; // achieved D_C = tr(V^T Q V)
  std::size_t requested_p = 0;
  bool truncated = false;  // requested p exceeded the data rank

  Eigen::Index dimension() const { return v.cols(); }
  Matrix project(const Matrix& x) const { return (x.rowwise() - mean) * v; }
};

inline SupervisedBasis supervised_pca(const Matrix& x, std::span<const Label> y, std::size_t p,
                                      double alpha = kDefaultAlpha) {
  if (p < 1 || p > static_cast<std::size_t>(x.cols()))
    throw DomainError("supervised_pca: p = " + std::to_string(p) + " outside [1, " + std::to_string(x.cols()) + "]");
  if (alpha < 0) throw DomainError("supervised_pca: alpha must be non-negative");
  const auto scatter = supervised_scatter(x, y);
  const auto q = symmetric_eigen(scatter.objective(alpha));

  SupervisedBasis b;
  b.mean = column_means(x);
  b.alpha = alpha;
  b.requested_p = p;
  std::size_t rank = 0;
  if (x.rows() >= 2) rank = static_cast<std::size_t>(numerical_rank(symmetric_eigen(sample_covariance(x)).values));
  rank = std::max<std::size_t>(rank, 1);
  if (p > rank) {
    p = rank;
    b.truncated = true;
  }
  b.v = q.vectors.leftCols(static_cast<Eigen::Index>(p));
  b.objective = q.values.head(static_cast<Eigen::Index>(p)).sum();
  return b;
}

// ---------------------------------------------------------------------------
// Dimension selection

struct SelectionTraceRow {
  std::size_t p;
  double sensitivity;
  double specificity;

  double sum() const { return sensitivity + specificity; }
};

struct SupervisedSelection {
  std::size_t best_p = 0;
  std::size_t ncomp = 0;
  SupervisedBasis basis;
  std::vector<SelectionTraceRow> trace;
};

// Scores a projected data set; returns (sensitivity, specificity).
using ClassifierHook = std::function<std::pair<double, double>(const Matrix&, std::span<const Label>)>;

inline ClassifierHook lda_hook(LdaOptions opt = {}) {
  return [opt](const Matrix& z, std::span<const Label> y) {
    const auto m = lda_fit(z, y, opt);
    return std::pair{m.train_sensitivity, m.train_specificity};
  };
}

// PCA -> Broken-Stick count ncomp -> supervised PCA for p = 1..ncomp ->
// classifier hook on each projection -> p with the largest sens + spec
// (smallest p on ties).
inline SupervisedSelection supervised_selection(const Matrix& x, std::span<const Label> y, double alpha,
                                                const ClassifierHook& hook,
                                                std::size_t threads = default_thread_count()) {
  const auto pca = fit_pca(x);
  std::size_t ncomp = broken_stick_count(pca.eigenvalues);
  ncomp = std::min(ncomp, std::max<std::size_t>(1, static_cast<std::size_t>(pca.rank())));

  std::vector<SupervisedBasis> bases(ncomp);
  std::vector<SelectionTraceRow> trace(ncomp);
  parallel_for(
      ncomp,
      [&](std::size_t i) {
        bases[i] = supervised_pca(x, y, i + 1, alpha);
        const auto [sens, spec] = hook(bases[i].project(x), y);
        trace[i] = {i + 1, sens, spec};
      },
      threads);

  SupervisedSelection sel;
  sel.ncomp = ncomp;
  std::size_t best = 0;
  for (std::size_t i = 1; i < ncomp; ++i)
    if (trace[i].sum() > trace[best].sum()) best = i;
  sel.best_p = best + 1;
  sel.basis = std::move(bases[best]);
  sel.trace = std::move(trace);
  return sel;
}

inline void write_trace_csv(std::ostream& out, std::span<const SelectionTraceRow> trace) {
  const auto old = out.precision(17);
  out << "p,sensitivity,specificity,sum\n";
  for (const auto& r : trace) out << r.p << ',' << r.sensitivity << ',' << r.specificity << ',' << r.sum() << '\n';
  out.precision(old);
}

}  // namespace citesem
