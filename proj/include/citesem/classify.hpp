#pragma once

// Fisher LDA with a sensitivity+specificity optimal threshold, class-weighted
// kNN, and leave-one-out cross-validation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"
#include "citesem/evaluate.hpp"
#include "citesem/linalg.hpp"
#include "citesem/parallel.hpp"

namespace citesem {

// ---------------------------------------------------------------------------
// Threshold search

struct ThresholdChoice {
  double threshold = 0;
  double sensitivity = 0;
  double specificity = 0;
  ConfusionMatrix cm;

  double sum() const { return sensitivity + specificity; }
};

// Decision rule: positive iff score > threshold. Candidates are -inf, the
// midpoints between consecutive distinct scores, and +inf. Ties in the
// achieved sum go to the smaller threshold.
inline ThresholdChoice lda_threshold(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw DomainError("lda_threshold: length mismatch");
  std::size_t pos = 0;
  for (auto l : labels) pos += is_positive(l);
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) throw DomainError("lda_threshold: both labels must be present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  // sens + spec = tp/pos + tn/neg; compare tp*neg + tn*pos exactly.
  std::size_t tp = pos, tn = 0;
  auto objective = [&] { return static_cast<unsigned long long>(tp) * neg + static_cast<unsigned long long>(tn) * pos; };
  double best_t = -std::numeric_limits<double>::infinity();
  unsigned long long best = objective();
  std::size_t best_tp = tp, best_tn = tn;

  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == s) {
      if (is_positive(labels[order[j]]))
        --tp;
      else
        ++tn;
      ++j;
    }
    double t = std::numeric_limits<double>::infinity();
    if (j < order.size()) {
      const double next = scores[order[j]];
      t = s + (next - s) / 2;
      if (!(t < next)) t = s;
    }
    if (const auto v = objective(); v > best) {
      best = v;
      best_t = t;
      best_tp = tp;
      best_tn = tn;
    }
    i = j;
  }
  ThresholdChoice c;
  c.threshold = best_t;
  c.cm = {best_tp, neg - best_tn, pos - best_tp, best_tn};
  c.sensitivity = static_cast<double>(best_tp) / static_cast<double>(pos);
  c.specificity = static_cast<double>(best_tn) / static_cast<double>(neg);
  return c;
}

// ---------------------------------------------------------------------------
// Fisher LDA

struct LdaModel {
  Vector omega;
  double threshold = 0;
  bool positive_above = true;
  double ridge = 0;
  bool degenerate = false;  // class means coincide, omega = 0
  double train_sensitivity = 0;
  double train_specificity = 0;

  double score(const Eigen::Ref<const RowVector>& x) const { return x.dot(omega.transpose()); }

  Label predict(const Eigen::Ref<const RowVector>& x) const {
    const double s = score(x);
    return (positive_above ? s > threshold : s < threshold) ? Label::positive : Label::negative;
  }

  Vector scores(const Matrix& x) const { return x * omega; }
};

inline constexpr double kRidgeLadderBase = 1e-8;
inline constexpr int kRidgeLadderSteps = 16;
inline constexpr double kMinReciprocalCondition = 1e-12;

// Solves (S + ridge I) w = rhs. When that system is singular, retries with
// ridge = base * trace(S)/m, growing tenfold per step. Returns the ridge used.
inline double solve_with_ridge_ladder(const Matrix& s, const Vector& rhs, double ridge, Vector& out,
                                      double ladder_base = kRidgeLadderBase) {
  const auto m = s.rows();
  auto attempt = [&](double r) {
    Matrix a = s;
    a.diagonal().array() += r;
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinReciprocalCondition)) return false;
    out = llt.solve(rhs);
    return out.allFinite();
  };
  if (attempt(ridge)) return ridge;
  const double scale = m > 0 && s.trace() > 0 ? s.trace() / static_cast<double>(m) : 1.0;
  double r = std::max(ridge, ladder_base * scale);
  for (int step = 0; step < kRidgeLadderSteps; ++step, r *= 10)
    if (attempt(r)) return r;
  throw DomainError("LDA: within-class scatter is singular even after ridge " + std::to_string(r / 10));
}

struct LdaOptions {
  double ridge = 0;
  double ladder_base = kRidgeLadderBase;
};

// omega solves (Sigma_pos + Sigma_neg + ridge I) omega = mu_pos - mu_neg, with
// sample covariances. The threshold is fitted on the training projections.
inline LdaModel lda_fit(const Matrix& x_pos, const Matrix& x_neg, LdaOptions opt = {}) {
  if (x_pos.rows() < 2 || x_neg.rows() < 2) throw DomainError("lda_fit: each class needs at least 2 rows");
  if (x_pos.cols() != x_neg.cols()) throw DomainError("lda_fit: class feature widths differ");
  const Vector diff = (column_means(x_pos) - column_means(x_neg)).transpose();
  const Matrix s = sample_covariance(x_pos) + sample_covariance(x_neg);

  LdaModel model;
  if (diff.isZero(0.0)) {
    model.omega = Vector::Zero(diff.size());
    model.degenerate = true;
    model.ridge = opt.ridge;
  } else {
    model.ridge = solve_with_ridge_ladder(s, diff, opt.ridge, model.omega, opt.ladder_base);
  }

  std::vector<double> sc;
  std::vector<Label> lab;
  sc.reserve(static_cast<std::size_t>(x_pos.rows() + x_neg.rows()));
  for (Eigen::Index i = 0; i < x_pos.rows(); ++i) {
    sc.push_back(model.score(x_pos.row(i)));
    lab.push_back(Label::positive);
  }
  for (Eigen::Index i = 0; i < x_neg.rows(); ++i) {
    sc.push_back(model.score(x_neg.row(i)));
    lab.push_back(Label::negative);
  }
  const double mean_pos = std::accumulate(sc.begin(), sc.begin() + x_pos.rows(), 0.0) / static_cast<double>(x_pos.rows());
  const double mean_neg = std::accumulate(sc.begin() + x_pos.rows(), sc.end(), 0.0) / static_cast<double>(x_neg.rows());
  if (mean_pos < mean_neg) {
    model.omega = -model.omega;
    for (auto& v : sc) v = -v;
  }
  const auto t = lda_threshold(sc, lab);
  model.threshold = t.threshold;
  model.train_sensitivity = t.sensitivity;
  model.train_specificity = t.specificity;
  return model;
}

namespace detail {

inline std::pair<Matrix, Matrix> split_by_label(const Matrix& x, std::span<const Label> y) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw DomainError("rows and labels differ in length");
  std::vector<Eigen::Index> p, n;
  for (std::size_t i = 0; i < y.size(); ++i) (is_positive(y[i]) ? p : n).push_back(static_cast<Eigen::Index>(i));
  return {x(p, Eigen::all), x(n, Eigen::all)};
}

}  // namespace detail

inline LdaModel lda_fit(const Matrix& x, std::span<const Label> y, LdaOptions opt = {}) {
  auto [p, n] = detail::split_by_label(x, y);
  return lda_fit(p, n, opt);
}

inline void write_lda_model(std::ostream& out, const LdaModel& m) {
  const auto old = out.precision(17);
  out << "omega";
  for (double v : m.omega) out << ' ' << v;
  out << "\nthreshold " << m.threshold << "\nridge " << m.ridge << "\norientation "
      << (m.positive_above ? "positive_above" : "positive_below") << "\ndegenerate "
      << (m.degenerate ? "true" : "false") << '\n';
  out.precision(old);
}

// ---------------------------------------------------------------------------
// Class-weighted kNN

struct KnnConfig {
  std::size_t k = 1;
  std::size_t n_pos = 0;  // N1 (class 1 = positive)
  std::size_t n_neg = 0;  // N2

  double p1() const { return static_cast<double>(n_pos) / static_cast<double>(n_pos + n_neg); }
  double p2() const { return static_cast<double>(n_neg) / static_cast<double>(n_pos + n_neg); }

  static KnnConfig from_labels(std::size_t k, std::span<const Label> labels) {
    KnnConfig c{k, 0, 0};
    for (auto l : labels) ++(is_positive(l) ? c.n_pos : c.n_neg);
    return c;
  }
};

inline const std::vector<std::size_t> kDefaultKGrid{1, 3, 5, 7, 11, 13, 17};

struct KnnVote {
  Label label = Label::negative;
  std::size_t s = 0;  // positive neighbours
  std::size_t t = 0;  // neighbourhood size (>= k with distance ties)
  double score_pos = 0;
  double score_neg = 0;
};

// Training points ordered by (squared distance, index) from a query.
struct Neighbourhood {
  std::vector<std::pair<double, std::size_t>> ranked;
};

inline Neighbourhood rank_neighbours(const Matrix& train, const Eigen::Ref<const RowVector>& query,
                                     std::size_t exclude = static_cast<std::size_t>(-1)) {
  Neighbourhood nb;
  nb.ranked.reserve(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index i = 0; i < train.rows(); ++i) {
    if (static_cast<std::size_t>(i) == exclude) continue;
    nb.ranked.emplace_back((train.row(i) - query).squaredNorm(), static_cast<std::size_t>(i));
  }
  std::sort(nb.ranked.begin(), nb.ranked.end());
  return nb;
}

// Scores s/P1 and (t-s)/P2 over the k nearest points plus any tied with the
// k-th. Equal scores go to the label of the nearest neighbour.
inline KnnVote knn_vote(const Neighbourhood& nb, std::span<const Label> labels, const KnnConfig& cfg) {
  if (cfg.k == 0) throw DomainError("knn: k must be positive");
  if (cfg.k > nb.ranked.size())
    throw DomainError("knn: k = " + std::to_string(cfg.k) + " exceeds training size " +
                      std::to_string(nb.ranked.size()));
  if (cfg.n_pos == 0 || cfg.n_neg == 0) throw DomainError("knn: both classes must be present in training");
  std::size_t t = cfg.k;
  const double kth = nb.ranked[cfg.k - 1].first;
  while (t < nb.ranked.size() && nb.ranked[t].first == kth) ++t;
  KnnVote v;
  v.t = t;
  for (std::size_t i = 0; i < t; ++i) v.s += is_positive(labels[nb.ranked[i].second]);
  v.score_pos = static_cast<double>(v.s) / cfg.p1();
  v.score_neg = static_cast<double>(t - v.s) / cfg.p2();
  // s/P1 vs (t-s)/P2  <=>  s*N2 vs (t-s)*N1.
  const auto lhs = static_cast<unsigned long long>(v.s) * cfg.n_neg;
  const auto rhs = static_cast<unsigned long long>(t - v.s) * cfg.n_pos;
  if (lhs != rhs)
    v.label = lhs > rhs ? Label::positive : Label::negative;
  else
    v.label = labels[nb.ranked.front().second];
  return v;
}

inline Label knn_predict(const Matrix& train, std::span<const Label> labels, const KnnConfig& cfg,
                         const Eigen::Ref<const RowVector>& query) {
  if (static_cast<std::size_t>(train.rows()) != labels.size()) throw DomainError("knn: rows and labels differ");
  return knn_vote(rank_neighbours(train, query), labels, cfg).label;
}

// Normalized positive score in [0, 1], used as a ranking score for ROC.
inline double knn_score(const KnnVote& v) {
  const double total = v.score_pos + v.score_neg;
  return total > 0 ? v.score_pos / total : 0.5;
}

// Each row classified against all other rows for every k in the grid.
// Priors come from the remaining N-1 points.
struct KnnSweep {
  std::vector<std::size_t> k_grid;
  std::vector<std::vector<Label>> predictions;  // [k index][row]
  std::vector<std::vector<double>> scores;
};

inline KnnSweep knn_leave_self_out(const Matrix& x, std::span<const Label> y, std::span<const std::size_t> k_grid,
                                   std::size_t threads = default_thread_count()) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n != y.size()) throw DomainError("knn: rows and labels differ");
  KnnSweep sw{{k_grid.begin(), k_grid.end()}, {}, {}};
  sw.predictions.assign(k_grid.size(), std::vector<Label>(n));
  sw.scores.assign(k_grid.size(), std::vector<double>(n));
  const auto all = KnnConfig::from_labels(0, y);
  parallel_for(
      n,
      [&](std::size_t i) {
        const auto nb = rank_neighbours(x, x.row(static_cast<Eigen::Index>(i)), i);
        KnnConfig cfg = all;
        --(is_positive(y[i]) ? cfg.n_pos : cfg.n_neg);
        for (std::size_t g = 0; g < k_grid.size(); ++g) {
          cfg.k = k_grid[g];
          const auto v = knn_vote(nb, y, cfg);
          sw.predictions[g][i] = v.label;
          sw.scores[g][i] = knn_score(v);
        }
      },
      threads);
  return sw;
}

// ---------------------------------------------------------------------------
// Leave-one-out cross-validation

struct LoocvResult {
  ConfusionMatrix cm;
  std::vector<Label> predictions;
  std::size_t folds = 0;

  double sensitivity() const { return citesem::sensitivity(cm); }
  double specificity() const { return citesem::specificity(cm); }
};

// trainer(const Matrix&, const std::vector<Label>&) -> Model
// predictor(const Model&, row) -> Label
template <typename Trainer, typename Predictor>
LoocvResult loocv(const Matrix& x, std::span<const Label> y, Trainer&& trainer, Predictor&& predictor,
                  std::size_t threads = default_thread_count()) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n != y.size()) throw DomainError("loocv: rows and labels differ");
  std::size_t pos = 0;
  for (auto l : y) pos += is_positive(l);
  if (pos < 3 || n - pos < 3) throw DomainError("loocv: each class needs at least 3 points");

  LoocvResult r;
  r.folds = n;
  r.predictions.resize(n);
  parallel_for(
      n,
      [&](std::size_t i) {
        std::vector<Eigen::Index> keep;
        keep.reserve(n - 1);
        std::vector<Label> y_train;
        y_train.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
          if (j != i) {
            keep.push_back(static_cast<Eigen::Index>(j));
            y_train.push_back(y[j]);
          }
        try {
          const Matrix x_train = x(keep, Eigen::all);
          const auto model = trainer(x_train, y_train);
          r.predictions[i] = predictor(model, x.row(static_cast<Eigen::Index>(i)));
        } catch (const std::exception& e) {
          throw DomainError("loocv fold " + std::to_string(i) + ": " + e.what());
        }
      },
      threads);
  r.cm = confusion(r.predictions, y);
  return r;
}

inline LoocvResult lda_loocv(const Matrix& x, std::span<const Label> y, LdaOptions opt = {},
                             std::size_t threads = default_thread_count()) {
  return loocv(
      x, y, [&](const Matrix& xt, const std::vector<Label>& yt) { return lda_fit(xt, yt, opt); },
      [](const LdaModel& m, const Eigen::Ref<const RowVector>& row) { return m.predict(row); }, threads);
}

}  // namespace citesem
