#pragma once

// Confusion matrices, sensitivity/specificity, ROC curves and AUC.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"

namespace citesem {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t positives() const { return tp + fn; }
  std::size_t negatives() const { return tn + fp; }
  std::size_t total() const { return tp + fp + fn + tn; }

  ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

inline ConfusionMatrix confusion(std::span<const Label> predictions, std::span<const Label> truths) {
  if (predictions.size() != truths.size())
    throw DomainError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                      std::to_string(truths.size()) + " truths");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool p = is_positive(predictions[i]);
    if (is_positive(truths[i]))
      ++(p ? cm.tp : cm.fn);
    else
      ++(p ? cm.fp : cm.tn);
  }
  return cm;
}

inline double sensitivity(const ConfusionMatrix& cm) {
  if (cm.positives() == 0) throw UndefinedMetricError("sensitivity: no positive cases");
  return static_cast<double>(cm.tp) / static_cast<double>(cm.positives());
}

inline double specificity(const ConfusionMatrix& cm) {
  if (cm.negatives() == 0) throw UndefinedMetricError("specificity: no negative cases");
  return static_cast<double>(cm.tn) / static_cast<double>(cm.negatives());
}

struct RocPoint {
  double fpr;  // 1 - specificity
  double tpr;  // sensitivity
};

struct RocCurve {
  std::vector<RocPoint> points;  // (0,0) ... (1,1)
  double auc = 0;
};

namespace detail {

inline std::pair<std::size_t, std::size_t> class_counts(std::span<const Label> truths) {
  std::size_t pos = 0;
  for (auto t : truths) pos += is_positive(t);
  const std::size_t neg = truths.size() - pos;
  if (pos == 0 || neg == 0) throw DomainError("ROC/AUC: both classes must be present");
  return {pos, neg};
}

}  // namespace detail

// Threshold sweep from +inf down over the distinct scores; a block of tied
// scores moves the curve along one diagonal segment. AUC by trapezoids.
inline RocCurve roc_and_auc(std::span<const double> scores, std::span<const Label> truths) {
  if (scores.size() != truths.size()) throw DomainError("roc_and_auc: length mismatch");
  const auto [pos, neg] = detail::class_counts(truths);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0, 0});
  std::size_t tp = 0, fp = 0;
  // Twice the area in (fp, tp) count units, kept integral until the end.
  unsigned long long area2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i, dtp = 0, dfp = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      ++(is_positive(truths[order[j]]) ? dtp : dfp);
      ++j;
    }
    area2 += static_cast<unsigned long long>(dfp) * (2 * tp + dtp);
    tp += dtp;
    fp += dfp;
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
    i = j;
  }
  roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

// Mann-Whitney form: P(score_pos > score_neg) + P(tie)/2, from midranks.
inline double auc_rank_statistic(std::span<const double> scores, std::span<const Label> truths) {
  if (scores.size() != truths.size()) throw DomainError("auc_rank_statistic: length mismatch");
  const auto [pos, neg] = detail::class_counts(truths);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });
  // Sum of doubled midranks of positives (integral).
  unsigned long long rank2_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const unsigned long long midrank2 = (i + 1) + j;  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k)
      if (is_positive(truths[order[k]])) rank2_sum += midrank2;
    i = j;
  }
  const double u = static_cast<double>(rank2_sum) / 2.0 - static_cast<double>(pos) * (pos + 1) / 2.0;
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

// One classification outcome with the metadata of the grid cell it came from.
struct EvaluationReport {
  std::string category;
  Scheme scheme = Scheme::HL;
  std::string space;
  std::string fvt_variant;
  std::string classifier;     // "LDA", "LDA-LOOCV", "kNN"
  std::optional<std::size_t> k;
  std::optional<std::size_t> dimension;  // supervised-PCA p, when applicable
  ConfusionMatrix cm;
  double sensitivity = 0;
  double specificity = 0;
  std::optional<RocCurve> roc;
  std::string error;  // non-empty when the cell failed
  bool best = false;

  double sum() const { return sensitivity + specificity; }
  bool ok() const { return error.empty(); }
};

inline EvaluationReport make_report(const ConfusionMatrix& cm) {
  EvaluationReport r;
  r.cm = cm;
  r.sensitivity = citesem::sensitivity(cm);
  r.specificity = citesem::specificity(cm);
  return r;
}

inline void write_roc_csv(std::ostream& out, const RocCurve& roc) {
  const auto old = out.precision(17);
  out << "one_minus_specificity,sensitivity\n";
  for (const auto& p : roc.points) out << p.fpr << ',' << p.tpr << '\n';
  out.precision(old);
}

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace detail

inline void write_report_header(std::ostream& out) {
  out << "category,scheme,space,fvt_variant,classifier,k,dimension,tp,fp,fn,tn,"
         "sensitivity_pct,specificity_pct,sum_pct,auc,best,error\n";
}

// Percentages use two decimals; sum_pct is the sum of the two printed values.
inline void write_report_row(std::ostream& out, const EvaluationReport& r) {
  out << detail::csv_field(r.category) << ',' << to_string(r.scheme) << ',' << r.space << ','
      << r.fvt_variant << ',' << r.classifier << ',';
  if (r.k) out << *r.k;
  out << ',';
  if (r.dimension) out << *r.dimension;
  out << ',';
  if (r.ok()) {
    out << r.cm.tp << ',' << r.cm.fp << ',' << r.cm.fn << ',' << r.cm.tn << ',';
    // Rounded in hundredths of a percent so the sum column is exact.
    const long sens = std::lround(r.sensitivity * 10000.0);
    const long spec = std::lround(r.specificity * 10000.0);
    char buf[96];
    std::snprintf(buf, sizeof buf, "%ld.%02ld,%ld.%02ld,%ld.%02ld", sens / 100, sens % 100, spec / 100,
                  spec % 100, (sens + spec) / 100, (sens + spec) % 100);
    out << buf << ',';
    if (r.roc) {
      std::snprintf(buf, sizeof buf, "%.6f", r.roc->auc);
      out << buf;
    }
    out << ',' << (r.best ? "true" : "false") << ",\n";
  } else {
    out << ",,,,,,,,false," << detail::csv_field(r.error) << '\n';
  }
}

}  // namespace citesem
