#pragma once

// Word clouds and Feature Vectors of Text.
//
// A document's cloud holds one row per distinct in-table word, sorted by word,
// so token order and repetition never change a feature. The summaries are
// the mean, the sample standard deviation, the first principal axis of the
// centered cloud, and the two centroids of a deterministic 2-means.

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"
#include "citesem/linalg.hpp"
#include "citesem/meaning_space.hpp"
#include "citesem/parallel.hpp"

namespace citesem {

struct WordCloud {
  std::string doc_id;
  Matrix points;                    // n_words x d
  std::vector<std::string> words;   // row labels, ascending
  std::size_t collapsed_duplicates = 0;
  std::size_t oov_tokens = 0;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dimension() const { return points.cols(); }
};

inline WordCloud build_cloud(const DocumentRecord& doc, const WordVectorTable& table) {
  WordCloud cloud;
  cloud.doc_id = doc.id;
  std::vector<std::pair<std::string_view, std::size_t>> hits;
  for (const auto& t : doc.tokens) {
    if (auto row = table.find(t))
      hits.emplace_back(t, *row);
    else
      ++cloud.oov_tokens;
  }
  if (hits.empty()) throw ExclusionError(doc.id);
  std::sort(hits.begin(), hits.end());
  const auto total = hits.size();
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  cloud.collapsed_duplicates = total - hits.size();

  cloud.points.resize(static_cast<Eigen::Index>(hits.size()), static_cast<Eigen::Index>(table.dimension()));
  cloud.words.reserve(hits.size());
  for (std::size_t i = 0; i < hits.size(); ++i) {
    cloud.points.row(static_cast<Eigen::Index>(i)) = table.row(hits[i].second);
    cloud.words.emplace_back(hits[i].first);
  }
  return cloud;
}

inline Vector mean_vector(const WordCloud& cloud) {
  if (cloud.size() == 0) throw DomainError("mean_vector: empty cloud");
  return cloud.points.colwise().mean().transpose();
}

// Sample standard deviation per axis; zero for a single-row cloud.
inline Vector std_vector(const WordCloud& cloud) {
  if (cloud.size() == 0) throw DomainError("std_vector: empty cloud");
  const auto n = cloud.size();
  if (n == 1) return Vector::Zero(cloud.dimension());
  const Matrix c = centered(cloud.points);
  return (c.array().square().colwise().sum() / static_cast<double>(n - 1)).sqrt().transpose();
}

namespace detail {

inline bool all_rows_equal(const Matrix& x) {
  for (Eigen::Index i = 1; i < x.rows(); ++i)
    if (x.row(i) != x.row(0)) return false;
  return true;
}

}  // namespace detail

struct PrincipalAxis {
  Vector axis;
  bool degenerate = false;  // cloud has a single distinct point
};

// All principal axes of the centered cloud, in non-increasing variance order.
inline EigenPairs cloud_principal_axes(const WordCloud& cloud) {
  const Matrix c = centered(cloud.points);
  return symmetric_eigen(c.transpose() * c);
}

inline PrincipalAxis first_pc(const WordCloud& cloud) {
  if (cloud.size() == 0) throw DomainError("first_pc: empty cloud");
  if (detail::all_rows_equal(cloud.points)) return {Vector::Zero(cloud.dimension()), true};
  return {cloud_principal_axes(cloud).vectors.col(0), false};
}

struct TwoMeansResult {
  Vector c1;
  Vector c2;
  std::size_t iterations = 0;
  bool converged = true;
  bool degenerate = false;
  // Within-cluster sum of squares after each assignment step.
  std::vector<double> sse_trace;
  // Cluster index (0 = c1, 1 = c2) per cloud row.
  std::vector<int> assignment;
};

inline constexpr std::size_t kMaxLloydIterations = 1000;

namespace detail {

inline bool lexicographically_less(const Vector& a, const Vector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

// 2-means seeded by the two most distant words. Among equally distant pairs the
// lexicographically smallest (word_i, word_j) wins; because cloud rows are
// sorted by word, that is the first pair met in (i < j) scan order.
inline TwoMeansResult two_means(const WordCloud& cloud, std::size_t max_iterations = kMaxLloydIterations) {
  const auto& x = cloud.points;
  const auto n = x.rows();
  if (n == 0) throw DomainError("two_means: empty cloud");
  TwoMeansResult r;
  if (detail::all_rows_equal(x)) {
    r.c1 = r.c2 = x.row(0).transpose();
    r.degenerate = true;
    r.assignment.assign(static_cast<std::size_t>(n), 0);
    r.sse_trace.push_back(0.0);
    return r;
  }

  Eigen::Index seed_a = 0, seed_b = 1;
  double best = -1;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (x.row(i) - x.row(j)).squaredNorm();
      if (d > best) {
        best = d;
        seed_a = i;
        seed_b = j;
      }
    }

  std::array<Vector, 2> centroid{x.row(seed_a).transpose(), x.row(seed_b).transpose()};
  std::vector<int> assign(static_cast<std::size_t>(n), -1);

  auto assign_step = [&]() {
    bool changed = false;
    double sse = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d0 = (x.row(i).transpose() - centroid[0]).squaredNorm();
      const double d1 = (x.row(i).transpose() - centroid[1]).squaredNorm();
      const int k = d1 < d0 ? 1 : 0;
      sse += k ? d1 : d0;
      if (assign[static_cast<std::size_t>(i)] != k) {
        assign[static_cast<std::size_t>(i)] = k;
        changed = true;
      }
    }
    return std::pair{changed, sse};
  };
  auto update_step = [&]() {
    std::array<Vector, 2> sum{Vector::Zero(x.cols()), Vector::Zero(x.cols())};
    std::array<Eigen::Index, 2> count{0, 0};
    for (Eigen::Index i = 0; i < n; ++i) {
      const int k = assign[static_cast<std::size_t>(i)];
      sum[k] += x.row(i).transpose();
      ++count[k];
    }
    for (int k = 0; k < 2; ++k)
      if (count[k] > 0) centroid[k] = sum[k] / static_cast<double>(count[k]);
  };

  r.sse_trace.push_back(assign_step().second);
  r.converged = false;
  while (r.iterations < max_iterations) {
    update_step();
    ++r.iterations;
    auto [changed, sse] = assign_step();
    r.sse_trace.push_back(sse);
    if (!changed) {
      r.converged = true;
      break;
    }
  }

  r.assignment = assign;
  if (detail::lexicographically_less(centroid[1], centroid[0])) {
    std::swap(centroid[0], centroid[1]);
    for (auto& a : r.assignment) a = 1 - a;
  }
  r.c1 = centroid[0];
  r.c2 = centroid[1];
  return r;
}

// ---------------------------------------------------------------------------
// FVT assembly

enum class FvtVariant : std::uint8_t { FVT1 = 1, FVT2, FVT3, FVT4, FVT5 };

inline constexpr std::array<FvtVariant, 5> kAllVariants{FvtVariant::FVT1, FvtVariant::FVT2, FvtVariant::FVT3,
                                                        FvtVariant::FVT4, FvtVariant::FVT5};

inline std::string to_string(FvtVariant v) { return "FVT" + std::to_string(static_cast<int>(v)); }

inline std::optional<FvtVariant> parse_variant(std::string_view s) {
  for (auto v : kAllVariants)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

enum class Space : std::uint8_t { original, reduced, supervised };

inline constexpr std::array<Space, 3> kAllSpaces{Space::original, Space::reduced, Space::supervised};

inline const char* to_string(Space s) {
  switch (s) {
    case Space::original: return "original";
    case Space::reduced: return "reduced";
    case Space::supervised: return "supervised";
  }
  return "?";
}

inline std::optional<Space> parse_space(std::string_view s) {
  for (auto v : kAllSpaces)
    if (s == to_string(v)) return v;
  return std::nullopt;
}

enum class BlockKind : std::uint8_t { mean, stddev, pc, c1, c2 };

struct Block {
  BlockKind kind;
  std::size_t offset;
  std::size_t length;
  std::size_t pc_index = 0;  // 1-based, for BlockKind::pc

  std::string name() const {
    switch (kind) {
      case BlockKind::mean: return "mu";
      case BlockKind::stddev: return "sigma";
      case BlockKind::pc: return "pc" + std::to_string(pc_index);
      case BlockKind::c1: return "c1";
      case BlockKind::c2: return "c2";
    }
    return "?";
  }
};

struct TextFeatures {
  std::string doc_id;
  std::optional<FvtVariant> variant;  // empty for the full FVT
  Space space = Space::original;
  Vector values;
  std::vector<Block> layout;
  bool degenerate_cloud = false;
  bool two_means_converged = true;
};

// Block kinds per variant; PC blocks here are always PC1.
inline std::vector<BlockKind> variant_blocks(FvtVariant v) {
  switch (v) {
    case FvtVariant::FVT1: return {BlockKind::mean};
    case FvtVariant::FVT2: return {BlockKind::pc};
    case FvtVariant::FVT3: return {BlockKind::mean, BlockKind::pc};
    case FvtVariant::FVT4: return {BlockKind::c1, BlockKind::c2};
    case FvtVariant::FVT5: return {BlockKind::c1, BlockKind::c2, BlockKind::pc};
  }
  return {};
}

inline std::size_t variant_length(FvtVariant v, std::size_t d) { return variant_blocks(v).size() * d; }

inline TextFeatures assemble_fvt(const WordCloud& cloud, FvtVariant variant, Space space = Space::original) {
  const auto d = static_cast<std::size_t>(cloud.dimension());
  const auto kinds = variant_blocks(variant);
  TextFeatures f;
  f.doc_id = cloud.doc_id;
  f.variant = variant;
  f.space = space;
  f.values.resize(static_cast<Eigen::Index>(kinds.size() * d));

  std::optional<PrincipalAxis> pc;
  std::optional<TwoMeansResult> km;
  std::size_t offset = 0;
  for (auto kind : kinds) {
    Vector block;
    switch (kind) {
      case BlockKind::mean: block = mean_vector(cloud); break;
      case BlockKind::stddev: block = std_vector(cloud); break;
      case BlockKind::pc:
        if (!pc) pc = first_pc(cloud);
        block = pc->axis;
        f.degenerate_cloud = f.degenerate_cloud || pc->degenerate;
        break;
      case BlockKind::c1:
      case BlockKind::c2:
        if (!km) km = two_means(cloud);
        block = kind == BlockKind::c1 ? km->c1 : km->c2;
        f.degenerate_cloud = f.degenerate_cloud || km->degenerate;
        f.two_means_converged = km->converged;
        break;
    }
    f.values.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(d)) = block;
    f.layout.push_back({kind, offset, d, kind == BlockKind::pc ? 1u : 0u});
    offset += d;
  }
  return f;
}

// (mu, sigma, PC1..PCd, c1, c2): d(d + 4) values.
inline TextFeatures assemble_full_fvt(const WordCloud& cloud) {
  const auto d = static_cast<std::size_t>(cloud.dimension());
  TextFeatures f;
  f.doc_id = cloud.doc_id;
  f.values.resize(static_cast<Eigen::Index>(d * (d + 4)));
  std::size_t offset = 0;
  auto put = [&](const Vector& v, BlockKind kind, std::size_t pc_index = 0) {
    f.values.segment(static_cast<Eigen::Index>(offset), static_cast<Eigen::Index>(d)) = v;
    f.layout.push_back({kind, offset, d, pc_index});
    offset += d;
  };
  put(mean_vector(cloud), BlockKind::mean);
  put(std_vector(cloud), BlockKind::stddev);
  const bool degenerate = detail::all_rows_equal(cloud.points);
  const auto axes = cloud_principal_axes(cloud);
  for (std::size_t i = 0; i < d; ++i)
    put(degenerate ? Vector(Vector::Zero(static_cast<Eigen::Index>(d)))
                   : Vector(axes.vectors.col(static_cast<Eigen::Index>(i))),
        BlockKind::pc, i + 1);
  const auto km = two_means(cloud);
  put(km.c1, BlockKind::c1);
  put(km.c2, BlockKind::c2);
  f.degenerate_cloud = degenerate;
  f.two_means_converged = km.converged;
  return f;
}

// ---------------------------------------------------------------------------
// Corpus featurization

struct FeatureMatrix {
  std::vector<std::string> ids;  // row labels
  Matrix values;                 // one row per featurized document
  std::vector<std::string> excluded;  // fully out-of-table documents
  FvtVariant variant = FvtVariant::FVT1;
  Space space = Space::original;
  std::size_t word_dimension = 0;
  std::vector<Block> layout;
  std::size_t degenerate_clouds = 0;
  std::size_t unconverged = 0;
};

inline FeatureMatrix featurize(std::span<const DocumentRecord* const> docs, const WordVectorTable& table,
                               FvtVariant variant, Space space = Space::original,
                               std::size_t threads = default_thread_count()) {
  std::vector<std::optional<TextFeatures>> slots(docs.size());
  parallel_for(
      docs.size(),
      [&](std::size_t i) {
        try {
          slots[i] = assemble_fvt(build_cloud(*docs[i], table), variant, space);
        } catch (const ExclusionError&) {
        }
      },
      threads);

  FeatureMatrix fm;
  fm.variant = variant;
  fm.space = space;
  fm.word_dimension = table.dimension();
  std::size_t rows = 0;
  for (const auto& s : slots) rows += s.has_value();
  const auto len = variant_length(variant, table.dimension());
  fm.values.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(len));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i]) {
      fm.excluded.push_back(docs[i]->id);
      continue;
    }
    fm.ids.push_back(docs[i]->id);
    fm.values.row(r++) = slots[i]->values.transpose();
    if (fm.layout.empty()) fm.layout = slots[i]->layout;
    fm.degenerate_clouds += slots[i]->degenerate_cloud;
    fm.unconverged += !slots[i]->two_means_converged;
  }
  if (fm.layout.empty()) {
    std::size_t offset = 0;
    for (auto kind : variant_blocks(variant)) {
      fm.layout.push_back({kind, offset, table.dimension(), kind == BlockKind::pc ? 1u : 0u});
      offset += table.dimension();
    }
  }
  return fm;
}

// CSV with a '#' header line recording variant, space, d and block layout.
inline void write_features_csv(std::ostream& out, const FeatureMatrix& fm) {
  out << "# variant=" << to_string(fm.variant) << " space=" << to_string(fm.space)
      << " d=" << fm.word_dimension << " layout=";
  for (std::size_t i = 0; i < fm.layout.size(); ++i)
    out << (i ? "," : "") << fm.layout[i].name() << ':' << fm.layout[i].offset << ':' << fm.layout[i].length;
  out << '\n' << "doc_id";
  for (Eigen::Index j = 0; j < fm.values.cols(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < fm.values.rows(); ++i) {
    out << fm.ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < fm.values.cols(); ++j) {
      out << ',';
      detail::write_real(out, fm.values(i, j));
    }
    out << '\n';
  }
}

}  // namespace citesem
