#pragma once

// The Meaning Space: a table mapping each word to its vector of per-category
// importances, plus PCA-reduced word bases.
//
// Word-vector files are TSV:
//   word<TAB>cat1<TAB>...<TAB>catM
//   alpha<TAB>0.1<TAB>...<TAB>0.0

#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "citesem/errors.hpp"
#include "citesem/linalg.hpp"
#include "citesem/pca.hpp"

namespace citesem {

class WordVectorTable {
 public:
  WordVectorTable() = default;

  WordVectorTable(std::vector<std::string> axes, std::vector<std::string> words, Matrix vectors)
      : axes_(std::move(axes)), words_(std::move(words)), vectors_(std::move(vectors)) {
    if (static_cast<std::size_t>(vectors_.rows()) != words_.size() ||
        static_cast<std::size_t>(vectors_.cols()) != axes_.size())
      throw DomainError("WordVectorTable: shape does not match word/axis lists");
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (!index_.emplace(words_[i], i).second)
        throw DomainError("WordVectorTable: duplicate word '" + words_[i] + "'");
  }

  std::size_t dimension() const { return axes_.size(); }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& axes() const { return axes_; }
  const std::vector<std::string>& words() const { return words_; }
  const Matrix& vectors() const { return vectors_; }

  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view word) const { return find(word).has_value(); }
  auto row(std::size_t i) const { return vectors_.row(static_cast<Eigen::Index>(i)); }

  // Components outside [0, 1], counted on load.
  std::size_t range_violations() const { return range_violations_; }

  // FNV-1a over words and raw component bytes.
  std::uint64_t checksum() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
      }
    };
    for (std::size_t i = 0; i < words_.size(); ++i) {
      mix(words_[i].data(), words_[i].size());
      for (Eigen::Index j = 0; j < vectors_.cols(); ++j) {
        const double v = vectors_(static_cast<Eigen::Index>(i), j);
        mix(&v, sizeof v);
      }
    }
    return h;
  }

  friend bool operator==(const WordVectorTable& a, const WordVectorTable& b) {
    return a.axes_ == b.axes_ && a.words_ == b.words_ && a.vectors_ == b.vectors_;
  }

 private:
  friend WordVectorTable parse_word_vectors(std::istream&);

  std::vector<std::string> axes_;
  std::vector<std::string> words_;
  Matrix vectors_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t range_violations_ = 0;
};

namespace detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    auto pos = line.find('\t', start);
    cells.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline double parse_real(const std::string& cell, std::size_t line_no, std::size_t column) {
  double v = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || cell.empty())
    throw ParseError("column " + std::to_string(column) + ": not a number: '" + cell + "'", line_no);
  return v;
}

}  // namespace detail

inline WordVectorTable parse_word_vectors(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("word-vector file is empty", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = detail::split_tabs(line);
  if (header.size() < 2) throw ParseError("header must name at least one axis", line_no);
  std::vector<std::string> axes(header.begin() + 1, header.end());
  const std::size_t m = axes.size();

  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t violations = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_tabs(line);
    if (cells.size() != m + 1)
      throw ParseError("row for '" + cells[0] + "' has " + std::to_string(cells.size() - 1) +
                           " values, expected " + std::to_string(m),
                       line_no);
    if (!seen.emplace(cells[0], line_no).second)
      throw ParseError("duplicate word '" + cells[0] + "' (first at line " +
                           std::to_string(seen[cells[0]]) + ")",
                       line_no);
    words.push_back(cells[0]);
    for (std::size_t j = 1; j <= m; ++j) {
      const double v = detail::parse_real(cells[j], line_no, j + 1);
      if (v < 0.0 || v > 1.0) ++violations;
      values.push_back(v);
    }
  }
  Matrix mat(static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = 0; j < m; ++j)
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * m + j];
  WordVectorTable table(std::move(axes), std::move(words), std::move(mat));
  table.range_violations_ = violations;
  return table;
}

inline WordVectorTable load_word_vectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open word-vector file " + path.string(), 0);
  return parse_word_vectors(in);
}

namespace detail {

inline void write_real(std::ostream& out, double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, ptr - buf);
}

}  // namespace detail

// Shortest round-trip representation, so save followed by load is exact.
inline void save_word_vectors(std::ostream& out, const WordVectorTable& table) {
  out << "word";
  for (const auto& a : table.axes()) out << '\t' << a;
  out << '\n';
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (std::size_t j = 0; j < table.dimension(); ++j) {
      out << '\t';
      detail::write_real(out, table.vectors()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Reduced word bases

struct ReducedWordBasis {
  Matrix projection;           // m x p, orthonormal columns
  Vector explained_variance;   // length p, non-increasing
  RowVector mean;              // word mean removed before projecting
  std::uint64_t source_checksum = 0;

  Eigen::Index dimension() const { return projection.cols(); }
};

struct ReducedWords {
  ReducedWordBasis basis;
  WordVectorTable table;  // words re-expressed as p projection coordinates
};

inline std::vector<std::string> pc_axis_names(Eigen::Index p) {
  std::vector<std::string> names;
  for (Eigen::Index i = 1; i <= p; ++i) names.push_back("pc" + std::to_string(i));
  return names;
}

// Top-p principal axes of the mean-centered word matrix (no variance scaling).
inline ReducedWords reduce_words(const WordVectorTable& table, std::size_t p) {
  if (p < 1 || p > table.dimension())
    throw DomainError("reduce_words: target dimension " + std::to_string(p) + " outside [1, " +
                      std::to_string(table.dimension()) + "]");
  if (table.size() < 2) throw DomainError("reduce_words: need at least 2 words");
  const auto pca = fit_pca(table.vectors());
  const auto rank = static_cast<std::size_t>(pca.rank());
  if (p > rank)
    throw DomainError("reduce_words: target dimension " + std::to_string(p) +
                      " exceeds the attainable rank " + std::to_string(rank));
  const auto pp = static_cast<Eigen::Index>(p);
  ReducedWordBasis basis{pca.axes.leftCols(pp), pca.eigenvalues.head(pp), pca.mean, table.checksum()};
  Matrix coords = pca.project(table.vectors(), pp);
  WordVectorTable reduced(pc_axis_names(pp), table.words(), std::move(coords));
  return {std::move(basis), std::move(reduced)};
}

// Basis TSV: one row per source axis, columns pc1..pcp.
inline void write_basis_tsv(std::ostream& out, const ReducedWordBasis& basis,
                            const std::vector<std::string>& source_axes) {
  out << "category";
  for (const auto& n : pc_axis_names(basis.dimension())) out << '\t' << n;
  out << '\n';
  for (Eigen::Index i = 0; i < basis.projection.rows(); ++i) {
    out << source_axes.at(static_cast<std::size_t>(i));
    for (Eigen::Index j = 0; j < basis.projection.cols(); ++j) {
      out << '\t';
      detail::write_real(out, basis.projection(i, j));
    }
    out << '\n';
  }
}

}  // namespace citesem
