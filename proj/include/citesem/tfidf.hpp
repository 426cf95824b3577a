#pragma once

// Bag-of-words baseline: term frequency, IDF = 1 + ln(n / df), TF-IDF vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"

namespace citesem {

class VocabularyIndex {
 public:
  VocabularyIndex() = default;

  // Columns are assigned in lexicographic word order.
  static VocabularyIndex build(std::span<const DocumentRecord> docs) {
    std::map<std::string, std::size_t> df;
    for (const auto& d : docs) {
      std::unordered_set<std::string_view> uniq(d.tokens.begin(), d.tokens.end());
      for (auto w : uniq) ++df[std::string(w)];
    }
    VocabularyIndex v;
    v.corpus_size_ = docs.size();
    for (auto& [word, count] : df) {
      v.index_.emplace(word, v.words_.size());
      v.words_.push_back(word);
      v.df_.push_back(count);
    }
    return v;
  }

  std::size_t size() const { return words_.size(); }
  std::size_t corpus_size() const { return corpus_size_; }
  const std::string& word(std::size_t column) const { return words_.at(column); }

  const std::size_t* column(std::string_view word) const {
    auto it = index_.find(std::string(word));
    return it == index_.end() ? nullptr : &it->second;
  }

  std::size_t document_frequency(std::string_view word) const {
    const auto* c = column(word);
    if (!c) throw DomainError("word '" + std::string(word) + "' is not in the vocabulary");
    return df_[*c];
  }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> words_;
  std::vector<std::size_t> df_;
  std::size_t corpus_size_ = 0;
};

inline std::size_t term_frequency(std::string_view word, const DocumentRecord& doc) {
  return static_cast<std::size_t>(std::count(doc.tokens.begin(), doc.tokens.end(), word));
}

inline double inverse_document_frequency(std::string_view word, const VocabularyIndex& vocab,
                                         std::size_t corpus_size) {
  const auto df = vocab.document_frequency(word);
  return 1.0 + std::log(static_cast<double>(corpus_size) / static_cast<double>(df));
}

struct TfidfVector {
  // (column, weight) sorted by column; only nonzero weights are stored.
  std::vector<std::pair<std::size_t, double>> entries;
  bool normalized = false;
  // Set when normalization was requested but the vector is all zero.
  bool unnormalizable = false;
  std::size_t oov_tokens = 0;

  double norm() const {
    double s = 0;
    for (const auto& [c, w] : entries) s += w * w;
    return std::sqrt(s);
  }
};

inline TfidfVector tfidf_vector(const DocumentRecord& doc, const VocabularyIndex& vocab,
                                std::size_t corpus_size, bool normalize) {
  std::map<std::size_t, std::size_t> tf;
  TfidfVector v;
  for (const auto& t : doc.tokens) {
    if (const auto* c = vocab.column(t))
      ++tf[*c];
    else
      ++v.oov_tokens;
  }
  for (const auto& [c, count] : tf)
    v.entries.emplace_back(c, static_cast<double>(count) *
                                  inverse_document_frequency(vocab.word(c), vocab, corpus_size));
  if (normalize) {
    const double n = v.norm();
    if (n > 0) {
      for (auto& e : v.entries) e.second /= n;
      v.normalized = true;
    } else {
      v.unnormalizable = true;
    }
  }
  return v;
}

// One row per document: doc_id followed by "column:weight" cells.
inline void write_tfidf_csv(std::ostream& out, std::span<const std::string> ids,
                            std::span<const TfidfVector> vectors) {
  const auto old = out.precision(17);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << ids[i];
    for (const auto& [c, w] : vectors[i].entries) out << ',' << c << ':' << w;
    out << '\n';
  }
  out.precision(old);
}

}  // namespace citesem
