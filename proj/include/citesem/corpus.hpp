#pragma once

// Corpus ingestion, citation statistics and the two class-labeling schemes.
//
// Corpus files are JSON Lines: one object per line with fields
//   {"id": string, "tokens": [string...], "citations": int, "categories": [string...]}
// Blank lines are ignored.

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citesem/errors.hpp"

namespace citesem {

struct DocumentRecord {
  std::string id;
  std::vector<std::string> tokens;
  std::int64_t citations = 0;
  std::vector<std::string> categories;

  bool has_category(std::string_view name) const {
    return std::find(categories.begin(), categories.end(), name) != categories.end();
  }
  bool empty_tokens() const { return tokens.empty(); }
};

struct Corpus {
  std::vector<DocumentRecord> documents;
  // Records kept despite an empty token list.
  std::size_t empty_token_warnings = 0;

  std::size_t size() const { return documents.size(); }
  bool empty() const { return documents.empty(); }

  const DocumentRecord* find(std::string_view id) const {
    for (const auto& d : documents)
      if (d.id == id) return &d;
    return nullptr;
  }

  // Category names in lexicographic order.
  std::vector<std::string> categories() const {
    std::vector<std::string> out;
    for (const auto& d : documents)
      for (const auto& c : d.categories) out.push_back(c);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
};

namespace detail {

inline DocumentRecord parse_record(const std::string& line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("expected a JSON object", line_no);

  auto require = [&](const char* key) -> const nlohmann::json& {
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'", line_no);
    return *it;
  };
  auto string_array = [&](const nlohmann::json& v, const char* key) {
    if (!v.is_array()) throw ParseError(std::string("field '") + key + "' must be an array", line_no);
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) {
      if (!e.is_string())
        throw ParseError(std::string("field '") + key + "' must contain strings", line_no);
      out.push_back(e.get<std::string>());
    }
    return out;
  };

  DocumentRecord rec;
  const auto& id = require("id");
  if (!id.is_string()) throw ParseError("field 'id' must be a string", line_no);
  rec.id = id.get<std::string>();
  rec.tokens = string_array(require("tokens"), "tokens");
  const auto& cites = require("citations");
  if (!cites.is_number_integer()) throw ParseError("field 'citations' must be an integer", line_no);
  rec.citations = cites.get<std::int64_t>();
  if (rec.citations < 0) throw ParseError("negative citation count", line_no);
  rec.categories = string_array(require("categories"), "categories");
  return rec;
}

}  // namespace detail

inline Corpus parse_corpus(std::istream& in) {
  Corpus corpus;
  std::unordered_map<std::string, std::size_t> seen;  // id -> line
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto rec = detail::parse_record(line, line_no);
    auto [it, inserted] = seen.emplace(rec.id, line_no);
    if (!inserted)
      throw ParseError("duplicate id '" + rec.id + "' (first seen at line " +
                           std::to_string(it->second) + ")",
                       line_no);
    if (rec.empty_tokens()) ++corpus.empty_token_warnings;
    corpus.documents.push_back(std::move(rec));
  }
  return corpus;
}

inline Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open corpus file " + path.string(), 0);
  return parse_corpus(in);
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& d : corpus.documents) {
    nlohmann::json j{{"id", d.id}, {"tokens", d.tokens}, {"citations", d.citations},
                     {"categories", d.categories}};
    out << j.dump() << '\n';
  }
}

// ---------------------------------------------------------------------------
// Statistics

struct CategoryStats {
  std::size_t n = 0;
  std::int64_t max = 0;
  std::int64_t min = 0;
  double mean = 0;
  double q1 = 0;
  double q2 = 0;
  double q3 = 0;
  double sigma = 0;
  double se = 0;
};

// Quantile by linear interpolation between order statistics at 1-based rank
// p(n-1)+1. `sorted` must be ascending and non-empty.
template <typename T>
double quantile_sorted(std::span<const T> sorted, double p) {
  if (sorted.empty()) throw DomainError("quantile of empty sequence");
  const double h = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return static_cast<double>(sorted[lo]) +
         frac * (static_cast<double>(sorted[hi]) - static_cast<double>(sorted[lo]));
}

inline CategoryStats descriptive_stats(std::span<const std::int64_t> citations) {
  if (citations.empty()) throw DomainError("descriptive_stats: empty sequence");
  std::vector<std::int64_t> sorted(citations.begin(), citations.end());
  std::sort(sorted.begin(), sorted.end());
  const std::span<const std::int64_t> s(sorted);

  CategoryStats st;
  st.n = sorted.size();
  st.min = sorted.front();
  st.max = sorted.back();
  // Sum over sorted values so the result is permutation-invariant bit for bit.
  long double sum = 0;
  for (auto v : sorted) sum += static_cast<long double>(v);
  st.mean = static_cast<double>(sum / static_cast<long double>(st.n));
  long double ss = 0;
  for (auto v : sorted) {
    const long double d = static_cast<long double>(v) - st.mean;
    ss += d * d;
  }
  st.sigma = st.n > 1 ? static_cast<double>(std::sqrt(ss / static_cast<long double>(st.n - 1))) : 0.0;
  st.se = st.sigma / std::sqrt(static_cast<double>(st.n));
  st.q1 = quantile_sorted(s, 0.25);
  st.q2 = quantile_sorted(s, 0.50);
  st.q3 = quantile_sorted(s, 0.75);
  return st;
}

inline std::vector<std::int64_t> category_citations(const Corpus& corpus, std::string_view category) {
  std::vector<std::int64_t> out;
  for (const auto& d : corpus.documents)
    if (d.has_category(category)) out.push_back(d.citations);
  return out;
}

// (citation count, number of documents) pairs in ascending citation order.
inline std::vector<std::pair<std::int64_t, std::size_t>> citation_histogram(
    std::span<const std::int64_t> citations) {
  std::map<std::int64_t, std::size_t> counts;
  for (auto c : citations) ++counts[c];
  return {counts.begin(), counts.end()};
}

// ---------------------------------------------------------------------------
// Labeling

enum class Label : std::uint8_t { negative = 0, positive = 1 };

inline bool is_positive(Label l) { return l == Label::positive; }

enum class Scheme : std::uint8_t { HL, EHEL };

inline const char* to_string(Scheme s) { return s == Scheme::HL ? "HL" : "EHEL"; }

inline std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "HL" || s == "hl") return Scheme::HL;
  if (s == "EHEL" || s == "ehel") return Scheme::EHEL;
  return std::nullopt;
}

struct LabeledItem {
  std::string doc_id;
  Label label;
  std::int64_t citations;
};

struct LabeledDataset {
  Scheme scheme = Scheme::HL;
  std::string category;
  std::vector<LabeledItem> items;
  // HL: {mean}. EHEL: {q1, q3}.
  std::vector<double> thresholds;
  // Documents of the category left out by the scheme (EHEL middle band).
  std::size_t excluded = 0;

  std::size_t positives() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(),
                                                  [](const auto& i) { return is_positive(i.label); }));
  }
  std::size_t negatives() const { return items.size() - positives(); }
};

namespace detail {

inline std::vector<const DocumentRecord*> category_members(const Corpus& corpus,
                                                           const std::string& category) {
  std::vector<const DocumentRecord*> members;
  for (const auto& d : corpus.documents)
    if (d.has_category(category)) members.push_back(&d);
  if (members.empty()) throw DomainError("unknown category '" + category + "'");
  if (members.size() < 2)
    throw DomainError("category '" + category + "' has fewer than 2 documents");
  return members;
}

}  // namespace detail

// H: citations strictly above the category mean; L otherwise.
inline LabeledDataset label_hl(const Corpus& corpus, const std::string& category) {
  const auto members = detail::category_members(corpus, category);
  std::vector<std::int64_t> cites;
  for (const auto* d : members) cites.push_back(d->citations);
  const double mean = descriptive_stats(cites).mean;

  LabeledDataset ds{Scheme::HL, category, {}, {mean}, 0};
  for (const auto* d : members)
    ds.items.push_back({d->id, static_cast<double>(d->citations) > mean ? Label::positive : Label::negative,
                        d->citations});
  return ds;
}

// EL: citations <= q1; EH: citations >= q3; the band in between is dropped.
inline LabeledDataset label_ehel(const Corpus& corpus, const std::string& category) {
  const auto members = detail::category_members(corpus, category);
  std::vector<std::int64_t> cites;
  for (const auto* d : members) cites.push_back(d->citations);
  const auto st = descriptive_stats(cites);
  if (st.q1 == st.q3)
    throw DomainError("category '" + category + "' has q1 == q3; extreme classes are undefined");

  LabeledDataset ds{Scheme::EHEL, category, {}, {st.q1, st.q3}, 0};
  for (const auto* d : members) {
    const auto c = static_cast<double>(d->citations);
    if (c <= st.q1)
      ds.items.push_back({d->id, Label::negative, d->citations});
    else if (c >= st.q3)
      ds.items.push_back({d->id, Label::positive, d->citations});
    else
      ++ds.excluded;
  }
  return ds;
}

inline LabeledDataset label(const Corpus& corpus, const std::string& category, Scheme scheme) {
  return scheme == Scheme::HL ? label_hl(corpus, category) : label_ehel(corpus, category);
}

}  // namespace citesem
