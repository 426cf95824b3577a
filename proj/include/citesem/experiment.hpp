#pragma once

// Experiment grid: {spaces} x {FVT variants} x {H/L, EH/EL} x {LDA, weighted
// kNN over a k grid}, per category, plus corpus descriptive statistics.
//
// Config files are flat key = value text:
//
//   corpus       = "data/corpus.jsonl"
//   word_vectors = "data/words.tsv"
//   categories   = ["Mathematics, Applied", "Biology"]   # empty: all
//   reduced_dim  = 13
//   alpha        = 1.0
//   k_grid       = [1, 3, 5, 7, 11, 13, 17]
//   schemes      = [HL, EHEL]
//   spaces       = [original, reduced, supervised]
//   fvt_variants = [FVT1, FVT2, FVT3, FVT4, FVT5]
//   output_dir   = "out"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "citesem/classify.hpp"
#include "citesem/corpus.hpp"
#include "citesem/errors.hpp"
#include "citesem/evaluate.hpp"
#include "citesem/featurizer.hpp"
#include "citesem/meaning_space.hpp"
#include "citesem/parallel.hpp"
#include "citesem/supervised.hpp"

namespace citesem {

struct ExperimentConfig {
  std::filesystem::path corpus;
  std::filesystem::path word_vectors;
  std::vector<std::string> categories;
  std::size_t reduced_dim = 13;
  double alpha = kDefaultAlpha;
  std::vector<std::size_t> k_grid = kDefaultKGrid;
  std::vector<Scheme> schemes{Scheme::HL, Scheme::EHEL};
  std::vector<Space> spaces{kAllSpaces.begin(), kAllSpaces.end()};
  std::vector<FvtVariant> fvt_variants{kAllVariants.begin(), kAllVariants.end()};
  std::filesystem::path output_dir = "citesem-out";
  double ridge = 0;
  double ridge_ladder_base = kRidgeLadderBase;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool export_features = false;
  bool loocv = true;

  LdaOptions lda() const { return {ridge, ridge_ladder_base}; }
  std::size_t worker_count() const { return threads ? threads : default_thread_count(); }
};

// ---------------------------------------------------------------------------
// Config parsing

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

inline std::string unquote(const std::string& s, std::size_t line_no) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (s.find('"') != std::string::npos) throw ParseError("unbalanced quotes in '" + s + "'", line_no);
  return s;
}

inline std::vector<std::string> parse_array(const std::string& v, std::size_t line_no) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']')
    throw ParseError("expected an array [ ... ], got '" + v + "'", line_no);
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const char c = v[i];
    if (c == '"') quoted = !quoted;
    if (c == ',' && !quoted) {
      out.push_back(unquote(trim(cur), line_no));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted) throw ParseError("unbalanced quotes in array", line_no);
  if (!trim(cur).empty() || !out.empty()) out.push_back(unquote(trim(cur), line_no));
  return out;
}

inline std::size_t parse_count(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty() || s[0] == '-') throw ParseError("expected a non-negative integer, got '" + s + "'", line_no);
  return static_cast<std::size_t>(v);
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) throw ParseError("expected a number, got '" + s + "'", line_no);
  return v;
}

inline bool parse_bool(const std::string& s, std::size_t line_no) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError("expected true or false, got '" + s + "'", line_no);
}

}  // namespace detail

// Applies one key/value setting; also used for command-line overrides.
inline void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& raw, std::size_t line_no = 0) {
  using namespace detail;
  const std::string v = trim(raw);
  auto list = [&] { return v.starts_with("[") ? parse_array(v, line_no) : std::vector<std::string>{unquote(v, line_no)}; };
  if (key == "corpus") {
    c.corpus = unquote(v, line_no);
  } else if (key == "word_vectors") {
    c.word_vectors = unquote(v, line_no);
  } else if (key == "output_dir") {
    c.output_dir = unquote(v, line_no);
  } else if (key == "categories") {
    c.categories = list();
  } else if (key == "reduced_dim") {
    c.reduced_dim = parse_count(unquote(v, line_no), line_no);
    if (c.reduced_dim == 0) throw ParseError("reduced_dim must be positive", line_no);
  } else if (key == "alpha") {
    c.alpha = parse_double(unquote(v, line_no), line_no);
    if (c.alpha < 0) throw ParseError("alpha must be non-negative", line_no);
  } else if (key == "ridge") {
    c.ridge = parse_double(unquote(v, line_no), line_no);
    if (c.ridge < 0) throw ParseError("ridge must be non-negative", line_no);
  } else if (key == "ridge_ladder_base") {
    c.ridge_ladder_base = parse_double(unquote(v, line_no), line_no);
    if (!(c.ridge_ladder_base > 0)) throw ParseError("ridge_ladder_base must be positive", line_no);
  } else if (key == "threads") {
    c.threads = parse_count(unquote(v, line_no), line_no);
  } else if (key == "export_features") {
    c.export_features = parse_bool(unquote(v, line_no), line_no);
  } else if (key == "loocv") {
    c.loocv = parse_bool(unquote(v, line_no), line_no);
  } else if (key == "k_grid") {
    c.k_grid.clear();
    for (const auto& s : list()) {
      const auto k = parse_count(s, line_no);
      if (k == 0) throw ParseError("k values must be positive", line_no);
      c.k_grid.push_back(k);
    }
  } else if (key == "schemes") {
    c.schemes.clear();
    for (const auto& s : list()) {
      auto sc = parse_scheme(s);
      if (!sc) throw ParseError("unknown scheme '" + s + "' (HL, EHEL)", line_no);
      c.schemes.push_back(*sc);
    }
  } else if (key == "spaces") {
    c.spaces.clear();
    for (const auto& s : list()) {
      auto sp = parse_space(s);
      if (!sp) throw ParseError("unknown space '" + s + "' (original, reduced, supervised)", line_no);
      c.spaces.push_back(*sp);
    }
  } else if (key == "fvt_variants") {
    c.fvt_variants.clear();
    for (const auto& s : list()) {
      auto fv = parse_variant(s);
      if (!fv) throw ParseError("unknown FVT variant '" + s + "' (FVT1..FVT5)", line_no);
      c.fvt_variants.push_back(*fv);
    }
  } else {
    throw ParseError("unknown config key '" + key + "'", line_no);
  }
}

inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = detail::trim(detail::strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ParseError("expected key = value", line_no);
    apply_setting(c, detail::trim(body.substr(0, eq)), body.substr(eq + 1), line_no);
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file " + path.string(), 0);
  auto c = parse_config(in);
  // Relative data paths resolve against the config file's directory.
  const auto base = path.parent_path();
  for (auto* p : {&c.corpus, &c.word_vectors})
    if (!p->empty() && p->is_relative()) *p = base / *p;
  return c;
}

// Sorted, de-duplicated enumerations so grid order is canonical.
inline void normalize(ExperimentConfig& c) {
  auto uniq = [](auto& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  uniq(c.categories);
  uniq(c.k_grid);
  uniq(c.schemes);
  uniq(c.spaces);
  uniq(c.fvt_variants);
}

inline void validate(const ExperimentConfig& c) {
  namespace fs = std::filesystem;
  if (c.corpus.empty()) throw DomainError("config: corpus path is not set");
  if (c.word_vectors.empty()) throw DomainError("config: word_vectors path is not set");
  if (!fs::is_regular_file(c.corpus)) throw DomainError("config: corpus file not found: " + c.corpus.string());
  if (!fs::is_regular_file(c.word_vectors))
    throw DomainError("config: word-vector file not found: " + c.word_vectors.string());
  if (c.schemes.empty() || c.spaces.empty() || c.fvt_variants.empty())
    throw DomainError("config: schemes, spaces and fvt_variants must be non-empty");
}

// ---------------------------------------------------------------------------
// Cells

struct CellKey {
  std::string category;
  Scheme scheme;
  Space space;
  FvtVariant variant;

  auto tie() const { return std::tie(category, scheme, space, variant); }
  friend bool operator<(const CellKey& a, const CellKey& b) { return a.tie() < b.tie(); }

  std::string slug() const {
    std::string c;
    for (char ch : category) c += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
    return c + "_" + to_string(scheme) + "_" + to_string(space) + "_" + to_string(variant);
  }
};

struct PreparedCell {
  Matrix features;  // rows = featurized documents, projected for supervised cells
  std::vector<Label> labels;
  std::vector<std::string> ids;
  std::size_t excluded = 0;
  std::optional<std::size_t> dimension;
  std::optional<SupervisedSelection> selection;
  FeatureMatrix raw;
};

struct GridContext {
  const ExperimentConfig& config;
  const Corpus& corpus;
  const WordVectorTable& table;
  const std::optional<ReducedWords>& reduced;
  std::string reduced_error;
};

inline PreparedCell prepare_cell(const GridContext& ctx, const CellKey& key) {
  const auto ds = label(ctx.corpus, key.category, key.scheme);
  std::unordered_map<std::string_view, const DocumentRecord*> by_id;
  for (const auto& d : ctx.corpus.documents) by_id.emplace(d.id, &d);
  std::vector<const DocumentRecord*> docs;
  std::unordered_map<std::string_view, Label> label_of;
  for (const auto& item : ds.items) {
    docs.push_back(by_id.at(item.doc_id));
    label_of.emplace(item.doc_id, item.label);
  }

  const WordVectorTable* table = &ctx.table;
  if (key.space == Space::reduced) {
    if (!ctx.reduced) throw DomainError("reduced word basis unavailable: " + ctx.reduced_error);
    table = &ctx.reduced->table;
  }

  PreparedCell cell;
  cell.raw = featurize(docs, *table, key.variant, key.space, 1);
  cell.excluded = cell.raw.excluded.size();
  cell.ids = cell.raw.ids;
  for (const auto& id : cell.ids) cell.labels.push_back(label_of.at(id));
  if (key.space == Space::supervised) {
    cell.selection = supervised_selection(cell.raw.values, cell.labels, ctx.config.alpha,
                                          lda_hook(ctx.config.lda()), 1);
    cell.dimension = cell.selection->best_p;
    cell.features = cell.selection->basis.project(cell.raw.values);
  } else {
    cell.features = cell.raw.values;
  }
  return cell;
}

inline EvaluationReport cell_report(const CellKey& key, std::string classifier, std::optional<std::size_t> k) {
  EvaluationReport r;
  r.category = key.category;
  r.scheme = key.scheme;
  r.space = to_string(key.space);
  r.fvt_variant = to_string(key.variant);
  r.classifier = std::move(classifier);
  r.k = k;
  return r;
}

struct CellOutcome {
  CellKey key;
  std::vector<EvaluationReport> rows;  // LDA then kNN per k
  std::optional<LdaModel> lda;
  std::optional<std::vector<SelectionTraceRow>> trace;
  std::string features_csv;
};

inline CellOutcome run_cell(const GridContext& ctx, const CellKey& key) {
  CellOutcome out{key, {}, {}, {}, {}};
  auto fail_all = [&](const std::string& msg) {
    auto r = cell_report(key, "LDA", std::nullopt);
    r.error = msg;
    out.rows.push_back(r);
    for (auto k : ctx.config.k_grid) {
      auto rk = cell_report(key, "kNN", k);
      rk.error = msg;
      out.rows.push_back(rk);
    }
  };

  PreparedCell cell;
  try {
    cell = prepare_cell(ctx, key);
  } catch (const std::exception& e) {
    fail_all(e.what());
    return out;
  }
  if (cell.selection) out.trace = cell.selection->trace;
  if (ctx.config.export_features) {
    std::ostringstream s;
    write_features_csv(s, cell.raw);
    out.features_csv = s.str();
  }

  auto lda_row = cell_report(key, "LDA", std::nullopt);
  lda_row.dimension = cell.dimension;
  try {
    const auto model = lda_fit(cell.features, cell.labels, ctx.config.lda());
    const Vector sc = model.scores(cell.features);
    std::vector<Label> pred;
    for (Eigen::Index i = 0; i < sc.size(); ++i) pred.push_back(model.predict(cell.features.row(i)));
    const auto cm = confusion(pred, cell.labels);
    auto filled = make_report(cm);
    lda_row.cm = filled.cm;
    lda_row.sensitivity = filled.sensitivity;
    lda_row.specificity = filled.specificity;
    std::vector<double> oriented(sc.begin(), sc.end());
    if (!model.positive_above)
      for (auto& v : oriented) v = -v;
    lda_row.roc = roc_and_auc(oriented, cell.labels);
    out.lda = model;
  } catch (const std::exception& e) {
    lda_row.error = e.what();
  }
  out.rows.push_back(lda_row);

  std::optional<KnnSweep> sweep;
  std::string knn_error;
  try {
    sweep = knn_leave_self_out(cell.features, cell.labels, ctx.config.k_grid, 1);
  } catch (const std::exception& e) {
    knn_error = e.what();
  }
  for (std::size_t g = 0; g < ctx.config.k_grid.size(); ++g) {
    auto r = cell_report(key, "kNN", ctx.config.k_grid[g]);
    r.dimension = cell.dimension;
    if (!sweep) {
      r.error = knn_error;
    } else {
      try {
        const auto cm = confusion(sweep->predictions[g], cell.labels);
        auto filled = make_report(cm);
        r.cm = filled.cm;
        r.sensitivity = filled.sensitivity;
        r.specificity = filled.specificity;
        r.roc = roc_and_auc(sweep->scores[g], cell.labels);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
    }
    out.rows.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Grid

struct GridResult {
  std::vector<EvaluationReport> rows;         // canonical order
  std::vector<EvaluationReport> loocv_rows;   // one per category, when enabled
  bool all_ok = true;
};

inline int classifier_rank(const EvaluationReport& r) { return r.classifier == "LDA" ? 0 : 1; }

// Within each (category, scheme, classifier) table, flags the row with the
// largest sum; the first in canonical order wins ties.
inline void mark_best(std::vector<EvaluationReport>& rows) {
  std::map<std::tuple<std::string, Scheme, int>, std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].ok()) continue;
    const auto key = std::tuple{rows[i].category, rows[i].scheme, classifier_rank(rows[i])};
    auto it = best.find(key);
    if (it == best.end() || rows[i].sum() > rows[it->second].sum()) best[key] = i;
  }
  for (const auto& [k, i] : best) rows[i].best = true;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DomainError("cannot write " + p.string());
  out << content;
}

}  // namespace detail

inline GridResult run_grid(ExperimentConfig config) {
  namespace fs = std::filesystem;
  normalize(config);
  validate(config);
  if (config.k_grid.empty()) throw DomainError("config: k_grid must be non-empty");
  const auto corpus = load_corpus(config.corpus);
  const auto table = load_word_vectors(config.word_vectors);

  std::optional<ReducedWords> reduced;
  std::string reduced_error;
  if (std::find(config.spaces.begin(), config.spaces.end(), Space::reduced) != config.spaces.end()) {
    try {
      reduced = reduce_words(table, config.reduced_dim);
    } catch (const std::exception& e) {
      reduced_error = e.what();
    }
  }
  if (config.categories.empty()) config.categories = corpus.categories();
  const GridContext ctx{config, corpus, table, reduced, reduced_error};

  std::vector<CellKey> keys;
  for (const auto& cat : config.categories)
    for (auto sc : config.schemes)
      for (auto sp : config.spaces)
        for (auto v : config.fvt_variants) keys.push_back({cat, sc, sp, v});
  std::sort(keys.begin(), keys.end());

  std::vector<CellOutcome> outcomes(keys.size());
  parallel_for(keys.size(), [&](std::size_t i) { outcomes[i] = run_cell(ctx, keys[i]); }, config.worker_count());

  GridResult result;
  for (const auto& o : outcomes)
    for (const auto& r : o.rows) result.rows.push_back(r);
  mark_best(result.rows);
  result.all_ok = std::all_of(result.rows.begin(), result.rows.end(), [](const auto& r) { return r.ok(); });

  // LOOCV for the best LDA cell of each category.
  if (config.loocv) {
    for (const auto& cat : config.categories) {
      const CellOutcome* best = nullptr;
      for (const auto& o : outcomes) {
        if (o.key.category != cat || !o.rows.front().ok()) continue;
        if (!best || o.rows.front().sum() > best->rows.front().sum()) best = &o;
      }
      if (!best) continue;
      auto r = cell_report(best->key, "LDA-LOOCV", std::nullopt);
      try {
        const auto cell = prepare_cell(ctx, best->key);
        r.dimension = cell.dimension;
        const auto lo = lda_loocv(cell.features, cell.labels, config.lda(), config.worker_count());
        auto filled = make_report(lo.cm);
        r.cm = filled.cm;
        r.sensitivity = filled.sensitivity;
        r.specificity = filled.specificity;
      } catch (const std::exception& e) {
        r.error = e.what();
        result.all_ok = false;
      }
      result.loocv_rows.push_back(r);
    }
  }

  // Artifacts.
  const fs::path out = config.output_dir;
  fs::create_directories(out);
  {
    std::ostringstream s;
    write_report_header(s);
    for (const auto& r : result.rows) write_report_row(s, r);
    detail::write_file(out / "results.csv", s.str());
  }
  if (config.loocv) {
    std::ostringstream s;
    write_report_header(s);
    for (const auto& r : result.loocv_rows) write_report_row(s, r);
    detail::write_file(out / "loocv.csv", s.str());
  }
  if (reduced) {
    std::ostringstream s;
    write_basis_tsv(s, reduced->basis, table.axes());
    detail::write_file(out / "reduced_basis.tsv", s.str());
  }
  for (const auto& o : outcomes) {
    const auto slug = o.key.slug();
    for (const auto& r : o.rows) {
      if (!r.ok() || !r.roc) continue;
      std::ostringstream s;
      write_roc_csv(s, *r.roc);
      const auto name = r.classifier == "LDA" ? slug + "_LDA.csv" : slug + "_kNN" + std::to_string(*r.k) + ".csv";
      detail::write_file(out / "roc" / name, s.str());
    }
    if (o.trace) {
      std::ostringstream s;
      write_trace_csv(s, *o.trace);
      detail::write_file(out / "traces" / (slug + ".csv"), s.str());
    }
    if (o.lda) {
      std::ostringstream s;
      write_lda_model(s, *o.lda);
      detail::write_file(out / "models" / (slug + "_LDA.txt"), s.str());
    }
    if (!o.features_csv.empty()) detail::write_file(out / "features" / (slug + ".csv"), o.features_csv);
  }
  return result;
}

// LDA with LOOCV on a single cell.
inline EvaluationReport run_loocv_cell(const ExperimentConfig& config, const CellKey& key) {
  validate(config);
  const auto corpus = load_corpus(config.corpus);
  const auto table = load_word_vectors(config.word_vectors);
  std::optional<ReducedWords> reduced;
  if (key.space == Space::reduced) reduced = reduce_words(table, config.reduced_dim);
  const GridContext ctx{config, corpus, table, reduced, {}};
  const auto cell = prepare_cell(ctx, key);
  auto r = cell_report(key, "LDA-LOOCV", std::nullopt);
  r.dimension = cell.dimension;
  const auto lo = lda_loocv(cell.features, cell.labels, config.lda(), config.worker_count());
  auto filled = make_report(lo.cm);
  r.cm = filled.cm;
  r.sensitivity = filled.sensitivity;
  r.specificity = filled.specificity;
  return r;
}

// ---------------------------------------------------------------------------
// Descriptive statistics

struct DescribeResult {
  std::vector<std::pair<std::string, CategoryStats>> stats;  // by category
  std::vector<std::pair<std::int64_t, std::size_t>> histogram;  // whole corpus
  std::vector<std::tuple<std::string, std::int64_t, std::size_t>> category_histograms;
};

inline DescribeResult describe(const Corpus& corpus) {
  DescribeResult d;
  for (const auto& cat : corpus.categories()) {
    const auto cites = category_citations(corpus, cat);
    d.stats.emplace_back(cat, descriptive_stats(cites));
    for (const auto& [c, n] : citation_histogram(cites)) d.category_histograms.emplace_back(cat, c, n);
  }
  std::vector<std::int64_t> all;
  for (const auto& doc : corpus.documents) all.push_back(doc.citations);
  d.histogram = citation_histogram(all);
  return d;
}

inline void write_describe(const DescribeResult& d, const std::filesystem::path& out) {
  std::ostringstream s;
  s << "category,n,max,min,mean,q1,q2,q3,sigma,se\n";
  s.precision(17);
  for (const auto& [cat, st] : d.stats)
    s << detail::csv_field(cat) << ',' << st.n << ',' << st.max << ',' << st.min << ',' << st.mean << ',' << st.q1
      << ',' << st.q2 << ',' << st.q3 << ',' << st.sigma << ',' << st.se << '\n';
  detail::write_file(out / "stats.csv", s.str());

  std::ostringstream h;
  h << "citations,documents\n";
  for (const auto& [c, n] : d.histogram) h << c << ',' << n << '\n';
  detail::write_file(out / "histogram.csv", h.str());

  std::ostringstream ch;
  ch << "category,citations,documents\n";
  for (const auto& [cat, c, n] : d.category_histograms) ch << detail::csv_field(cat) << ',' << c << ',' << n << '\n';
  detail::write_file(out / "category_histograms.csv", ch.str());
}

}  // namespace citesem
