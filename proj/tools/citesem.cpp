// citesem: command-line front end for the citation-semantics pipeline.
//
//   citesem describe  --corpus corpus.jsonl --output-dir out/
//   citesem featurize --corpus corpus.jsonl --word-vectors words.tsv --variant FVT3 --output fvt.csv
//   citesem run-grid  --config grid.conf [overrides]
//   citesem loocv     --config grid.conf --category Biology --scheme EHEL --space original --variant FVT3
//   citesem synth     --output-dir data/ --documents 400 --separation 1

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "citesem.hpp"

namespace fs = std::filesystem;
using namespace citesem;

namespace {

struct Overrides {
  std::string config;
  std::string corpus, word_vectors, output_dir, alpha, reduced_dim, ridge, threads;
  std::vector<std::string> categories, k_grid, schemes, spaces, variants;
  bool export_features = false;
  bool no_loocv = false;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-c,--config", o.config, "Experiment config file (key = value)");
  cmd->add_option("--corpus", o.corpus, "Corpus JSONL file");
  cmd->add_option("--word-vectors", o.word_vectors, "Word-vector TSV file");
  cmd->add_option("--output-dir", o.output_dir, "Output directory");
  cmd->add_option("--categories", o.categories, "Categories to run (default: all)");
  cmd->add_option("--reduced-dim", o.reduced_dim, "Reduced word-basis dimension p");
  cmd->add_option("--alpha", o.alpha, "Supervised PCA within-class weight");
  cmd->add_option("--k-grid", o.k_grid, "kNN k values");
  cmd->add_option("--schemes", o.schemes, "Labeling schemes (HL, EHEL)");
  cmd->add_option("--spaces", o.spaces, "Spaces (original, reduced, supervised)");
  cmd->add_option("--variants", o.variants, "FVT variants (FVT1..FVT5)");
  cmd->add_option("--ridge", o.ridge, "Initial LDA ridge");
  cmd->add_option("--threads", o.threads, "Worker threads (0: all cores)");
  cmd->add_flag("--export-features", o.export_features, "Write per-cell feature CSVs");
  cmd->add_flag("--no-loocv", o.no_loocv, "Skip the per-category LOOCV run");
}

std::string as_list(const std::vector<std::string>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ",\"" : "\"") + v[i] + "\"";
  return s + "]";
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  auto set = [&](const char* key, const std::string& v) {
    if (!v.empty()) apply_setting(c, key, "\"" + v + "\"");
  };
  auto set_list = [&](const char* key, const std::vector<std::string>& v) {
    if (!v.empty()) apply_setting(c, key, as_list(v));
  };
  set("corpus", o.corpus);
  set("word_vectors", o.word_vectors);
  set("output_dir", o.output_dir);
  set("alpha", o.alpha);
  set("reduced_dim", o.reduced_dim);
  set("ridge", o.ridge);
  set("threads", o.threads);
  set_list("categories", o.categories);
  set_list("k_grid", o.k_grid);
  set_list("schemes", o.schemes);
  set_list("spaces", o.spaces);
  set_list("fvt_variants", o.variants);
  if (o.export_features) c.export_features = true;
  if (o.no_loocv) c.loocv = false;
  return c;
}

int run_describe(const std::string& corpus_path, const std::string& out_dir) {
  const auto corpus = load_corpus(corpus_path);
  if (corpus.empty_token_warnings)
    std::cerr << "warning: " << corpus.empty_token_warnings << " document(s) have no tokens\n";
  const auto d = describe(corpus);
  write_describe(d, out_dir);
  std::cout << "described " << corpus.size() << " documents in " << d.stats.size() << " categories -> "
            << out_dir << '\n';
  return 0;
}

int run_featurize(const std::string& corpus_path, const std::string& words_path, const std::string& variant,
                  const std::string& space, std::size_t reduced_dim, const std::string& category,
                  const std::string& output) {
  const auto v = parse_variant(variant);
  if (!v) throw DomainError("unknown FVT variant '" + variant + "'");
  const auto sp = parse_space(space);
  if (!sp || *sp == Space::supervised)
    throw DomainError("featurize supports the original and reduced spaces; supervised projection needs labels (use run-grid)");
  const auto corpus = load_corpus(corpus_path);
  const auto table = load_word_vectors(words_path);
  if (table.range_violations())
    std::cerr << "warning: " << table.range_violations() << " word-vector component(s) outside [0, 1]\n";
  std::optional<ReducedWords> reduced;
  if (*sp == Space::reduced) reduced = reduce_words(table, reduced_dim);

  std::vector<const DocumentRecord*> docs;
  for (const auto& d : corpus.documents)
    if (category.empty() || d.has_category(category)) docs.push_back(&d);
  const auto fm = featurize(docs, reduced ? reduced->table : table, *v, *sp);
  if (output.empty() || output == "-") {
    write_features_csv(std::cout, fm);
  } else {
    std::ofstream out(output);
    if (!out) throw DomainError("cannot write " + output);
    write_features_csv(out, fm);
  }
  std::cerr << "featurized " << fm.ids.size() << " document(s); excluded " << fm.excluded.size()
            << " with no in-table words\n";
  return 0;
}

int run_grid_cmd(const Overrides& o) {
  const auto config = resolve(o);
  const auto result = run_grid(config);
  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += !r.ok();
  std::cout << "wrote " << result.rows.size() << " result rows to " << (config.output_dir / "results.csv").string();
  if (failed) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return result.all_ok ? 0 : 1;
}

int run_loocv_cmd(const Overrides& o, const std::string& category, const std::string& scheme,
                  const std::string& space, const std::string& variant) {
  const auto config = resolve(o);
  const auto sc = parse_scheme(scheme);
  const auto sp = parse_space(space);
  const auto v = parse_variant(variant);
  if (!sc || !sp || !v) throw DomainError("invalid scheme/space/variant");
  const auto r = run_loocv_cell(config, {category, *sc, *sp, *v});
  write_report_header(std::cout);
  write_report_row(std::cout, r);
  return 0;
}

int run_synth(const std::string& out_dir, const synthetic::Options& opt) {
  const auto data = synthetic::generate(opt);
  fs::create_directories(out_dir);
  std::ofstream corpus(fs::path(out_dir) / "corpus.jsonl");
  write_corpus(corpus, data.corpus);
  std::ofstream words(fs::path(out_dir) / "words.tsv");
  save_word_vectors(words, data.table);
  std::cout << "wrote " << data.corpus.size() << " documents and " << data.table.size() << " words to " << out_dir
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Citation-class prediction from word clouds in a category Meaning Space"};
  app.require_subcommand(1);

  std::string corpus_path, words_path, out_dir = "citesem-out";
  auto* describe_cmd = app.add_subcommand("describe", "Per-category citation statistics and histograms");
  describe_cmd->add_option("--corpus", corpus_path, "Corpus JSONL file")->required();
  describe_cmd->add_option("--output-dir", out_dir, "Output directory");

  std::string variant = "FVT1", space = "original", category, output;
  std::size_t reduced_dim = 13;
  auto* featurize_cmd = app.add_subcommand("featurize", "Write FVTs for a corpus");
  featurize_cmd->add_option("--corpus", corpus_path, "Corpus JSONL file")->required();
  featurize_cmd->add_option("--word-vectors", words_path, "Word-vector TSV file")->required();
  featurize_cmd->add_option("--variant", variant, "FVT1..FVT5");
  featurize_cmd->add_option("--space", space, "original or reduced");
  featurize_cmd->add_option("--reduced-dim", reduced_dim, "Reduced word-basis dimension p");
  featurize_cmd->add_option("--category", category, "Only documents in this category");
  featurize_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");

  Overrides grid_flags;
  auto* grid_cmd = app.add_subcommand("run-grid", "Run the classification grid");
  add_config_flags(grid_cmd, grid_flags);

  Overrides loocv_flags;
  std::string scheme = "HL";
  auto* loocv_cmd = app.add_subcommand("loocv", "LDA with leave-one-out cross-validation on one cell");
  add_config_flags(loocv_cmd, loocv_flags);
  loocv_cmd->add_option("--category", category, "Category")->required();
  loocv_cmd->add_option("--scheme", scheme, "HL or EHEL");
  loocv_cmd->add_option("--space", space, "original, reduced or supervised");
  loocv_cmd->add_option("--variant", variant, "FVT1..FVT5");

  synthetic::Options synth_opt;
  std::string citation_model = "planted";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus and word-vector table");
  synth_cmd->add_option("--output-dir", out_dir, "Output directory");
  synth_cmd->add_option("--documents", synth_opt.documents, "Number of documents");
  synth_cmd->add_option("--vocabulary", synth_opt.vocabulary, "Number of words");
  synth_cmd->add_option("--categories", synth_opt.categories, "Word-vector dimension");
  synth_cmd->add_option("--tokens", synth_opt.tokens_per_document, "Tokens per document");
  synth_cmd->add_option("--separation", synth_opt.separation, "Class separation (within-class sd units)");
  synth_cmd->add_option("--citations", citation_model, "planted or lognormal")
      ->check(CLI::IsMember({"planted", "lognormal"}));
  synth_cmd->add_option("--category-name", synth_opt.category, "Category label for all documents");
  synth_cmd->add_option("--seed", synth_opt.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*describe_cmd) return run_describe(corpus_path, out_dir);
    if (*featurize_cmd)
      return run_featurize(corpus_path, words_path, variant, space, reduced_dim, category, output);
    if (*grid_cmd) return run_grid_cmd(grid_flags);
    if (*loocv_cmd) return run_loocv_cmd(loocv_flags, category, scheme, space, variant);
    if (*synth_cmd) {
      synth_opt.citations =
          citation_model == "lognormal" ? synthetic::CitationModel::lognormal : synthetic::CitationModel::planted;
      return run_synth(out_dir, synth_opt);
    }
  } catch (const std::exception& e) {
    std::cerr << "citesem: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
