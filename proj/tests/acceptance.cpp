// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Usage: citesem_acceptance [path-to-citesem-cli]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "citesem.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace citesem;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::vector<int> as_int(std::span<const Label> y) {
  std::vector<int> out;
  for (auto l : y) out.push_back(is_positive(l));
  return out;
}

std::vector<Label> random_labels(std::mt19937_64& rng, std::size_t n) {
  for (;;) {
    std::vector<Label> y(n);
    std::size_t pos = 0;
    for (auto& l : y) pos += is_positive(l = rng() % 2 ? Label::positive : Label::negative);
    if (pos >= 3 && n - pos >= 3) return y;
  }
}

// ---------------------------------------------------------------------------
// AC1: oracle equivalence

struct OracleTally {
  std::size_t instances = 0;
  double worst = 0;
  double tol = 0;
  void check(double err) {
    ++instances;
    worst = std::max(worst, err);
  }
  bool ok() const { return instances >= 100 && worst <= tol; }
};

Outcome ac1_oracles() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240101);
  std::map<std::string, OracleTally> t;
  t["tfidf"].tol = 1e-12;
  t["stats"].tol = 1e-10;
  t["confusion"].tol = 1e-12;
  t["pca"].tol = 1e-8;
  t["dc_trace"].tol = 1e-8;
  t["lda_omega"].tol = 1e-10;
  t["threshold"].tol = 1e-12;
  t["auc"].tol = 1e-10;

  for (int trial = 0; trial < 120; ++trial) {
    // TF-IDF on a random corpus.
    {
      std::vector<std::vector<std::string>> toks(1 + rng() % 20);
      std::vector<DocumentRecord> docs;
      for (auto& d : toks) {
        const auto len = rng() % 30;
        for (std::size_t i = 0; i < len; ++i) d.push_back("w" + std::to_string(rng() % 25));
        docs.push_back({"d", d, 0, {}});
      }
      const bool norm = trial % 2;
      const auto want = oracle::tfidf(toks, norm);
      const auto vocab = VocabularyIndex::build(docs);
      double err = 0;
      for (std::size_t i = 0; i < docs.size(); ++i) {
        std::vector<double> dense(vocab.size(), 0.0);
        for (const auto& [c, w] : tfidf_vector(docs[i], vocab, docs.size(), norm).entries) dense[c] = w;
        for (std::size_t c = 0; c < dense.size(); ++c) err = std::max(err, std::abs(dense[c] - want[i][c]));
      }
      t["tfidf"].check(err);
    }
    // Descriptive statistics against Welford and sorted-quantile oracles.
    {
      std::vector<std::int64_t> xs(1 + rng() % 200);
      for (auto& x : xs) x = static_cast<std::int64_t>(rng() % 500);
      const auto got = descriptive_stats(xs);
      const auto want = oracle::stats(xs);
      std::vector<double> dv(xs.begin(), xs.end());
      double err = std::max({std::abs(got.mean - want.mean), std::abs(got.sigma - want.sigma),
                             std::abs(got.q1 - oracle::quantile(dv, 0.25)), std::abs(got.q2 - oracle::quantile(dv, 0.5)),
                             std::abs(got.q3 - oracle::quantile(dv, 0.75))});
      t["stats"].check(err / std::max(1.0, want.mean));
    }
    // Confusion matrix and rates.
    {
      const std::size_t n = 6 + rng() % 195;
      const auto y = random_labels(rng, n), p = random_labels(rng, n);
      const auto cm = confusion(p, y);
      const auto rc = oracle::recount(as_int(p), as_int(y));
      double err = (cm.tp != rc.tp || cm.fp != rc.fp || cm.fn != rc.fn || cm.tn != rc.tn) ? 1.0 : 0.0;
      err = std::max(err, std::abs(sensitivity(cm) - static_cast<double>(rc.tp) / static_cast<double>(rc.tp + rc.fn)));
      err = std::max(err, std::abs(specificity(cm) - static_cast<double>(rc.tn) / static_cast<double>(rc.tn + rc.fp)));
      t["confusion"].check(err);
    }
    // PCA eigenpairs against cyclic Jacobi.
    {
      const std::size_t d = 2 + rng() % 9;
      const auto rows = oracle::random_matrix(rng, d + 2 + rng() % 150, d);
      const auto pca = fit_pca(testutil::to_eigen(rows));
      const auto eig = oracle::jacobi(oracle::covariance(rows));
      double err = 0;
      for (std::size_t k = 0; k < d; ++k) {
        err = std::max(err, std::abs(pca.eigenvalues(static_cast<Eigen::Index>(k)) - eig.values[k]));
        const bool isolated = (k == 0 || eig.values[k - 1] - eig.values[k] > 1e-6) &&
                              (k + 1 == d || eig.values[k] - eig.values[k + 1] > 1e-6);
        if (isolated)
          err = std::max(err, testutil::up_to_sign(testutil::to_vec(pca.axes.col(static_cast<Eigen::Index>(k))), eig.vectors[k]));
      }
      t["pca"].check(err);
    }
    // Supervised PCA: tr(V^T Q V) equals D_C from the pairwise definition.
    {
      const std::size_t d = 2 + rng() % 9, n = 6 + rng() % 60;
      const auto rows = oracle::random_matrix(rng, n, d);
      const auto y = random_labels(rng, n);
      const double alpha = 0.25 * static_cast<double>(rng() % 9);
      const auto b = supervised_pca(testutil::to_eigen(rows), y, 1 + rng() % d, alpha);
      oracle::Mat basis;
      for (Eigen::Index k = 0; k < b.v.cols(); ++k) basis.push_back(testutil::to_vec(b.v.col(k)));
      std::vector<bool> pos;
      for (auto l : y) pos.push_back(is_positive(l));
      const double want = oracle::pairwise_dc(rows, pos, basis, alpha);
      t["dc_trace"].check(std::abs(b.objective - want) / std::max(1.0, std::abs(want)));
    }
    // LDA omega against the explicit inverse.
    {
      const std::size_t d = 2 + rng() % 9;
      auto p = oracle::random_matrix(rng, d + 2 + rng() % 80, d), q = oracle::random_matrix(rng, d + 2 + rng() % 80, d);
      for (auto& r : p) r[0] += 0.7;
      const auto m = lda_fit(testutil::to_eigen(p), testutil::to_eigen(q));
      const auto c1 = oracle::covariance(p), c2 = oracle::covariance(q);
      oracle::Mat s(d, oracle::Vec(d));
      oracle::Vec diff(d, 0);
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = 0; b < d; ++b) s[a][b] = c1[a][b] + c2[a][b];
        for (const auto& r : p) diff[a] += r[a] / static_cast<double>(p.size());
        for (const auto& r : q) diff[a] -= r[a] / static_cast<double>(q.size());
      }
      const auto w = oracle::matvec(oracle::inverse(s), diff);
      double scale = 0;
      for (double v : w) scale = std::max(scale, std::abs(v));
      t["lda_omega"].check(testutil::up_to_sign(testutil::to_vec(m.omega), w) / std::max(1.0, scale));
    }
    // Threshold search against every cut.
    {
      const std::size_t n = 6 + rng() % 195;
      const auto y = random_labels(rng, n);
      std::vector<double> s(n);
      for (auto& v : s) v = trial % 2 ? static_cast<double>(rng() % 12) : oracle::random_matrix(rng, 1, 1)[0][0];
      t["threshold"].check(std::abs(lda_threshold(s, y).sum() - oracle::best_cut_sum(s, as_int(y))));
    }
    // AUC against pair counting.
    {
      const std::size_t n = 6 + rng() % 195;
      const auto y = random_labels(rng, n);
      std::vector<double> s(n);
      for (auto& v : s) v = trial % 2 ? static_cast<double>(rng() % 12) : oracle::random_matrix(rng, 1, 1)[0][0];
      const double want = oracle::pair_auc(s, as_int(y));
      t["auc"].check(std::max(std::abs(roc_and_auc(s, y).auc - want), std::abs(auc_rank_statistic(s, y) - want)));
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = secs < 60;
  std::ostringstream d;
  for (const auto& [name, tally] : t) {
    o.pass = o.pass && tally.ok();
    d << name << ' ' << tally.instances << "x max_err=" << fmt("%.1e", tally.worst) << " tol=" << fmt("%.0e", tally.tol)
      << (tally.ok() ? "" : " FAIL") << "; ";
  }
  d << "runtime " << fmt("%.2f", secs) << " s";
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------------------
// AC2: determinism of full run-grid executions

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  if (!fs::exists(root)) return files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream s;
      s << in.rdbuf();
      files[fs::relative(e.path(), root).string()] = s.str();
    }
  return files;
}

Outcome ac2_determinism(const std::string& cli) {
  const auto dir = testutil::temp_dir("acceptance_det");
  synthetic::Options opt;
  opt.documents = 240;
  opt.vocabulary = 300;
  opt.categories = 6;
  opt.tokens_per_document = 20;
  opt.separation = 1;
  opt.seed = 11;
  const auto data = synthetic::generate(opt);
  {
    std::ofstream c(dir / "corpus.jsonl");
    write_corpus(c, data.corpus);
    std::ofstream w(dir / "words.tsv");
    save_word_vectors(w, data.table);
    std::ofstream g(dir / "grid.conf");
    g << "corpus = corpus.jsonl\nword_vectors = words.tsv\nreduced_dim = 3\nexport_features = true\n";
  }
  std::string how;
  for (const char* run : {"a", "b"}) {
    const auto out = dir / run;
    const auto threads = std::string(run) == "a" ? "1" : "4";
    if (!cli.empty()) {
      const auto cmd = "\"" + cli + "\" run-grid --config \"" + (dir / "grid.conf").string() + "\" --output-dir \"" +
                       out.string() + "\" --threads " + threads + " > /dev/null";
      if (std::system(cmd.c_str()) != 0) return {false, "run-grid exited non-zero"};
      how = "CLI";
    } else {
      auto c = load_config(dir / "grid.conf");
      c.output_dir = out;
      c.threads = static_cast<std::size_t>(std::atoi(threads));
      run_grid(c);
      how = "library";
    }
  }
  const auto a = read_tree(dir / "a"), b = read_tree(dir / "b");
  std::size_t csvs = 0, features = 0, bytes = 0;
  for (const auto& [name, content] : a) {
    csvs += name.ends_with(".csv");
    features += name.starts_with("features/");
    bytes += content.size();
  }
  Outcome o;
  o.pass = !a.empty() && a == b && a.count("results.csv") && features == 2 * 3 * 5;
  o.detail = std::to_string(a.size()) + " files (" + std::to_string(csvs) + " CSV, " + std::to_string(features) +
             " feature exports incl. FVT4/FVT5 centroids, " + std::to_string(bytes) + " bytes) identical across two " +
             how + " runs with 1 and 4 threads";
  return o;
}

// ---------------------------------------------------------------------------
// AC3 / AC4: synthetic corpora, LDA on FVT1 in the original space

double lda_sum(const synthetic::Dataset& data, Scheme scheme) {
  const auto ds = label(data.corpus, "Synthetic", scheme);
  std::map<std::string, const DocumentRecord*> by_id;
  for (const auto& d : data.corpus.documents) by_id.emplace(d.id, &d);
  std::vector<const DocumentRecord*> docs;
  std::vector<Label> y;
  for (const auto& it : ds.items) {
    docs.push_back(by_id.at(it.doc_id));
    y.push_back(it.label);
  }
  const auto fm = featurize(docs, data.table, FvtVariant::FVT1);
  if (!fm.excluded.empty()) throw DomainError("unexpected exclusions");
  const auto m = lda_fit(fm.values, y);
  return m.train_sensitivity + m.train_specificity;
}

synthetic::Options ladder_options(double separation, std::uint64_t seed) {
  synthetic::Options opt;
  opt.documents = 4000;
  opt.vocabulary = 1000;
  opt.categories = 8;
  opt.tokens_per_document = 40;
  opt.separation = separation;
  opt.seed = seed;
  return opt;
}

Outcome ac3_ladder() {
  const auto t0 = Clock::now();
  struct Rung {
    double separation;
    std::function<bool(double)> ok;
    const char* rule;
  };
  const Rung rungs[] = {{0.0, [](double s) { return s >= 0.90 && s <= 1.10; }, "in [90,110]"},
                        {1.0, [](double s) { return s > 1.20; }, "> 120"},
                        {3.0, [](double s) { return s > 1.80; }, "> 180"}};
  Outcome o;
  std::ostringstream d;
  for (const auto& r : rungs) {
    double lo = 1e9, hi = -1e9, mean = 0;
    bool all = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const double s = lda_sum(synthetic::generate(ladder_options(r.separation, 1000 + seed)), Scheme::HL);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
      mean += s / 20;
      all = all && r.ok(s);
    }
    o.pass = o.pass && all;
    d << "sep " << r.separation << ": " << fmt("%.1f", 100 * lo) << ".." << fmt("%.1f", 100 * hi) << " mean "
      << fmt("%.1f", 100 * mean) << "% (every seed " << r.rule << (all ? "" : " VIOLATED") << "); ";
  }
  const double secs = seconds_since(t0);
  o.pass = o.pass && secs < 300;
  d << "runtime " << fmt("%.1f", secs) << " s";
  o.detail = d.str();
  return o;
}

Outcome ac4_ehel_beats_hl() {
  std::size_t wins = 0;
  double gap = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto opt = ladder_options(1.0, 5000 + seed);
    opt.citations = synthetic::CitationModel::lognormal;
    const auto data = synthetic::generate(opt);
    const double hl = lda_sum(data, Scheme::HL), eh = lda_sum(data, Scheme::EHEL);
    wins += eh > hl;
    gap += (eh - hl) / 20;
  }
  return {wins >= 18, "EH/EL > H/L in " + std::to_string(wins) + "/20 seeds (mean gap " + fmt("%+.1f", 100 * gap) +
                          " points)"};
}

// ---------------------------------------------------------------------------
// AC5: FVT dimensions

Outcome ac5_dimensions() {
  synthetic::Options opt;
  opt.categories = 252;
  opt.vocabulary = 400;
  opt.documents = 12;
  opt.tokens_per_document = 30;
  const auto data = synthetic::generate(opt);
  std::vector<const DocumentRecord*> docs;
  for (const auto& d : data.corpus.documents) docs.push_back(&d);
  const auto reduced = reduce_words(data.table, 13);
  std::vector<std::size_t> full, red;
  for (auto v : kAllVariants) {
    full.push_back(static_cast<std::size_t>(featurize(docs, data.table, v).values.cols()));
    red.push_back(static_cast<std::size_t>(featurize(docs, reduced.table, v, Space::reduced).values.cols()));
  }
  const std::vector<std::size_t> want_full{252, 252, 504, 504, 756}, want_red{13, 13, 26, 26, 39};
  auto show = [](const std::vector<std::size_t>& v) {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + "}";
  };
  return {full == want_full && red == want_red, "m=252: " + show(full) + "; p=13: " + show(red)};
}

// ---------------------------------------------------------------------------
// AC6: AUC anchors

Outcome ac6_auc() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> g;
  // Perfect ranking.
  std::vector<double> s(1000);
  std::vector<Label> y(1000);
  for (std::size_t i = 0; i < 1000; ++i) {
    y[i] = rng() % 2 ? Label::positive : Label::negative;
    s[i] = g(rng) + (is_positive(y[i]) ? 100.0 : 0.0);
  }
  const double perfect = roc_and_auc(s, y).auc;

  // Both classes receive the same score multiset: score law independent of label.
  std::vector<double> pool(500);
  for (auto& v : pool) v = std::round(4 * g(rng)) / 4;
  std::vector<double> se;
  std::vector<Label> ye;
  for (double v : pool) {
    se.push_back(v);
    ye.push_back(Label::positive);
    se.push_back(v);
    ye.push_back(Label::negative);
  }
  const double exchangeable = roc_and_auc(se, ye).auc;

  // Independent random scores and labels, 20 draws of 1000 points.
  double mean = 0, worst = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::vector<double> sr(1000);
    std::vector<Label> yr(1000);
    for (std::size_t i = 0; i < 1000; ++i) {
      yr[i] = rng() % 2 ? Label::positive : Label::negative;
      sr[i] = std::round(3 * g(rng));
    }
    const double a = roc_and_auc(sr, yr).auc;
    mean += a / 20;
    worst = std::max(worst, std::abs(a - 0.5));
  }
  Outcome o;
  o.pass = perfect == 1.0 && std::abs(exchangeable - 0.5) <= 0.02 && std::abs(mean - 0.5) <= 0.02;
  o.detail = "perfect ranking AUC=" + fmt("%.17g", perfect) + "; label-independent score law AUC=" +
             fmt("%.4f", exchangeable) + "; independent draws mean AUC=" + fmt("%.4f", mean) +
             " over 20x1000 points (largest single-draw deviation " + fmt("%.4f", worst) + ")";
  return o;
}

// ---------------------------------------------------------------------------
// AC7: LOOCV honesty

Outcome ac7_loocv() {
  std::size_t leak_ok = 0;
  double resub_mean = 0, loocv_mean = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    // 30 noise points in 20 dimensions with random labels, plus label-flipped
    // duplicates of the first 10.
    std::mt19937_64 rng(700 + seed);
    const std::size_t base = 30, dup = 10, d = 20;
    const auto rows = oracle::random_matrix(rng, base, d);
    const auto y0 = random_labels(rng, base);
    Matrix x(static_cast<Eigen::Index>(base + dup), static_cast<Eigen::Index>(d));
    std::vector<Label> y;
    for (std::size_t i = 0; i < base + dup; ++i) {
      const auto src = i < base ? i : i - base;
      for (std::size_t j = 0; j < d; ++j)
        x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[src][j];
      y.push_back(i < base ? y0[src] : (is_positive(y0[src]) ? Label::negative : Label::positive));
    }
    const auto whole = lda_fit(x, y);
    const double resub = whole.train_sensitivity + whole.train_specificity;
    const auto lo = lda_loocv(x, y);
    const double held = lo.sensitivity() + lo.specificity();
    leak_ok += resub > held;
    resub_mean += resub / 20;
    loocv_mean += held / 20;
  }

  double lo_min = 1e9, lo_max = -1e9;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(7700 + seed);
    const std::size_t n = 2000;
    const auto x = testutil::to_eigen(oracle::random_matrix(rng, n, 3));
    const auto y = random_labels(rng, n);
    const auto lo = lda_loocv(x, y);
    const double s = lo.sensitivity() + lo.specificity();
    lo_min = std::min(lo_min, s);
    lo_max = std::max(lo_max, s);
  }
  Outcome o;
  o.pass = leak_ok == 20 && lo_min >= 0.90 && lo_max <= 1.10;
  o.detail = "duplicated/flipped data: whole-set > LOOCV in " + std::to_string(leak_ok) + "/20 seeds (mean " +
             fmt("%.1f", 100 * resub_mean) + "% vs " + fmt("%.1f", 100 * loocv_mean) +
             "%); pure-noise LOOCV range " + fmt("%.1f", 100 * lo_min) + ".." + fmt("%.1f", 100 * lo_max) +
             "% over 20 seeds";
  return o;
}

// ---------------------------------------------------------------------------
// AC8: supervised PCA beats PCA at p = 1

Outcome ac8_supervised() {
  std::size_t wins = 0;
  double sup_mean = 0, pca_mean = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 rng(800 + seed);
    std::normal_distribution<double> g;
    const std::size_t n = 200, d = 6;
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::vector<Label> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = i % 2 ? Label::negative : Label::positive;
      const auto r = static_cast<Eigen::Index>(i);
      x(r, 0) = 5 * g(rng);  // dominant variance, no class signal
      x(r, 1) = g(rng) + (is_positive(y[i]) ? 0.75 : -0.75);
      for (Eigen::Index j = 2; j < static_cast<Eigen::Index>(d); ++j) x(r, j) = g(rng);
    }
    const auto sup = supervised_pca(x, y, 1, 1.0);
    const auto ms = lda_fit(sup.project(x), y);
    const auto pca = fit_pca(x);
    const auto mp = lda_fit(pca.project(x, 1), y);
    const double s = ms.train_sensitivity + ms.train_specificity;
    const double p = mp.train_sensitivity + mp.train_specificity;
    wins += s > p;
    sup_mean += s / 20;
    pca_mean += p / 20;
  }
  return {wins >= 18, "supervised PCA > PCA in " + std::to_string(wins) + "/20 seeds (mean LDA sum " +
                          fmt("%.1f", 100 * sup_mean) + "% vs " + fmt("%.1f", 100 * pca_mean) + "%)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  struct Criterion {
    const char* id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"AC1", "oracle equivalence", ac1_oracles},
      {"AC2", "run-grid determinism", [&] { return ac2_determinism(cli); }},
      {"AC3", "synthetic separability ladder", ac3_ladder},
      {"AC4", "EH/EL beats H/L", ac4_ehel_beats_hl},
      {"AC5", "FVT dimension bookkeeping", ac5_dimensions},
      {"AC6", "AUC anchors", ac6_auc},
      {"AC7", "LOOCV anti-leakage", ac7_loocv},
      {"AC8", "supervised PCA improvement", ac8_supervised},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << c.id << ' ' << (o.pass ? "PASS" : "FAIL") << "  " << c.name << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criterion(s) failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
