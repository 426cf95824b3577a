#pragma once

// Synthetic corpora with planted class-dependent word semantics.
//
// Every word gets a random vector in [0,1]^m. Axis 0 is the signal axis.
// Each document has a latent topic coordinate u ~ N(+-separation/2, 1)
// depending on its planted class; its tokens are the words whose axis-0
// value is nearest to Phi(u / s) plus a small jitter, where s is the
// marginal spread of u. The mean of a document's cloud along axis 0 is
// then a monotone, low-noise function of u, so `separation` is the class
// separation in units of the within-class standard deviation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "citesem/corpus.hpp"
#include "citesem/linalg.hpp"
#include "citesem/meaning_space.hpp"

namespace citesem::synthetic {

enum class CitationModel : std::uint8_t {
  // Positives cited 20..40 times, negatives 0..10: H/L recovers the planted
  // classes exactly.
  planted,
  // floor(exp(1.5 + u + 0.5 e)), e ~ N(0,1): long-tailed and driven by the
  // latent topic.
  lognormal,
};

struct Options {
  std::size_t categories = 8;
  std::size_t vocabulary = 600;
  std::size_t documents = 400;
  std::size_t tokens_per_document = 40;
  double separation = 1.0;
  double positive_fraction = 0.5;
  double jitter = 0.05;
  CitationModel citations = CitationModel::planted;
  std::string category = "Synthetic";
  std::uint64_t seed = 1;
};

struct Dataset {
  Corpus corpus;
  WordVectorTable table;
  std::vector<Label> planted;  // per document, corpus order
  std::vector<double> latent;
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline std::string numbered(const char* prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
  return buf;
}

inline WordVectorTable random_table(std::size_t words, std::size_t categories, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::string> axes, names;
  for (std::size_t j = 0; j < categories; ++j) axes.push_back(numbered("cat", j, 3));
  for (std::size_t i = 0; i < words; ++i) names.push_back(numbered("w", i, 5));
  Matrix v(static_cast<Eigen::Index>(words), static_cast<Eigen::Index>(categories));
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    for (Eigen::Index j = 0; j < v.cols(); ++j) v(i, j) = unit(rng);
  return WordVectorTable(std::move(axes), std::move(names), std::move(v));
}

inline Dataset generate(const Options& opt) {
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> low(0, 10), high(20, 40);

  Dataset out;
  out.table = random_table(opt.vocabulary, opt.categories, rng);

  // Words ordered by their signal-axis value.
  std::vector<std::pair<double, std::size_t>> axis0;
  for (std::size_t i = 0; i < out.table.size(); ++i)
    axis0.emplace_back(out.table.vectors()(static_cast<Eigen::Index>(i), 0), i);
  std::sort(axis0.begin(), axis0.end());

  const double spread = std::sqrt(1.0 + opt.separation * opt.separation / 4.0);
  const auto n_pos = static_cast<std::size_t>(std::llround(opt.positive_fraction * static_cast<double>(opt.documents)));
  for (std::size_t d = 0; d < opt.documents; ++d) {
    const Label label = d < n_pos ? Label::positive : Label::negative;
    const double u = (is_positive(label) ? 0.5 : -0.5) * opt.separation + gauss(rng);
    const double level = normal_cdf(u / spread);

    DocumentRecord rec;
    rec.id = numbered("doc", d, 6);
    rec.categories = {opt.category};
    for (std::size_t t = 0; t < opt.tokens_per_document; ++t) {
      const double target = std::clamp(level + opt.jitter * gauss(rng), 0.0, 1.0);
      auto it = std::lower_bound(axis0.begin(), axis0.end(), std::pair{target, std::size_t{0}});
      if (it == axis0.end() || (it != axis0.begin() && target - std::prev(it)->first < it->first - target)) --it;
      rec.tokens.push_back(out.table.words()[it->second]);
    }
    switch (opt.citations) {
      case CitationModel::planted:
        rec.citations = is_positive(label) ? high(rng) : low(rng);
        break;
      case CitationModel::lognormal:
        rec.citations = static_cast<std::int64_t>(std::floor(std::exp(1.5 + u + 0.5 * gauss(rng))));
        break;
    }
    out.corpus.documents.push_back(std::move(rec));
    out.planted.push_back(label);
    out.latent.push_back(u);
  }
  return out;
}

}  // namespace citesem::synthetic
