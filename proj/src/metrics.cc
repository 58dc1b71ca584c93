#include "tagparse/metrics.h"

#include <algorithm>

#include "tagparse/errors.h"
#include "tagparse/treebank.h"

namespace tagparse {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

// Returns the number of kept words in the subtree; appends spans post-order.
int collect_spans(const Tree& node, int start, const ScoreOptions& options,
                  std::vector<Span>& out) {
  if (node.is_leaf()) {
    return options.delete_punctuation && options.punctuation_tags.count(node.label) ? 0 : 1;
  }
  int width = 0;
  for (const Tree& c : node.children) width += collect_spans(c, start + width, options, out);
  if (width > 0) {
    out.push_back({options.strip_function_tags ? strip_function_tag(node.label) : node.label,
                   start, start + width});
  }
  return width;
}

}  // namespace

double BracketScore::precision() const { return ratio(matched, pred_total); }
double BracketScore::recall() const { return ratio(matched, gold_total); }
double BracketScore::f1() const { return harmonic(precision(), recall()); }

BracketScore& BracketScore::operator+=(const BracketScore& other) {
  matched += other.matched;
  gold_total += other.gold_total;
  pred_total += other.pred_total;
  return *this;
}

std::vector<Span> labeled_spans(const Tree& tree, const ScoreOptions& options) {
  std::vector<Span> spans;
  collect_spans(tree, 0, options, spans);
  return spans;
}

BracketScore bracket_score(const Tree& gold, const Tree& predicted,
                           const ScoreOptions& options) {
  const std::size_t gold_words = leaf_count(gold);
  const std::size_t pred_words = leaf_count(predicted);
  if (gold_words != pred_words) {
    throw ContractError("bracket_score: gold has " + std::to_string(gold_words) +
                        " words, prediction has " + std::to_string(pred_words));
  }
  std::vector<Span> g = labeled_spans(gold, options);
  std::vector<Span> p = labeled_spans(predicted, options);
  std::sort(g.begin(), g.end());
  std::sort(p.begin(), p.end());
  BracketScore score;
  score.gold_total = g.size();
  score.pred_total = p.size();
  // Multiset intersection of the sorted sequences.
  auto gi = g.begin();
  auto pi = p.begin();
  while (gi != g.end() && pi != p.end()) {
    if (*gi < *pi) {
      ++gi;
    } else if (*pi < *gi) {
      ++pi;
    } else {
      ++score.matched;
      ++gi;
      ++pi;
    }
  }
  return score;
}

BracketScore corpus_bracket_score(std::span<const Tree> gold, std::span<const Tree> predicted,
                                  const ScoreOptions& options) {
  if (gold.size() != predicted.size()) {
    throw ContractError("corpus_bracket_score: " + std::to_string(gold.size()) +
                        " gold trees vs " + std::to_string(predicted.size()) + " predicted");
  }
  BracketScore total;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    total += bracket_score(gold[i], predicted[i], options);
  }
  return total;
}

double ClassScore::precision() const { return ratio(true_positive, predicted); }
double ClassScore::recall() const { return ratio(true_positive, gold); }
double ClassScore::f1() const { return harmonic(precision(), recall()); }

std::map<NComponent, ClassScore> per_n_f1(std::span<const EncodedSentence> gold,
                                          std::span<const EncodedSentence> predicted) {
  if (gold.size() != predicted.size()) {
    throw ContractError("per_n_f1: corpora have different sizes");
  }
  std::map<NComponent, ClassScore> scores;
  for (std::size_t s = 0; s < gold.size(); ++s) {
    const auto& g = gold[s].labels;
    const auto& p = predicted[s].labels;
    if (g.size() != p.size()) {
      throw ContractError("per_n_f1: sentence " + std::to_string(s) + " has " +
                          std::to_string(g.size()) + " gold and " + std::to_string(p.size()) +
                          " predicted labels");
    }
    for (std::size_t t = 0; t < g.size(); ++t) {
      ++scores[g[t].n].gold;
      ++scores[p[t].n].predicted;
      if (g[t].n == p[t].n) ++scores[g[t].n].true_positive;
    }
  }
  return scores;
}

double LabelSpaceStats::rare_fraction(std::size_t threshold) const {
  if (freq_histogram.empty()) return 0.0;
  std::size_t rare = 0;
  for (const auto& [label, count] : freq_histogram) {
    if (count <= threshold) ++rare;
  }
  return static_cast<double>(rare) / static_cast<double>(freq_histogram.size());
}

LabelSpaceStats label_space_stats(std::span<const EncodedSentence> corpus, bool decomposed) {
  if (corpus.empty()) throw ContractError("label_space_stats: empty corpus");
  LabelSpaceStats stats;
  std::map<std::string, std::size_t> n, c, u;
  std::map<std::string, std::size_t> full;
  for (const EncodedSentence& s : corpus) {
    for (const TagLabel& l : s.labels) {
      const std::string surface = format_label(l);
      ++full[surface];
      const std::size_t a = surface.find(kFieldSeparator);
      const std::size_t b = surface.find(kFieldSeparator, a + 1);
      ++n[surface.substr(0, a)];
      ++c[surface.substr(a + 1, b - a - 1)];
      ++u[surface.substr(b + 1)];
    }
  }
  stats.n_distinct = n.size();
  stats.c_distinct = c.size();
  stats.u_distinct = u.size();
  if (decomposed) {
    for (const auto& [k, v] : n) stats.freq_histogram["N:" + k] = v;
    for (const auto& [k, v] : c) stats.freq_histogram["C:" + k] = v;
    for (const auto& [k, v] : u) stats.freq_histogram["U:" + k] = v;
  } else {
    stats.freq_histogram = std::move(full);
  }
  stats.total_distinct = stats.freq_histogram.size();
  return stats;
}

}  // namespace tagparse
