#ifndef TAGPARSE_METRICS_H_
#define TAGPARSE_METRICS_H_

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "tagparse/encodings.h"
#include "tagparse/tree.h"

namespace tagparse {

struct BracketScore {
  std::size_t matched = 0;
  std::size_t gold_total = 0;
  std::size_t pred_total = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  BracketScore& operator+=(const BracketScore& other);
};

// Simplified EVALB. Defaults: every labeled span counts, no equivalences.
struct ScoreOptions {
  // COLLINS.prm-style: drop words tagged with these POS before scoring.
  bool delete_punctuation = false;
  std::set<std::string> punctuation_tags{"''", "``", ".", ":", ","};
  bool strip_function_tags = false;
};

struct Span {
  std::string label;
  int begin = 0;
  int end = 0;

  friend auto operator<=>(const Span&, const Span&) = default;
};

// Spans of all nonterminals, preterminals excluded. Unary chains contribute one
// span per member.
std::vector<Span> labeled_spans(const Tree& tree, const ScoreOptions& options = {});

// Multiset agreement of labeled spans. Throws ContractError when the trees
// cover a different number of words.
BracketScore bracket_score(const Tree& gold, const Tree& predicted,
                           const ScoreOptions& options = {});

// Micro-averaged over the corpus (summed counts), as EVALB reports.
BracketScore corpus_bracket_score(std::span<const Tree> gold,
                                  std::span<const Tree> predicted,
                                  const ScoreOptions& options = {});

struct ClassScore {
  std::size_t true_positive = 0;
  std::size_t gold = 0;
  std::size_t predicted = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

// Classification scores of the n component, one entry per distinct n-token
// seen on either side. Throws ContractError on misaligned corpora.
std::map<NComponent, ClassScore> per_n_f1(std::span<const EncodedSentence> gold,
                                          std::span<const EncodedSentence> predicted);

struct LabelSpaceStats {
  std::size_t total_distinct = 0;
  // Full labels, or "N:"/"C:"/"U:"-prefixed components when decomposed.
  std::map<std::string, std::size_t> freq_histogram;
  std::size_t n_distinct = 0;
  std::size_t c_distinct = 0;
  std::size_t u_distinct = 0;

  // Share of distinct labels seen at most `threshold` times.
  double rare_fraction(std::size_t threshold) const;
};

LabelSpaceStats label_space_stats(std::span<const EncodedSentence> corpus, bool decomposed);

}  // namespace tagparse

#endif  // TAGPARSE_METRICS_H_
