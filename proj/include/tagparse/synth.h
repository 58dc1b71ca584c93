#ifndef TAGPARSE_SYNTH_H_
#define TAGPARSE_SYNTH_H_

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tagparse/tree.h"

namespace tagparse {

// Random constituent tree for property tests. Deterministic in `seed`.
// The tree has at most `max_leaves` words and depth (preterminal included) at
// most `max_depth`. Unary chains of length two and more, both over a single
// preterminal and between nonterminals, occur with positive probability.
// POS tags are drawn from P0..P7 and words from w0..w39.
Tree random_tree(std::uint64_t seed, int max_leaves, int max_depth,
                 std::span<const std::string> nonterminal_alphabet);

std::vector<Tree> random_corpus(std::uint64_t seed, int count, int max_leaves,
                                int max_depth,
                                std::span<const std::string> nonterminal_alphabet);

struct PcfgRule {
  std::vector<std::string> rhs;
  double weight = 1.0;
};

// A small probabilistic grammar. Symbols with an entry in the lexicon are
// preterminals. The first rule of every nonterminal is its fallback once the
// depth limit is reached, so it must lead to termination.
class Pcfg {
 public:
  Pcfg(std::string start, std::map<std::string, std::vector<PcfgRule>> rules,
       std::map<std::string, std::vector<std::string>> lexicon);

  // English-flavoured toy grammar used for the bundled synthetic corpus.
  static Pcfg toy_english();

  Tree sample(std::mt19937_64& rng, int max_depth) const;

 private:
  Tree expand(const std::string& symbol, std::mt19937_64& rng, int level,
              int max_depth) const;

  std::string start_;
  std::map<std::string, std::vector<PcfgRule>> rules_;
  std::map<std::string, std::vector<std::string>> lexicon_;
};

// `count` sentences of at most `max_leaves` words from the toy grammar.
std::vector<Tree> pcfg_corpus(std::uint64_t seed, int count, int max_leaves = 40);

}  // namespace tagparse

#endif  // TAGPARSE_SYNTH_H_
