#include "tagparse/synth.h"

#include <algorithm>

#include "tagparse/errors.h"

namespace tagparse {

namespace {

constexpr int kPosTags = 8;
constexpr int kWords = 40;

class RandomTreeBuilder {
 public:
  RandomTreeBuilder(std::uint64_t seed, std::span<const std::string> alphabet)
      : rng_(seed), alphabet_(alphabet) {}

  Tree build(int max_leaves, int max_depth) {
    int leaves = max_depth == 1 ? 1 : uniform(1, max_leaves);
    return node(leaves, max_depth);
  }

 private:
  int uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  const std::string& label() {
    return alphabet_[uniform(0, static_cast<int>(alphabet_.size()) - 1)];
  }

  Tree leaf() {
    return Tree::Leaf("P" + std::to_string(uniform(0, kPosTags - 1)),
                      "w" + std::to_string(uniform(0, kWords - 1)));
  }

  // budget >= 1 levels remain for this subtree; leaves == 1 whenever budget == 1.
  Tree node(int leaves, int budget) {
    if (leaves == 1) {
      Tree t = leaf();
      if (budget >= 2 && coin(0.3)) {
        int chain = uniform(1, std::min(3, budget - 1));
        for (int i = 0; i < chain; ++i) t = Tree::Internal(label(), {std::move(t)});
      }
      return t;
    }
    if (budget >= 3 && coin(0.08)) {
      return Tree::Internal(label(), {node(leaves, budget - 1)});
    }
    std::vector<int> sizes;
    if (budget == 2) {
      sizes.assign(leaves, 1);
    } else {
      sizes = split(leaves, uniform(2, std::min(leaves, 4)));
    }
    std::vector<Tree> children;
    children.reserve(sizes.size());
    for (int s : sizes) children.push_back(node(s, budget - 1));
    return Tree::Internal(label(), std::move(children));
  }

  // Uniform composition of n into k positive parts.
  std::vector<int> split(int n, int k) {
    std::vector<int> cuts;
    for (int i = 1; i < n; ++i) cuts.push_back(i);
    std::shuffle(cuts.begin(), cuts.end(), rng_);
    cuts.resize(k - 1);
    std::sort(cuts.begin(), cuts.end());
    std::vector<int> sizes;
    int prev = 0;
    for (int c : cuts) {
      sizes.push_back(c - prev);
      prev = c;
    }
    sizes.push_back(n - prev);
    return sizes;
  }

  std::mt19937_64 rng_;
  std::span<const std::string> alphabet_;
};

}  // namespace

Tree random_tree(std::uint64_t seed, int max_leaves, int max_depth,
                 std::span<const std::string> nonterminal_alphabet) {
  if (max_leaves < 1 || max_depth < 1) {
    throw ContractError("random_tree: max_leaves and max_depth must be >= 1");
  }
  if (nonterminal_alphabet.empty()) {
    throw ContractError("random_tree: empty nonterminal alphabet");
  }
  for (const std::string& a : nonterminal_alphabet) {
    if (a.empty() || a.find('+') != std::string::npos) {
      throw ContractError("random_tree: bad nonterminal '" + a + "'");
    }
  }
  return RandomTreeBuilder(seed, nonterminal_alphabet).build(max_leaves, max_depth);
}

std::vector<Tree> random_corpus(std::uint64_t seed, int count, int max_leaves,
                                int max_depth,
                                std::span<const std::string> nonterminal_alphabet) {
  std::vector<Tree> trees;
  trees.reserve(count);
  std::vector<std::uint64_t> seeds(count);
  std::mt19937_64 seeder(seed);
  for (auto& s : seeds) s = seeder();
  for (int i = 0; i < count; ++i) {
    trees.push_back(random_tree(seeds[i], max_leaves, max_depth, nonterminal_alphabet));
  }
  return trees;
}

Pcfg::Pcfg(std::string start, std::map<std::string, std::vector<PcfgRule>> rules,
           std::map<std::string, std::vector<std::string>> lexicon)
    : start_(std::move(start)), rules_(std::move(rules)), lexicon_(std::move(lexicon)) {
  for (const auto& [lhs, alternatives] : rules_) {
    if (alternatives.empty()) throw ContractError("pcfg: no rules for " + lhs);
    for (const PcfgRule& r : alternatives) {
      if (r.rhs.empty() || r.weight <= 0) throw ContractError("pcfg: bad rule for " + lhs);
      for (const std::string& sym : r.rhs) {
        if (!rules_.count(sym) && !lexicon_.count(sym)) {
          throw ContractError("pcfg: undefined symbol " + sym);
        }
      }
    }
  }
  if (!rules_.count(start_)) throw ContractError("pcfg: undefined start symbol");
}

Pcfg Pcfg::toy_english() {
  std::map<std::string, std::vector<PcfgRule>> rules{
      {"S",
       {{{"NP", "VP", "."}, 0.55},
        {{"NP", "VP"}, 0.2},
        {{"SBAR", ",", "NP", "VP", "."}, 0.1},
        {{"S", "CC", "S"}, 0.07},
        {{"VP", "."}, 0.08}}},
      {"NP",
       {{{"NNP"}, 0.14},
        {{"DT", "NN"}, 0.3},
        {{"DT", "JJ", "NN"}, 0.14},
        {{"PRP"}, 0.12},
        {{"NP", "PP"}, 0.16},
        {{"DT", "NN", "SBAR"}, 0.05},
        {{"NNS"}, 0.05},
        {{"NP", "CC", "NP"}, 0.04}}},
      {"VP",
       {{{"VBD"}, 0.12},
        {{"VBD", "NP"}, 0.3},
        {{"VBD", "NP", "PP"}, 0.18},
        {{"VBZ", "ADJP"}, 0.1},
        {{"VBD", "PP"}, 0.1},
        {{"MD", "VP"}, 0.08},
        {{"VBD", "SBAR"}, 0.07},
        {{"VP", "CC", "VP"}, 0.05}}},
      {"PP", {{{"IN", "NP"}, 1.0}}},
      {"ADJP", {{{"JJ"}, 0.6}, {{"RB", "JJ"}, 0.4}}},
      {"SBAR", {{{"IN", "S"}, 0.7}, {{"WDT", "VP"}, 0.3}}},
  };
  std::map<std::string, std::vector<std::string>> lexicon{
      {"DT", {"the", "a", "every", "this", "that", "some"}},
      {"NN", {"dog", "cat", "park", "house", "river", "teacher", "book", "car",
              "garden", "city", "letter", "window", "story", "market"}},
      {"NNS", {"dogs", "cats", "books", "children", "stones", "birds", "ideas"}},
      {"NNP", {"Mary", "John", "Paris", "Alice", "Bob", "Rome", "Kim", "Lee"}},
      {"PRP", {"she", "he", "they", "we", "it"}},
      {"JJ", {"big", "old", "red", "quiet", "happy", "small", "green", "strange"}},
      {"RB", {"very", "quite", "rather", "too"}},
      {"VBD", {"saw", "liked", "found", "took", "heard", "watched", "met",
               "painted", "opened", "wrote"}},
      {"VBZ", {"is", "seems", "looks", "remains"}},
      {"MD", {"will", "could", "might", "should"}},
      {"IN", {"in", "near", "with", "under", "because", "after", "behind"}},
      {"WDT", {"which", "that"}},
      {"CC", {"and", "but", "or"}},
      {".", {".", "!"}},
      {",", {","}},
  };
  return Pcfg("S", std::move(rules), std::move(lexicon));
}

Tree Pcfg::sample(std::mt19937_64& rng, int max_depth) const {
  return expand(start_, rng, 1, max_depth);
}

Tree Pcfg::expand(const std::string& symbol, std::mt19937_64& rng, int level,
                  int max_depth) const {
  if (auto lex = lexicon_.find(symbol); lex != lexicon_.end()) {
    std::uniform_int_distribution<std::size_t> pick(0, lex->second.size() - 1);
    return Tree::Leaf(symbol, lex->second[pick(rng)]);
  }
  const std::vector<PcfgRule>& alternatives = rules_.at(symbol);
  std::size_t choice = 0;
  if (level < max_depth) {
    std::vector<double> weights;
    for (const PcfgRule& r : alternatives) weights.push_back(r.weight);
    choice = std::discrete_distribution<std::size_t>(weights.begin(), weights.end())(rng);
  }
  std::vector<Tree> children;
  for (const std::string& sym : alternatives[choice].rhs) {
    children.push_back(expand(sym, rng, level + 1, max_depth));
  }
  return Tree::Internal(symbol, std::move(children));
}

std::vector<Tree> pcfg_corpus(std::uint64_t seed, int count, int max_leaves) {
  const Pcfg grammar = Pcfg::toy_english();
  std::mt19937_64 rng(seed);
  std::vector<Tree> trees;
  trees.reserve(count);
  while (static_cast<int>(trees.size()) < count) {
    Tree t = grammar.sample(rng, 8);
    if (static_cast<int>(leaf_count(t)) <= max_leaves) trees.push_back(std::move(t));
  }
  return trees;
}

}  // namespace tagparse
