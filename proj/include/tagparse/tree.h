#ifndef TAGPARSE_TREE_H_
#define TAGPARSE_TREE_H_

#include <string>
#include <vector>

namespace tagparse {

// An n-ary constituent tree. Leaves are preterminals: `label` holds the POS
// tag and `word` the token. Internal nodes carry a nonterminal label and at
// least one child. Trees are plain values; copies are deep.
struct Tree {
  std::string label;
  std::string word;
  std::vector<Tree> children;

  static Tree Leaf(std::string pos, std::string word);
  static Tree Internal(std::string label, std::vector<Tree> children);

  bool is_leaf() const { return children.empty(); }

  friend bool operator==(const Tree&, const Tree&) = default;
};

// A POS-tagged sentence, the input side of the tagger.
struct Sentence {
  std::vector<std::string> words;
  std::vector<std::string> pos;

  std::size_t size() const { return words.size(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

std::size_t leaf_count(const Tree& tree);

// Nodes on the longest root-to-word path, preterminal included.
int depth(const Tree& tree);

// Leaves read left to right.
Sentence sentence_of(const Tree& tree);

// Throws ContractError unless words and pos are non-empty and aligned.
void validate(const Sentence& sentence);

}  // namespace tagparse

#endif  // TAGPARSE_TREE_H_
