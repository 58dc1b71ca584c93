#include "tagparse/tree.h"

#include <algorithm>

#include "tagparse/errors.h"

namespace tagparse {

Tree Tree::Leaf(std::string pos, std::string word) {
  Tree t;
  t.label = std::move(pos);
  t.word = std::move(word);
  return t;
}

Tree Tree::Internal(std::string label, std::vector<Tree> children) {
  if (children.empty()) {
    throw ContractError("internal node '" + label + "' needs at least one child");
  }
  Tree t;
  t.label = std::move(label);
  t.children = std::move(children);
  return t;
}

std::size_t leaf_count(const Tree& tree) {
  if (tree.is_leaf()) return 1;
  std::size_t n = 0;
  for (const Tree& c : tree.children) n += leaf_count(c);
  return n;
}

int depth(const Tree& tree) {
  int d = 0;
  for (const Tree& c : tree.children) d = std::max(d, depth(c));
  return d + 1;
}

namespace {

void collect(const Tree& tree, Sentence& out) {
  if (tree.is_leaf()) {
    out.words.push_back(tree.word);
    out.pos.push_back(tree.label);
    return;
  }
  for (const Tree& c : tree.children) collect(c, out);
}

}  // namespace

Sentence sentence_of(const Tree& tree) {
  Sentence s;
  collect(tree, s);
  return s;
}

void validate(const Sentence& sentence) {
  if (sentence.words.empty()) throw ContractError("empty sentence");
  if (sentence.words.size() != sentence.pos.size()) {
    throw ContractError("sentence has " + std::to_string(sentence.words.size()) +
                        " words but " + std::to_string(sentence.pos.size()) +
                        " POS tags");
  }
}

}  // namespace tagparse
